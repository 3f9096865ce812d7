//! Outage-aware sum-rate maximization for movable-antenna multiuser MISO
//! downlinks with statistical CSI.
//!
//! The pipeline, from layout to objective:
//!
//! 1. [`geometry`] — antenna positions, moving regions and LoS steering rows;
//! 2. [`beamforming`] — statistical zero-forcing and the functionals
//!    `f1`, `f2`, `f3` read off the inverse Gram matrix;
//! 3. [`statistics`] — SINR moments and the moment-matched Gamma law;
//! 4. [`rate`] — outage-aware rate, exact and in closed form;
//! 5. [`gradient`] / [`optimizer`] — analytic gradient and multi-start
//!    projected gradient ascent.
//!
//! [`oracle`] provides Monte Carlo ground truth, [`benchmarks`] the
//! comparison arrays and [`experiment`] the CSV-producing commands.
//!
//! ```
//! use ma_outage::{reference_scenario, AntennaLayout, Objective};
//!
//! let cfg = reference_scenario(5, 1.0, 15.0, 0.2);
//! let obj = Objective::new(&cfg);
//! let rate = obj.value(&AntennaLayout::centers(&cfg.regions)).unwrap();
//! assert!(rate > 0.0);
//! ```

pub mod beamforming;
pub mod benchmarks;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod gradient;
pub mod optimizer;
pub mod oracle;
pub mod rate;
pub mod special;
pub mod statistics;

pub use beamforming::{ChannelFunctionals, LayoutState};
pub use config::{reference_scenario, validation_scenario, SystemConfig};
pub use error::{Error, Result};
pub use geometry::{AntennaLayout, Region};
pub use gradient::{objective_gradient, LayoutGradient};
pub use optimizer::{multi_start, pga_run, PgaConfig, PgaTrace};
pub use rate::{InverseGammaLinearization, Objective};
pub use statistics::{GammaFit, MomentSet};
