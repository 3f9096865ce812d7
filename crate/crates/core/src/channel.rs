//! Random Rician channel realizations for the Monte Carlo oracle.
//!
//! NLoS entries come from a counter-based substream keyed by
//! `(seed, user, trial)`, so any subset of trials can be generated in any
//! order, on any number of workers, and reproduce the same draws.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::SystemConfig;
use crate::geometry::{steering_row, AntennaLayout};

/// One draw of every user's channel row.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `h_m`, one row of length N per user.
    pub rows: Vec<Vec<Complex64>>,
    /// The NLoS part `h̃_m` each row was built from.
    pub nlos: Vec<Vec<Complex64>>,
}

impl ChannelRealization {
    /// Rebuilds row `m` from the deterministic LoS row and the stored NLoS
    /// draw.
    pub fn reconstruct_row(
        &self,
        layout: &AntennaLayout,
        cfg: &SystemConfig,
        m: usize,
    ) -> Vec<Complex64> {
        combine(&steering_row(layout, cfg, m), &self.nlos[m], cfg, m)
    }
}

/// Substream for `(user, trial)` under `seed`.
pub fn substream(seed: u64, user: usize, trial: u64) -> ChaCha8Rng {
    assert!(user < 1 << 16, "user index exceeds substream key space");
    assert!(trial < 1 << 48, "trial index exceeds substream key space");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 16) | user as u64);
    rng
}

/// `len` i.i.d. circularly-symmetric complex Gaussian entries with unit
/// variance, from the `(user, trial)` substream.
pub fn nlos_row(seed: u64, user: usize, trial: u64, len: usize) -> Vec<Complex64> {
    let mut rng = substream(seed, user, trial);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re * s, im * s)
        })
        .collect()
}

/// `sqrt(Kβ/(K+1))·LoS + sqrt(β/(K+1))·NLoS` for user `m`.
pub fn combine(
    los: &[Complex64],
    nlos: &[Complex64],
    cfg: &SystemConfig,
    m: usize,
) -> Vec<Complex64> {
    let k = cfg.rician_k[m];
    let beta = cfg.large_scale_gain[m];
    let a = (k * beta / (k + 1.0)).sqrt();
    let b = (beta / (k + 1.0)).sqrt();
    los.iter()
        .zip(nlos)
        .map(|(l, r)| l * a + r * b)
        .collect()
}

/// Draws every user's channel row for one trial.
pub fn draw_channel(
    layout: &AntennaLayout,
    cfg: &SystemConfig,
    seed: u64,
    trial: u64,
) -> ChannelRealization {
    let n = layout.len();
    let mut rows = Vec::with_capacity(cfg.num_users);
    let mut nlos = Vec::with_capacity(cfg.num_users);
    for m in 0..cfg.num_users {
        let r = nlos_row(seed, m, trial, n);
        rows.push(combine(&steering_row(layout, cfg, m), &r, cfg, m));
        nlos.push(r);
    }
    ChannelRealization { rows, nlos }
}
