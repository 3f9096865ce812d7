//! Outage-aware rate.
//!
//! For a target outage probability δ the fixed rate of user m solves
//! `P(shape, (2^R − 1)/scale) = δ`, i.e.
//! `R = log₂(1 + scale · P⁻¹(shape, δ))`. Two evaluation paths exist:
//!
//! * [`outage_rate_exact`] inverts the incomplete gamma numerically;
//! * [`approx_rate`] replaces the inverse by the line `κ(δ)·shape + ρ(δ)`
//!   and expands everything in terms of the layout functionals `f1`, `f2`,
//!   `f3`, which is what the optimizer differentiates:
//!
//! ```text
//! R ≈ log₂(f4 + f5/f6)
//! f4 = ϖ1 + ϖ2 f1 + f2(ϖ3 + ϖ4 f1) + Σ_j ϖ5_j f3_j
//! f5 = ϖ6 + f2(ϖ7 + ϖ8 f1) + Σ_j ϖ9_j f3_j
//! f6 = ϖ10 + ϖ11 f2 + Σ_j ϖ12_j f3_j / (ϖ13 f1 + ϖ14)
//! ```
//!
//! The ϖ constants only depend on powers, gains, K-factors, noise and
//! (κ, ρ), so they are computed once per scenario.

use crate::beamforming::{ChannelFunctionals, LayoutState};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::geometry::AntennaLayout;
use crate::special::gamma_p_inv;
use crate::statistics::{ratio_moments, GammaFit, MomentSet};

/// Published `(δ, κ(δ), ρ(δ))` for δ = 0.10, 0.11, …, 0.20.
pub const LINEARIZATION_TABLE: [(f64, f64, f64); 11] = [
    (0.10, 0.7655, -1.188),
    (0.11, 0.7752, -1.167),
    (0.12, 0.7842, -1.145),
    (0.13, 0.7928, -1.124),
    (0.14, 0.8010, -1.103),
    (0.15, 0.8088, -1.082),
    (0.16, 0.8163, -1.061),
    (0.17, 0.8235, -1.041),
    (0.18, 0.8304, -1.020),
    (0.19, 0.8371, -0.9993),
    (0.20, 0.8437, -0.9787),
];

/// Shape grid used when δ is not one of the tabulated values.
pub fn default_shape_grid() -> Vec<f64> {
    (0..=190).map(|i| 1.0 + 0.1 * i as f64).collect()
}

/// Linear stand-in `κ·shape + ρ` for `P⁻¹(shape, δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGammaLinearization {
    pub kappa: f64,
    pub rho: f64,
    pub delta: f64,
}

impl InverseGammaLinearization {
    /// Table entry when δ is tabulated, otherwise a least-squares fit over
    /// [`default_shape_grid`].
    pub fn for_delta(delta: f64) -> Self {
        Self::lookup(delta).unwrap_or_else(|| fit_linearization(delta, &default_shape_grid()))
    }

    pub fn lookup(delta: f64) -> Option<Self> {
        LINEARIZATION_TABLE
            .iter()
            .find(|(d, _, _)| (d - delta).abs() < 1e-9)
            .map(|&(d, kappa, rho)| InverseGammaLinearization {
                kappa,
                rho,
                delta: d,
            })
    }

    pub fn threshold(&self, shape: f64) -> f64 {
        inverse_gamma_linear(self, shape)
    }
}

/// `P⁻¹(shape, δ)`, the SINR threshold (in units of scale) exceeded with
/// probability `1 − δ`.
pub fn inverse_gamma_exact(delta: f64, shape: f64) -> f64 {
    gamma_p_inv(shape, delta)
}

pub fn inverse_gamma_linear(lin: &InverseGammaLinearization, shape: f64) -> f64 {
    lin.kappa * shape + lin.rho
}

/// Least-squares line through `(shape, P⁻¹(shape, δ))` over `shape_grid`.
pub fn fit_linearization(delta: f64, shape_grid: &[f64]) -> InverseGammaLinearization {
    let pts: Vec<(f64, f64)> = shape_grid
        .iter()
        .map(|&s| (s, inverse_gamma_exact(delta, s)))
        .collect();
    let (kappa, rho) = least_squares_line(&pts);
    InverseGammaLinearization { kappa, rho, delta }
}

/// Slope and intercept of the least-squares line through `pts`.
pub fn least_squares_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `log₂(1 + scale · P⁻¹(shape, δ))`.
pub fn outage_rate_exact(fit: &GammaFit, delta: f64) -> f64 {
    (1.0 + fit.scale * inverse_gamma_exact(delta, fit.shape)).log2()
}

/// Rate from the linearized threshold. Negative thresholds are clamped to
/// zero; the flag reports whether that happened.
pub fn outage_rate_linear(fit: &GammaFit, lin: &InverseGammaLinearization) -> (f64, bool) {
    let thr = inverse_gamma_linear(lin, fit.shape);
    if thr < 0.0 {
        (0.0, true)
    } else {
        ((1.0 + fit.scale * thr).log2(), false)
    }
}

/// Layout-independent ϖ constants of one user.
#[derive(Debug, Clone, PartialEq)]
pub struct RateConstants {
    pub user: usize,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
    /// `ϖ5_j`, indexed by user; zero at `j == user`.
    pub w5: Vec<f64>,
    pub w6: f64,
    pub w7: f64,
    pub w8: f64,
    pub w9: Vec<f64>,
    pub w10: f64,
    pub w11: f64,
    pub w12: Vec<f64>,
    pub w13: f64,
    pub w14: f64,
}

impl RateConstants {
    pub fn new(cfg: &SystemConfig, lin: &InverseGammaLinearization, m: usize) -> Self {
        let p = cfg.tx_power[m];
        let b = cfg.large_scale_gain[m];
        let k = cfg.rician_k[m];
        let k1 = k + 1.0;
        let (kap, rho) = (lin.kappa, lin.rho);
        let ey = crate::statistics::moments_y(0.0, cfg, m).0;
        let per_j = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
            (0..cfg.num_users)
                .map(|j| if j == m { 0.0 } else { f(cfg.tx_power[j]) })
                .collect()
        };
        RateConstants {
            user: m,
            w1: 1.0 + kap * p * b / (ey * k1),
            w2: kap * p * b * k / (ey * k1),
            w3: kap * p * b.powi(3) / (ey.powi(3) * k1.powi(3)),
            w4: kap * p * k * b.powi(3) / (ey.powi(3) * k1.powi(3)),
            w5: per_j(&|pj| -kap * pj * p * b * b / (ey * ey * k1 * k1)),
            w6: 2.0 * rho * p * b / k1,
            w7: rho * p * b.powi(3) / (ey * ey * k1.powi(3)),
            w8: rho * p * k * b.powi(3) / (ey * ey * k1.powi(3)),
            w9: per_j(&|pj| -2.0 * rho * p * pj * b * b / (ey * k1 * k1)),
            w10: ey,
            w11: b * b / (ey * k1 * k1),
            w12: per_j(&|pj| -pj * b * b / (k1 * k1)),
            w13: k * b / k1,
            w14: b / k1,
        }
    }

    /// Constants for every user.
    pub fn all(cfg: &SystemConfig, lin: &InverseGammaLinearization) -> Vec<Self> {
        (0..cfg.num_users)
            .map(|m| RateConstants::new(cfg, lin, m))
            .collect()
    }

    /// Assembles `f4`, `f5`, `f6` for one layout.
    pub fn terms(&self, f: &ChannelFunctionals) -> RateTerms {
        let m = self.user;
        let f1 = f.f1[m];
        let f2 = f.f2[m];
        let f3 = &f.f3[m];
        let sum = |w: &[f64]| -> f64 {
            w.iter()
                .zip(f3)
                .enumerate()
                .filter(|&(j, _)| j != m)
                .map(|(_, (a, b))| a * b)
                .sum()
        };
        let f4 = self.w1 + self.w2 * f1 + f2 * (self.w3 + self.w4 * f1) + sum(&self.w5);
        let f5 = self.w6 + f2 * (self.w7 + self.w8 * f1) + sum(&self.w9);
        let gain = self.w13 * f1 + self.w14;
        let f6 = self.w10 + self.w11 * f2 + sum(&self.w12) / gain;
        RateTerms {
            user: m,
            f4,
            f5,
            f6,
        }
    }
}

/// The three aggregates inside the closed-form rate of one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTerms {
    pub user: usize,
    pub f4: f64,
    pub f5: f64,
    pub f6: f64,
}

impl RateTerms {
    /// `f4 + f5/f6`, the argument of the logarithm.
    pub fn argument(&self) -> f64 {
        self.f4 + self.f5 / self.f6
    }

    /// `ξ_m = f5/f6 · E[Y]/(ρ P)` is not needed downstream; `f5/f6` is the
    /// `ρ`-weighted spread term.
    pub fn spread_term(&self) -> f64 {
        self.f5 / self.f6
    }
}

/// Closed-form rate `log₂(f4 + f5/f6)`.
///
/// An argument below one (negative linearized threshold) is clamped to a
/// zero rate; [`RateValue::clamped`] records it. A non-positive argument
/// means the approximation has broken down.
pub fn approx_rate(terms: &RateTerms) -> Result<RateValue> {
    let arg = terms.argument();
    if !(arg > 0.0) {
        return Err(Error::NonPositiveRateArgument(arg, terms.user));
    }
    if arg < 1.0 {
        Ok(RateValue {
            rate: 0.0,
            clamped: true,
        })
    } else {
        Ok(RateValue {
            rate: arg.log2(),
            clamped: false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateValue {
    pub rate: f64,
    pub clamped: bool,
}

/// Linearized rate straight from the SINR moments:
/// `log₂(1 + κ E[Z] + ρ V[Z]/E[Z])`, unclamped.
///
/// With `substitute_spread = true`, `V[X]` is replaced by
/// `2β/(K+1) · E[X]` first (the large-gain limit of `V[X]/E[X]`), which is
/// exactly the approximation built into [`approx_rate`].
pub fn linearized_rate_from_moments(
    ms: &MomentSet,
    lin: &InverseGammaLinearization,
    cfg: &SystemConfig,
    m: usize,
    substitute_spread: bool,
) -> Result<f64> {
    let vx = if substitute_spread {
        2.0 * cfg.large_scale_gain[m] / (cfg.rician_k[m] + 1.0) * ms.ex
    } else {
        ms.vx
    };
    let (mean, var) = ratio_moments(ms.ex, vx, ms.ey, ms.vy, ms.cov)?;
    let ez = ms.power * mean;
    let vz = ms.power * ms.power * var;
    Ok((1.0 + lin.kappa * ez + lin.rho * vz / ez).log2())
}

/// Per-user and total closed-form rates of one layout.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEvaluation {
    pub per_user: Vec<f64>,
    pub sum: f64,
    /// Users whose linearized threshold went negative and were clamped.
    pub clamped: usize,
}

/// The optimization objective: sum of closed-form outage-aware rates.
#[derive(Debug, Clone)]
pub struct Objective {
    pub cfg: SystemConfig,
    pub lin: InverseGammaLinearization,
    pub constants: Vec<RateConstants>,
}

impl Objective {
    /// Objective at the config's own outage target.
    pub fn new(cfg: &SystemConfig) -> Self {
        Self::with_linearization(cfg, InverseGammaLinearization::for_delta(cfg.outage_target))
    }

    pub fn with_linearization(cfg: &SystemConfig, lin: InverseGammaLinearization) -> Self {
        Objective {
            cfg: cfg.clone(),
            constants: RateConstants::all(cfg, &lin),
            lin,
        }
    }

    pub fn evaluate_state(&self, state: &LayoutState) -> Result<RateEvaluation> {
        let mut per_user = Vec::with_capacity(self.constants.len());
        let mut clamped = 0;
        for c in &self.constants {
            let v = approx_rate(&c.terms(&state.functionals))?;
            clamped += v.clamped as usize;
            per_user.push(v.rate);
        }
        Ok(RateEvaluation {
            sum: per_user.iter().sum(),
            per_user,
            clamped,
        })
    }

    pub fn evaluate(&self, layout: &AntennaLayout) -> Result<RateEvaluation> {
        self.evaluate_state(&LayoutState::new(layout, &self.cfg)?)
    }

    /// Sum rate only.
    pub fn value(&self, layout: &AntennaLayout) -> Result<f64> {
        self.evaluate(layout).map(|e| e.sum)
    }
}

/// Exact-inverse rates of every user (numerical `P⁻¹`, no linearization).
pub fn exact_rates(layout: &AntennaLayout, cfg: &SystemConfig) -> Result<Vec<f64>> {
    let state = LayoutState::new(layout, cfg)?;
    let ms = crate::statistics::moment_sets(&state.functionals, cfg)?;
    ms.iter()
        .map(|m| Ok(outage_rate_exact(&m.gamma_fit()?, cfg.outage_target)))
        .collect()
}
