//! SINR statistics under ZF beamforming with statistical CSI.
//!
//! The SINR of user m is written `Z_m = P_m X_m / Y_m` with
//!
//! * `X_m = |sqrt(Kβ/(K+1)) h̄_m w_m + sqrt(β/(K+1)) h̃_m w_m|²` (desired)
//! * `Y_m = Σ_{j≠m} P_j |sqrt(β/(K+1)) h̃_m w_j|² + σ²` (interference + noise)
//!
//! Means, variances and the covariance of `X_m` and `Y_m` are exact; the
//! moments of the ratio come from a second-order Taylor expansion (mean) and
//! a first-order one (variance), and the SINR distribution is then matched
//! to a Gamma law by its first two moments.

use crate::beamforming::ChannelFunctionals;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::special::gamma_p;

/// Moments of one user's SINR decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub ex: f64,
    pub vx: f64,
    pub ey: f64,
    pub vy: f64,
    pub cov: f64,
    /// Approximate `E[Z_m]` (second-order mean).
    pub ez: f64,
    /// Approximate `V[Z_m]`.
    pub vz: f64,
    /// `P_m` the Z-moments were scaled by.
    pub power: f64,
}

impl MomentSet {
    /// Builds every moment for user `m` from its channel functionals.
    pub fn for_user(f: &ChannelFunctionals, cfg: &SystemConfig, m: usize) -> Result<Self> {
        let (ex, vx) = moments_x(f.f1[m], cfg, m);
        let (ey, vy) = moments_y(f.f2[m], cfg, m);
        let cov = covariance_xy(&f.f3[m], cfg, m);
        let power = cfg.tx_power[m];
        let (ez, vz) = z_moments(ex, vx, ey, vy, cov, power)?;
        Ok(MomentSet {
            ex,
            vx,
            ey,
            vy,
            cov,
            ez,
            vz,
            power,
        })
    }

    /// `E[Z_m]` from the first-order expansion alone, `P_m E[X]/E[Y]`.
    pub fn ez_first_order(&self) -> f64 {
        self.power * self.ex / self.ey
    }

    pub fn gamma_fit(&self) -> Result<GammaFit> {
        gamma_fit(self.ez, self.vz)
    }

    pub fn gamma_fit_first_order(&self) -> Result<GammaFit> {
        gamma_fit_first_order(self.ez_first_order(), self.vz)
    }
}

/// Moments of every user.
pub fn moment_sets(f: &ChannelFunctionals, cfg: &SystemConfig) -> Result<Vec<MomentSet>> {
    (0..cfg.num_users)
        .map(|m| MomentSet::for_user(f, cfg, m))
        .collect()
}

/// Taylor-expansion moments of `X / Y` for correlated positive `X`, `Y`.
///
/// Returns `(mean, variance)` with
///
/// ```text
/// mean     = E[X]/E[Y] + E[X]V[Y]/E[Y]³ − Cov/E[Y]²
/// variance = V[X]/E[Y]² + E[X]²V[Y]/E[Y]⁴ − 2E[X]Cov/E[Y]³
/// ```
///
/// A negative variance means the expansion is outside its useful range and
/// is reported as [`Error::NonPositiveVariance`]. Zero is allowed: it is the
/// deterministic-ratio case.
pub fn ratio_moments(ex: f64, vx: f64, ey: f64, vy: f64, cov: f64) -> Result<(f64, f64)> {
    assert!(ey > 0.0, "E[Y] must be positive");
    let ey2 = ey * ey;
    let ey3 = ey2 * ey;
    let mean = ex / ey + ex * vy / ey3 - cov / ey2;
    let var = vx / ey2 + ex * ex * vy / (ey2 * ey2) - 2.0 * ex * cov / ey3;
    if var < 0.0 || var.is_nan() {
        return Err(Error::NonPositiveVariance(var));
    }
    Ok((mean, var))
}

/// `(E[X_m], V[X_m])` given the beamforming gain `f1 = |h̄_m w_m|²`.
pub fn moments_x(f1: f64, cfg: &SystemConfig, m: usize) -> (f64, f64) {
    let k = cfg.rician_k[m];
    let beta = cfg.large_scale_gain[m];
    let ex = k * beta / (k + 1.0) * f1 + beta / (k + 1.0);
    let vx = beta * beta / ((k + 1.0) * (k + 1.0)) * (1.0 + 2.0 * k * f1);
    (ex, vx)
}

/// `(E[Y_m], V[Y_m])` given the interference trace `f2 = tr(Ψ_m²)`.
pub fn moments_y(f2: f64, cfg: &SystemConfig, m: usize) -> (f64, f64) {
    let s = cfg.large_scale_gain[m] / (cfg.rician_k[m] + 1.0);
    let others: f64 = cfg
        .tx_power
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != m)
        .map(|(_, p)| p)
        .sum();
    (s * others + cfg.noise_power, s * s * f2)
}

/// `Cov(X_m, Y_m) = Σ_{j≠m} P_j β²/(K+1)² f3(m, j)`.
///
/// `f3_row[j]` is `|w_jᴴ w_m|²`; entry `m` itself is ignored.
pub fn covariance_xy(f3_row: &[f64], cfg: &SystemConfig, m: usize) -> f64 {
    let s = cfg.large_scale_gain[m] / (cfg.rician_k[m] + 1.0);
    f3_row
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != m)
        .map(|(j, f)| cfg.tx_power[j] * s * s * f)
        .sum()
}

/// Mean and variance of `Z_m = P_m X_m / Y_m`.
pub fn z_moments(ex: f64, vx: f64, ey: f64, vy: f64, cov: f64, power: f64) -> Result<(f64, f64)> {
    let (mean, var) = ratio_moments(ex, vx, ey, vy, cov)?;
    Ok((power * mean, power * power * var))
}

/// Moment-matched Gamma law: `shape = mean²/var`, `scale = var/mean`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFit {
    pub shape: f64,
    pub scale: f64,
}

impl GammaFit {
    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    pub fn cdf(&self, v: f64) -> f64 {
        gamma_cdf(self, v)
    }
}

pub fn gamma_fit(ez: f64, vz: f64) -> Result<GammaFit> {
    if !(ez > 0.0 && vz > 0.0) || !ez.is_finite() || !vz.is_finite() {
        return Err(Error::DegenerateDistribution {
            mean: ez,
            variance: vz,
        });
    }
    Ok(GammaFit {
        shape: ez * ez / vz,
        scale: vz / ez,
    })
}

/// Gamma fit that takes the first-order mean `P_m E[X]/E[Y]` in place of
/// the second-order one; the variance is shared.
pub fn gamma_fit_first_order(ez_first_order: f64, vz: f64) -> Result<GammaFit> {
    gamma_fit(ez_first_order, vz)
}

/// `P(shape, v/scale)`.
pub fn gamma_cdf(fit: &GammaFit, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    gamma_p(fit.shape, v / fit.scale)
}
