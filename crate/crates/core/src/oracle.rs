//! Monte Carlo ground truth for the SINR pipeline.
//!
//! Beamformers are fixed by the LoS channel; every trial draws fresh NLoS
//! fading and records the instantaneous SINR
//! `P_m |h_m w_m|² / (Σ_{j≠m} P_j |h_m w_j|² + σ²)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::beamforming::{los_matrix, zf_beamformers, ZfBeamformers};
use crate::channel::{combine, nlos_row};
use crate::config::SystemConfig;
use crate::error::Result;
use crate::geometry::{steering_row, AntennaLayout};
use crate::statistics::GammaFit;

/// Sorted SINR samples of one user.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
    pub seed: u64,
}

impl EmpiricalDistribution {
    /// Sorts the samples. Panics on an empty set or NaN.
    pub fn new(mut samples: Vec<f64>, seed: u64) -> Self {
        assert!(!samples.is_empty(), "empty sample set");
        samples.sort_by(|a, b| a.partial_cmp(b).expect("NaN sample"));
        EmpiricalDistribution { samples, seed }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.len() as f64
    }

    /// Unbiased sample variance (zero for a single sample).
    pub fn variance(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let mu = self.mean();
        self.samples.iter().map(|s| (s - mu).powi(2)).sum::<f64>() / (n - 1) as f64
    }
}

fn sinr(row: &[Complex64], w: &ZfBeamformers, cfg: &SystemConfig, m: usize) -> f64 {
    let gain = |j: usize| -> f64 {
        row.iter()
            .zip(w.0.column(j).iter())
            .map(|(h, x)| h * x)
            .sum::<Complex64>()
            .norm_sqr()
    };
    let interference: f64 = (0..cfg.num_users)
        .filter(|&j| j != m)
        .map(|j| cfg.tx_power[j] * gain(j))
        .sum();
    cfg.tx_power[m] * gain(m) / (interference + cfg.noise_power)
}

/// `num_trials` SINR draws for user `m`. Trials are independent
/// substreams, so the result does not depend on the worker count.
pub fn sample_sinr(
    layout: &AntennaLayout,
    cfg: &SystemConfig,
    m: usize,
    num_trials: u64,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    let w = zf_beamformers(&los_matrix(layout, cfg))?;
    let los = steering_row(layout, cfg, m);
    let samples: Vec<f64> = (0..num_trials)
        .into_par_iter()
        .map(|trial| {
            let row = combine(&los, &nlos_row(seed, m, trial, layout.len()), cfg, m);
            sinr(&row, &w, cfg, m)
        })
        .collect();
    Ok(EmpiricalDistribution::new(samples, seed))
}

/// [`sample_sinr`] for every user.
pub fn sample_all_users(
    layout: &AntennaLayout,
    cfg: &SystemConfig,
    num_trials: u64,
    seed: u64,
) -> Result<Vec<EmpiricalDistribution>> {
    (0..cfg.num_users)
        .map(|m| sample_sinr(layout, cfg, m, num_trials, seed))
        .collect()
}

/// Fraction of samples `≤ v`.
pub fn empirical_cdf(dist: &EmpiricalDistribution, v: f64) -> f64 {
    dist.samples.partition_point(|&s| s <= v) as f64 / dist.len() as f64
}

/// Quantile by linear interpolation between order statistics (position
/// `(n − 1)·δ` in the sorted samples).
pub fn empirical_quantile(dist: &EmpiricalDistribution, delta: f64) -> f64 {
    let s = &dist.samples;
    let h = (s.len() - 1) as f64 * delta.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(s.len() - 1);
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

/// `log₂(1 + quantile(δ))`.
pub fn empirical_outage_rate(dist: &EmpiricalDistribution, delta: f64) -> f64 {
    (1.0 + empirical_quantile(dist, delta)).log2()
}

/// Kolmogorov–Smirnov distance between the empirical CDF and a Gamma fit.
pub fn cdf_distance(dist: &EmpiricalDistribution, fit: &GammaFit) -> f64 {
    let n = dist.len() as f64;
    dist.samples
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let f = fit.cdf(s);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
