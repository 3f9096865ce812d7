//! Comparison schemes: fixed ULA, best random layout, antenna selection and
//! rotatable ULA.
//!
//! FPA, AS and RULA model rigid arrays, so their layouts ignore the
//! per-antenna regions; they are scored with the same closed-form sum rate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::AntennaLayout;
use crate::optimizer::random_starts;
use crate::rate::Objective;

/// Element spacing of every fixed array, in wavelengths.
pub const ULA_SPACING: f64 = 0.5;
/// Largest `C(2N, N)` the exhaustive selection will enumerate.
pub const MAX_SUBSETS: u64 = 3_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BenchmarkScheme {
    Fpa,
    Rap { realizations: usize },
    As,
    Rula { angles: usize },
}

impl BenchmarkScheme {
    pub fn name(&self) -> &'static str {
        match self {
            BenchmarkScheme::Fpa => "FPA",
            BenchmarkScheme::Rap { .. } => "RAP",
            BenchmarkScheme::As => "AS",
            BenchmarkScheme::Rula { .. } => "RULA",
        }
    }

    pub fn defaults() -> [BenchmarkScheme; 4] {
        [
            BenchmarkScheme::Fpa,
            BenchmarkScheme::Rap { realizations: 100 },
            BenchmarkScheme::As,
            BenchmarkScheme::Rula { angles: 100 },
        ]
    }
}

/// A scheme's chosen layout and its sum rate.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkOutcome {
    pub scheme: BenchmarkScheme,
    pub layout: AntennaLayout,
    pub sum_rate: f64,
    pub per_user: Vec<f64>,
    /// Selected ULA elements (AS) or rotation angle (RULA), for reporting.
    pub detail: String,
}

pub fn run(obj: &Objective, scheme: BenchmarkScheme, seed: u64) -> Result<BenchmarkOutcome> {
    let (layout, detail) = match scheme {
        BenchmarkScheme::Fpa => (fpa_layout(obj.cfg.num_antennas), String::new()),
        BenchmarkScheme::Rap { realizations } => (rap_best(obj, realizations, seed)?.0, String::new()),
        BenchmarkScheme::As => {
            let (sel, _) = as_best(obj)?;
            let d = sel.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
            (selection_layout(&sel), d)
        }
        BenchmarkScheme::Rula { angles } => {
            let (angle, _) = rula_best(obj, angles)?;
            (fpa_layout(obj.cfg.num_antennas).rotated(angle), format!("{angle:.17e}"))
        }
    };
    let eval = obj.evaluate(&layout)?;
    Ok(BenchmarkOutcome {
        scheme,
        layout,
        sum_rate: eval.sum,
        per_user: eval.per_user,
        detail,
    })
}

/// N-element ULA along x from the origin.
pub fn fpa_layout(n: usize) -> AntennaLayout {
    AntennaLayout::linear(n, ULA_SPACING)
}

/// Index of the maximum, ties to the lowest index; skips failed entries.
fn argmax(values: &[Result<f64>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.iter().enumerate() {
        if let Ok(v) = v {
            if best.is_none_or(|(_, b)| *v > b) {
                best = Some((i, *v));
            }
        }
    }
    best.map(|(i, _)| i)
}

fn first_error(values: Vec<Result<f64>>) -> Error {
    values
        .into_iter()
        .find_map(|v| v.err())
        .unwrap_or_else(|| Error::InvalidConfig("nothing to evaluate".into()))
}

/// Best of `realizations` uniform random feasible layouts.
pub fn rap_best(obj: &Objective, realizations: usize, seed: u64) -> Result<(AntennaLayout, f64)> {
    let layouts = random_starts(&obj.cfg.regions, realizations, seed);
    let values: Vec<Result<f64>> = layouts.par_iter().map(|t| obj.value(t)).collect();
    match argmax(&values) {
        Some(i) => Ok((layouts[i].clone(), *values[i].as_ref().unwrap())),
        None => Err(first_error(values)),
    }
}

/// Layout of the selected elements of a 2N-element ULA.
pub fn selection_layout(selected: &[usize]) -> AntennaLayout {
    AntennaLayout::new(selected.iter().map(|&i| [i as f64 * ULA_SPACING, 0.0]).collect())
}

/// `C(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul((n - i) as u64) / (i as u64 + 1))
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            break;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// Exhaustive selection of N out of a 2N-element ULA. Ties go to the
/// lexicographically smallest index set.
pub fn as_best(obj: &Objective) -> Result<(Vec<usize>, f64)> {
    as_best_from(obj, 2 * obj.cfg.num_antennas)
}

/// Exhaustive selection of N out of a `total`-element ULA.
pub fn as_best_from(obj: &Objective, total: usize) -> Result<(Vec<usize>, f64)> {
    let n = obj.cfg.num_antennas;
    if binomial(total, n) > MAX_SUBSETS {
        return Err(Error::CombinatorialLimit { total, selected: n });
    }
    let sets = subsets(total, n);
    let values: Vec<Result<f64>> = sets.par_iter().map(|s| obj.value(&selection_layout(s))).collect();
    match argmax(&values) {
        Some(i) => Ok((sets[i].clone(), *values[i].as_ref().unwrap())),
        None => Err(first_error(values)),
    }
}

/// The angle grid: `count` points from −π spaced `2π/count` apart.
pub fn rula_angles(count: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    (0..count).map(|i| -PI + 2.0 * PI * i as f64 / count as f64).collect()
}

/// Best rigid rotation of the N-element ULA about the origin.
pub fn rula_best(obj: &Objective, angle_count: usize) -> Result<(f64, f64)> {
    let base = fpa_layout(obj.cfg.num_antennas);
    let angles = rula_angles(angle_count);
    let values: Vec<Result<f64>> = angles.par_iter().map(|&a| obj.value(&base.rotated(a))).collect();
    match argmax(&values) {
        Some(i) => Ok((angles[i], *values[i].as_ref().unwrap())),
        None => Err(first_error(values)),
    }
}
