//! Multi-start projected gradient ascent over antenna positions.
//!
//! Each run iterates `t ← Π(t + ς ∇)`, where `Π` clamps every coordinate
//! into its antenna's box, until the objective stops moving. Several runs
//! from different starts are made and the best final layout wins.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AntennaLayout, Region};
use crate::gradient::{value_and_gradient, LayoutGradient};
use crate::rate::Objective;

/// Step policy and stopping rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PgaConfig {
    /// `ς`, wavelengths per unit gradient.
    pub step_size: f64,
    pub max_iters: usize,
    /// Converged once the objective moved less than `conv_tol` over the
    /// last `conv_window` iterations.
    pub conv_window: usize,
    pub conv_tol: f64,
    /// Random starts drawn per run.
    pub num_starts: usize,
    pub line_search: bool,
    /// Armijo sufficient-increase constant, in (0, 1).
    pub armijo_c: f64,
    /// Step shrink factor when backtracking, in (0, 1).
    pub backtrack: f64,
    pub max_backtracks: usize,
}

impl Default for PgaConfig {
    fn default() -> Self {
        PgaConfig {
            step_size: 0.015,
            max_iters: 10_000,
            conv_window: 50,
            conv_tol: 1e-6,
            num_starts: 5,
            line_search: false,
            armijo_c: 1e-4,
            backtrack: 0.5,
            max_backtracks: 30,
        }
    }
}

impl PgaConfig {
    pub fn check(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(format!("pga: {what}")));
        if !(self.step_size > 0.0) {
            return bad("step_size must be positive");
        }
        if self.max_iters == 0 || self.conv_window == 0 {
            return bad("max_iters and conv_window must be positive");
        }
        if !(self.conv_tol > 0.0) {
            return bad("conv_tol must be positive");
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad("armijo_c must lie in (0, 1)");
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad("backtrack must lie in (0, 1)");
        }
        Ok(())
    }
}

/// History of one ascent run.
#[derive(Debug, Clone, PartialEq)]
pub struct PgaTrace {
    pub start_index: usize,
    pub start: AntennaLayout,
    /// Objective at the start and after every iteration.
    pub objective: Vec<f64>,
    pub layout: AntennaLayout,
    pub final_objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl PgaTrace {
    /// First iteration from which the objective moved less than `tol` over
    /// the following `window` iterations, if any.
    pub fn plateau_iteration(&self, window: usize, tol: f64) -> Option<usize> {
        (0..self.objective.len().saturating_sub(window))
            .find(|&k| (self.objective[k + window] - self.objective[k]).abs() < tol)
    }
}

/// Per-coordinate clamp onto the antenna regions.
pub fn project(layout: &AntennaLayout, regions: &[Region]) -> AntennaLayout {
    AntennaLayout::new(
        layout
            .positions()
            .iter()
            .zip(regions)
            .map(|(p, r)| r.clamp(*p))
            .collect(),
    )
}

fn step(layout: &AntennaLayout, grad: &LayoutGradient, size: f64, regions: &[Region]) -> AntennaLayout {
    let moved = AntennaLayout::new(
        layout
            .positions()
            .iter()
            .enumerate()
            .map(|(n, p)| {
                let g = grad.column(n);
                [p[0] + size * g[0], p[1] + size * g[1]]
            })
            .collect(),
    );
    project(&moved, regions)
}

/// Single ascent run from `start`.
pub fn pga_run(obj: &Objective, start: &AntennaLayout, pga: &PgaConfig) -> Result<PgaTrace> {
    pga_run_indexed(obj, start, pga, 0)
}

fn pga_run_indexed(obj: &Objective, start: &AntennaLayout, pga: &PgaConfig, index: usize) -> Result<PgaTrace> {
    pga.check()?;
    let regions = &obj.cfg.regions;
    let mut t = project(start, regions);
    let (mut value, mut grad) = value_and_gradient(obj, &t)?;
    let mut objective = vec![value];
    let mut converged = false;

    for _ in 0..pga.max_iters {
        if pga.line_search {
            let mut size = pga.step_size;
            let mut accepted = None;
            for _ in 0..=pga.max_backtracks {
                let cand = step(&t, &grad, size, regions);
                let v = obj.value(&cand)?;
                let dir: f64 = cand
                    .positions()
                    .iter()
                    .zip(t.positions())
                    .enumerate()
                    .map(|(n, (c, p))| {
                        let g = grad.column(n);
                        g[0] * (c[0] - p[0]) + g[1] * (c[1] - p[1])
                    })
                    .sum();
                if v >= value + pga.armijo_c * dir {
                    accepted = Some(cand);
                    break;
                }
                size *= pga.backtrack;
            }
            // no acceptable step: stay put and let the plateau rule stop us
            if let Some(cand) = accepted {
                t = cand;
            }
        } else {
            t = step(&t, &grad, pga.step_size, regions);
        }
        let (v, g) = value_and_gradient(obj, &t)?;
        value = v;
        grad = g;
        objective.push(value);

        let k = objective.len() - 1;
        if k >= pga.conv_window && (objective[k] - objective[k - pga.conv_window]).abs() < pga.conv_tol {
            converged = true;
            break;
        }
    }

    Ok(PgaTrace {
        start_index: index,
        start: start.clone(),
        iterations: objective.len() - 1,
        final_objective: value,
        objective,
        layout: t,
        converged,
    })
}

/// All runs of a multi-start ascent plus the winner.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiStartResult {
    pub best: PgaTrace,
    pub traces: Vec<PgaTrace>,
    /// Starts that failed numerically, with the error message.
    pub failures: Vec<(usize, String)>,
}

/// `pga.num_starts` uniform random starts drawn from `seed`.
pub fn random_starts(regions: &[Region], count: usize, seed: u64) -> Vec<AntennaLayout> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| AntennaLayout::random(regions, &mut rng)).collect()
}

/// Runs the supplied starts (first) and `pga.num_starts` random ones in
/// parallel; returns the trace with the largest final objective, ties going
/// to the lower start index.
pub fn multi_start(
    obj: &Objective,
    pga: &PgaConfig,
    seed: u64,
    supplied: &[AntennaLayout],
) -> Result<MultiStartResult> {
    pga.check()?;
    let mut starts = supplied.to_vec();
    starts.extend(random_starts(&obj.cfg.regions, pga.num_starts, seed));
    if starts.is_empty() {
        return Err(Error::InvalidConfig("no optimization starts".into()));
    }
    let outcomes: Vec<Result<PgaTrace>> = starts
        .par_iter()
        .enumerate()
        .map(|(i, s)| pga_run_indexed(obj, s, pga, i))
        .collect();

    let mut traces = Vec::new();
    let mut failures = Vec::new();
    let mut first_err = None;
    for (i, out) in outcomes.into_iter().enumerate() {
        match out {
            Ok(t) => traces.push(t),
            Err(e) => {
                failures.push((i, e.to_string()));
                first_err.get_or_insert(e);
            }
        }
    }
    let best = traces
        .iter()
        .fold(None::<&PgaTrace>, |acc, t| match acc {
            Some(b) if b.final_objective >= t.final_objective => Some(b),
            _ => Some(t),
        })
        .cloned();
    match best {
        Some(best) => Ok(MultiStartResult {
            best,
            traces,
            failures,
        }),
        None => Err(first_err.expect("at least one start")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::reference_scenario;

    fn obj() -> Objective {
        Objective::new(&reference_scenario(5, 1.0, 15.0, 0.2))
    }

    #[test]
    fn projection_examples() {
        let r = vec![Region::new(0.0, 1.0, 0.0, 1.0), Region::new(1.5, 2.5, 0.0, 1.0)];
        let inside = AntennaLayout::new(vec![[0.2, 0.3], [2.0, 0.9]]);
        assert_eq!(project(&inside, &r), inside);
        let outside = AntennaLayout::new(vec![[-0.5, 1.7], [9.0, -3.0]]);
        let p = project(&outside, &r);
        assert_eq!(p.positions(), &[[0.0, 1.0], [2.5, 0.0]]);
        assert_eq!(project(&p, &r), p);
    }

    #[test]
    fn stationary_start_stops_within_window() {
        let o = obj();
        let pga = PgaConfig {
            max_iters: 20_000,
            conv_tol: 1e-9,
            ..PgaConfig::default()
        };
        let first = pga_run(&o, &AntennaLayout::centers(&o.cfg.regions), &pga).unwrap();
        let again = pga_run(&o, &first.layout, &PgaConfig { conv_tol: 1e-6, ..pga }).unwrap();
        assert!(again.iterations <= 50);
        for (a, b) in again.layout.positions().iter().zip(first.layout.positions()) {
            assert!((a[0] - b[0]).abs() < 1e-3 && (a[1] - b[1]).abs() < 1e-3);
        }
    }

    #[test]
    fn trace_shape_and_feasibility() {
        let o = obj();
        let pga = PgaConfig {
            max_iters: 200,
            ..PgaConfig::default()
        };
        let tr = pga_run(&o, &AntennaLayout::centers(&o.cfg.regions), &pga).unwrap();
        assert_eq!(tr.objective.len(), tr.iterations + 1);
        assert!(tr.layout.is_feasible(&o.cfg.regions));
        assert!(tr.final_objective >= tr.objective[0]);
    }

    #[test]
    fn line_search_is_monotone() {
        let o = obj();
        let pga = PgaConfig {
            line_search: true,
            step_size: 0.2,
            max_iters: 300,
            ..PgaConfig::default()
        };
        for s in random_starts(&o.cfg.regions, 3, 9) {
            let tr = pga_run(&o, &s, &pga).unwrap();
            for w in tr.objective.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "{} then {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn multi_start_picks_max_and_is_deterministic() {
        let o = obj();
        let pga = PgaConfig {
            num_starts: 3,
            max_iters: 300,
            ..PgaConfig::default()
        };
        let a = multi_start(&o, &pga, 21, &[]).unwrap();
        let b = multi_start(&o, &pga, 21, &[]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.traces.len(), 3);
        assert!(a.traces.iter().all(|t| a.best.final_objective >= t.final_objective));
    }

    #[test]
    fn invalid_pga_config() {
        let bad = PgaConfig {
            armijo_c: 1.5,
            ..PgaConfig::default()
        };
        assert!(bad.check().is_err());
        assert!(PgaConfig { step_size: 0.0, ..PgaConfig::default() }.check().is_err());
    }
}
