//! Experiment orchestration behind the `ma-outage` binary: single
//! optimizations, Monte Carlo validation, parameter sweeps and benchmark
//! comparisons, each persisted as CSV plus a JSON manifest.
//!
//! CSV floats are written with 17 significant digits so identical inputs
//! give byte-identical files. Wall-clock timings only go to the manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::beamforming::LayoutState;
use crate::benchmarks::{self, BenchmarkScheme};
use crate::config::{dbm_to_mw, load_config, square_regions, ConfigFile, SystemConfig};
use crate::error::{Error, ErrorCategory, Result};
use crate::geometry::AntennaLayout;
use crate::optimizer::{multi_start, PgaConfig};
use crate::oracle::{cdf_distance, empirical_cdf, empirical_outage_rate, empirical_quantile, sample_sinr};
use crate::rate::{exact_rates, Objective};
use crate::statistics::moment_sets;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

/// Trial counts below this get a quality caveat in the manifest.
pub const LOW_TRIAL_COUNT: u64 = 10_000;

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err.category() {
        ErrorCategory::Numerical => EXIT_NUMERICAL,
        ErrorCategory::Config | ErrorCategory::Io => EXIT_CONFIG,
    }
}

/// `v` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub config: PathBuf,
    pub seed: u64,
    pub trials: Option<u64>,
    pub starts: Option<usize>,
    pub out: PathBuf,
    pub line_search: bool,
}

impl RunOptions {
    pub fn new(config: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunOptions {
            config: config.into(),
            seed: 0,
            trials: None,
            starts: None,
            out: out.into(),
            line_search: false,
        }
    }

    fn pga(&self, base: PgaConfig) -> PgaConfig {
        PgaConfig {
            num_starts: self.starts.unwrap_or(base.num_starts),
            line_search: self.line_search || base.line_search,
            ..base
        }
    }
}

/// SHA-256 of the canonical JSON of a serializable value.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable");
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub trials: Option<u64>,
    pub spec: ExperimentSpec,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub caveats: Vec<String>,
    pub wall_time_s: f64,
    pub files: Vec<String>,
}

fn write_manifest(dir: &Path, m: &Manifest) -> Result<()> {
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(m)? + "\n")?;
    Ok(())
}

fn write_csv(dir: &Path, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join(name))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn user_columns(prefix: &str, m: usize) -> impl Iterator<Item = String> + '_ {
    (0..m).map(move |i| format!("{prefix}{}", i + 1))
}

fn header(fixed: &[&str]) -> Vec<String> {
    fixed.iter().map(|s| s.to_string()).collect()
}

// ---------------------------------------------------------------------------
// Specs
// ---------------------------------------------------------------------------

/// Everything compared in a sweep: the optimized layout or a benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ma,
    Fpa,
    Rap,
    As,
    Rula,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::Ma, Scheme::Fpa, Scheme::Rap, Scheme::As, Scheme::Rula];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ma => "MA",
            Scheme::Fpa => "FPA",
            Scheme::Rap => "RAP",
            Scheme::As => "AS",
            Scheme::Rula => "RULA",
        }
    }
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Side length of every square moving region, wavelengths.
    #[serde(rename = "L")]
    Side,
    /// Rician K-factor of every user.
    #[serde(rename = "K")]
    RicianK,
    /// Number of antennas.
    #[serde(rename = "N")]
    Antennas,
    /// Outage target.
    #[serde(rename = "delta")]
    Delta,
    /// Transmit power of the first user, dBm.
    #[serde(rename = "p1_dbm")]
    FirstUserPower,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Side => "L",
            SweepAxis::RicianK => "K",
            SweepAxis::Antennas => "N",
            SweepAxis::Delta => "delta",
            SweepAxis::FirstUserPower => "p1_dbm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

fn default_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_realizations() -> usize {
    100
}

fn default_trials() -> u64 {
    100_000
}

/// A full experiment description. Reading the `spec` field of a manifest
/// back gives the exact spec that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub scenario: ConfigFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub pga: PgaConfig,
    #[serde(default = "default_realizations")]
    pub rap_realizations: usize,
    #[serde(default = "default_realizations")]
    pub rula_angles: usize,
}

impl ExperimentSpec {
    pub fn for_scenario(scenario: ConfigFile) -> Self {
        ExperimentSpec {
            scenario,
            sweep: None,
            schemes: default_schemes(),
            seeds: default_seeds(),
            trials: default_trials(),
            pga: PgaConfig::default(),
            rap_realizations: default_realizations(),
            rula_angles: default_realizations(),
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.schemes.is_empty() {
            return bad("no schemes selected");
        }
        if self.seeds.is_empty() {
            return bad("no seeds given");
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return bad("sweep grid is empty");
            }
            if s.values.windows(2).any(|w| !(w[0] < w[1])) {
                return bad("sweep grid must be strictly increasing");
            }
        }
        self.pga.check()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(&fs::read_to_string(path)?)?;
        spec.check()?;
        Ok(spec)
    }
}

/// `cfg` with one sweep coordinate replaced.
pub fn apply_sweep(cfg: &SystemConfig, axis: SweepAxis, value: f64) -> Result<SystemConfig> {
    let mut c = cfg.clone();
    let side = |c: &SystemConfig| c.regions.first().map_or(1.0, |r| r.x_max - r.x_min);
    match axis {
        SweepAxis::Side => c.regions = square_regions(c.num_antennas, value, 0.5),
        SweepAxis::RicianK => c.rician_k = vec![value; c.num_users],
        SweepAxis::Antennas => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::InvalidConfig(format!("antenna count {value} is not a positive integer")));
            }
            let s = side(&c);
            c = c.with_antennas(value as usize, s);
        }
        SweepAxis::Delta => c.outage_target = value,
        SweepAxis::FirstUserPower => c.tx_power[0] = dbm_to_mw(value),
    }
    c.validate()
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// One scheme evaluated at one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub layout: AntennaLayout,
    pub sum_rate: f64,
    pub per_user: Vec<f64>,
    pub iterations: usize,
    pub detail: String,
}

/// Runs `scheme` at `cfg`. The MA scheme runs the multi-start ascent.
pub fn evaluate_scheme(
    cfg: &SystemConfig,
    scheme: Scheme,
    seed: u64,
    pga: &PgaConfig,
    spec: &ExperimentSpec,
) -> Result<SchemeResult> {
    let obj = Objective::new(cfg);
    let bench = |b: BenchmarkScheme| -> Result<SchemeResult> {
        let o = benchmarks::run(&obj, b, seed)?;
        Ok(SchemeResult {
            scheme,
            layout: o.layout,
            sum_rate: o.sum_rate,
            per_user: o.per_user,
            iterations: 0,
            detail: o.detail,
        })
    };
    match scheme {
        Scheme::Ma => {
            let r = multi_start(&obj, pga, seed, &[])?;
            let eval = obj.evaluate(&r.best.layout)?;
            Ok(SchemeResult {
                scheme,
                layout: r.best.layout.clone(),
                sum_rate: eval.sum,
                per_user: eval.per_user,
                iterations: r.best.iterations,
                detail: format!("start {}", r.best.start_index),
            })
        }
        Scheme::Fpa => bench(BenchmarkScheme::Fpa),
        Scheme::Rap => bench(BenchmarkScheme::Rap {
            realizations: spec.rap_realizations,
        }),
        Scheme::As => bench(BenchmarkScheme::As),
        Scheme::Rula => bench(BenchmarkScheme::Rula {
            angles: spec.rula_angles,
        }),
    }
}

/// One sweep row; `outcome` is the error text on failure.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub scheme: Scheme,
    pub sweep_value: f64,
    pub seed: u64,
    pub outcome: std::result::Result<SchemeResult, (ErrorCategory, String)>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub axis: Option<SweepAxis>,
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentResult {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    /// Sum rate of `scheme` at sweep value `v` for `seed`, if it succeeded.
    pub fn sum_rate(&self, scheme: Scheme, v: f64, seed: u64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && r.sweep_value == v && r.seed == seed)
            .and_then(|r| r.outcome.as_ref().ok().map(|o| o.sum_rate))
    }
}

/// Evaluates every (sweep value, scheme, seed) combination. Rows come out
/// sorted by sweep value, then scheme, then seed; failures become rows.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.check()?;
    let base = spec.scenario.clone().into_config()?;
    let (axis, values) = match &spec.sweep {
        Some(s) => (Some(s.axis), s.values.clone()),
        None => (None, vec![0.0]),
    };
    let mut schemes = spec.schemes.clone();
    schemes.sort();
    schemes.dedup();
    let mut tasks = Vec::new();
    for &v in &values {
        for &s in &schemes {
            for &seed in &spec.seeds {
                tasks.push((v, s, seed));
            }
        }
    }
    let rows = tasks
        .par_iter()
        .map(|&(v, scheme, seed)| {
            let start = Instant::now();
            let outcome = match axis {
                Some(a) => apply_sweep(&base, a, v),
                None => Ok(base.clone()),
            }
            .and_then(|cfg| evaluate_scheme(&cfg, scheme, seed, &spec.pga, spec))
            .map_err(|e| (e.category(), e.to_string()));
            ExperimentRow {
                scheme,
                sweep_value: v,
                seed,
                outcome,
                wall_time_s: start.elapsed().as_secs_f64(),
            }
        })
        .collect();
    Ok(ExperimentResult { axis, rows })
}

fn sweep_table(result: &ExperimentResult, users: usize) -> (Vec<String>, Vec<Vec<String>>) {
    let mut h = header(&["scheme", "axis", "sweep_value", "seed", "status", "sum_rate"]);
    h.extend(user_columns("rate_user_", users));
    h.extend(header(&["iterations", "detail"]));
    let axis = result.axis.map_or("none", |a| a.name());
    let rows = result
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![
                r.scheme.name().to_string(),
                axis.to_string(),
                fmt_f64(r.sweep_value),
                r.seed.to_string(),
            ];
            match &r.outcome {
                Ok(o) => {
                    row.push("ok".into());
                    row.push(fmt_f64(o.sum_rate));
                    row.extend(o.per_user.iter().map(|&v| fmt_f64(v)));
                    row.extend((o.per_user.len()..users).map(|_| String::new()));
                    row.push(o.iterations.to_string());
                    row.push(o.detail.clone());
                }
                Err((cat, msg)) => {
                    row.push(cat.as_str().into());
                    row.push(String::new());
                    row.extend((0..users).map(|_| String::new()));
                    row.push(String::new());
                    row.push(msg.clone());
                }
            }
            row
        })
        .collect();
    (h, rows)
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Result of a command: files written and the exit status to report.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutcome {
    pub dir: PathBuf,
    pub files: Vec<String>,
    pub exit_code: i32,
    pub summary: String,
}

fn finish(
    dir: &Path,
    command: &str,
    spec: ExperimentSpec,
    trials: Option<u64>,
    tables: Vec<(&str, Vec<String>, Vec<Vec<String>>)>,
    caveats: Vec<String>,
    started: Instant,
) -> Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for (name, h, rows) in &tables {
        write_csv(dir, name, h, rows)?;
        files.push(name.to_string());
    }
    files.push("manifest.json".into());
    let manifest = Manifest {
        command: command.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: config_hash(&spec.scenario),
        seeds: spec.seeds.clone(),
        trials,
        notes: spec.scenario.notes.clone(),
        spec,
        caveats,
        wall_time_s: started.elapsed().as_secs_f64(),
        files: files.clone(),
    };
    write_manifest(dir, &manifest)?;
    Ok(files)
}

/// Multi-start optimization at the config, with an FPA reference row.
///
/// Writes `layout.csv`, `traces.csv`, `summary.csv` and `manifest.json`.
/// Nothing is written unless the whole run succeeds.
pub fn cmd_optimize(opts: &RunOptions) -> Result<CommandOutcome> {
    let started = Instant::now();
    let (cfg, file) = load_config(&opts.config)?;
    let mut spec = ExperimentSpec::for_scenario(file);
    spec.pga = opts.pga(spec.pga);
    spec.seeds = vec![opts.seed];
    spec.schemes = vec![Scheme::Ma, Scheme::Fpa];
    let obj = Objective::new(&cfg);
    let ms = multi_start(&obj, &spec.pga, opts.seed, &[])?;
    let eval = obj.evaluate(&ms.best.layout)?;
    let fpa = obj.evaluate(&benchmarks::fpa_layout(cfg.num_antennas))?;

    let layout_rows = ms
        .best
        .layout
        .positions()
        .iter()
        .enumerate()
        .map(|(n, p)| vec![n.to_string(), fmt_f64(p[0]), fmt_f64(p[1])])
        .collect();
    let mut trace_rows = Vec::new();
    for t in &ms.traces {
        for (k, v) in t.objective.iter().enumerate() {
            trace_rows.push(vec![t.start_index.to_string(), k.to_string(), fmt_f64(*v)]);
        }
    }
    let mut sh = header(&["scheme", "sum_rate"]);
    sh.extend(user_columns("rate_user_", cfg.num_users));
    sh.extend(header(&["iterations", "converged", "clamped_users"]));
    let mut ma_row = vec!["MA".to_string(), fmt_f64(eval.sum)];
    ma_row.extend(eval.per_user.iter().map(|&v| fmt_f64(v)));
    ma_row.extend([
        ms.best.iterations.to_string(),
        ms.best.converged.to_string(),
        eval.clamped.to_string(),
    ]);
    let mut fpa_row = vec!["FPA".to_string(), fmt_f64(fpa.sum)];
    fpa_row.extend(fpa.per_user.iter().map(|&v| fmt_f64(v)));
    fpa_row.extend(["0".to_string(), "true".to_string(), fpa.clamped.to_string()]);

    let mut caveats: Vec<String> = ms
        .failures
        .iter()
        .map(|(i, e)| format!("start {i} failed: {e}"))
        .collect();
    caveats.extend(
        ms.traces
            .iter()
            .filter(|t| !t.converged)
            .map(|t| format!("start {} hit the iteration cap", t.start_index)),
    );
    let files = finish(
        &opts.out,
        "optimize",
        spec,
        None,
        vec![
            ("layout.csv", header(&["antenna", "x", "y"]), layout_rows),
            ("traces.csv", header(&["start", "iteration", "objective"]), trace_rows),
            ("summary.csv", sh, vec![ma_row, fpa_row]),
        ],
        caveats,
        started,
    )?;
    Ok(CommandOutcome {
        dir: opts.out.clone(),
        files,
        exit_code: EXIT_OK,
        summary: format!("MA sum rate {:.6} bit/s/Hz (FPA {:.6})", eval.sum, fpa.sum),
    })
}

/// Number of points in each validation CDF grid.
pub const CDF_GRID_POINTS: usize = 200;

/// First-user powers (dBm) of the validation rate sweep.
pub fn validation_powers() -> Vec<f64> {
    (0..=10).map(|i| 2.0 * i as f64).collect()
}

/// Per-user CDF comparison at one layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfComparison {
    pub user: usize,
    pub ks_second_order: f64,
    pub ks_first_order: f64,
    /// `(v, empirical, second-order, first-order)`.
    pub grid: Vec<[f64; 4]>,
}

/// Empirical SINR CDF of every user against both Gamma fits.
pub fn compare_cdfs(layout: &AntennaLayout, cfg: &SystemConfig, trials: u64, seed: u64) -> Result<Vec<CdfComparison>> {
    let ms = moment_sets(&LayoutState::new(layout, cfg)?.functionals, cfg)?;
    (0..cfg.num_users)
        .map(|m| {
            let dist = sample_sinr(layout, cfg, m, trials, seed)?;
            let second = ms[m].gamma_fit()?;
            let first = ms[m].gamma_fit_first_order()?;
            let top = empirical_quantile(&dist, 0.99);
            let grid = (0..CDF_GRID_POINTS)
                .map(|i| {
                    let v = top * i as f64 / (CDF_GRID_POINTS - 1) as f64;
                    [v, empirical_cdf(&dist, v), second.cdf(v), first.cdf(v)]
                })
                .collect();
            Ok(CdfComparison {
                user: m,
                ks_second_order: cdf_distance(&dist, &second),
                ks_first_order: cdf_distance(&dist, &first),
                grid,
            })
        })
        .collect()
}

/// Rates of every user at one first-user power.
#[derive(Debug, Clone, PartialEq)]
pub struct RateComparison {
    pub p1_dbm: f64,
    pub empirical: Vec<f64>,
    pub approx: Vec<f64>,
    pub exact_inverse: Vec<f64>,
}

/// Empirical outage rate vs the closed form while sweeping the first
/// user's power.
pub fn compare_rates(
    layout: &AntennaLayout,
    cfg: &SystemConfig,
    powers_dbm: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<RateComparison>> {
    powers_dbm
        .iter()
        .map(|&p| {
            let c = apply_sweep(cfg, SweepAxis::FirstUserPower, p)?;
            let empirical = (0..c.num_users)
                .map(|m| Ok(empirical_outage_rate(&sample_sinr(layout, &c, m, trials, seed)?, c.outage_target)))
                .collect::<Result<Vec<_>>>()?;
            Ok(RateComparison {
                p1_dbm: p,
                empirical,
                approx: Objective::new(&c).evaluate(layout)?.per_user,
                exact_inverse: exact_rates(layout, &c)?,
            })
        })
        .collect()
}

/// Monte Carlo validation at the region centres of the config.
///
/// Writes `cdf.csv`, `cdf_distance.csv`, `rate.csv` and `manifest.json`.
pub fn cmd_validate(opts: &RunOptions) -> Result<CommandOutcome> {
    let started = Instant::now();
    let (cfg, file) = load_config(&opts.config)?;
    let trials = opts.trials.unwrap_or(default_trials());
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be positive".into()));
    }
    let layout = AntennaLayout::centers(&cfg.regions);
    let cdfs = compare_cdfs(&layout, &cfg, trials, opts.seed)?;
    let rates = compare_rates(&layout, &cfg, &validation_powers(), trials, opts.seed)?;

    let mut cdf_rows = Vec::new();
    let mut ks_rows = Vec::new();
    for c in &cdfs {
        for g in &c.grid {
            let mut r = vec![(c.user + 1).to_string()];
            r.extend(g.iter().map(|&v| fmt_f64(v)));
            cdf_rows.push(r);
        }
        ks_rows.push(vec![
            (c.user + 1).to_string(),
            fmt_f64(c.ks_second_order),
            fmt_f64(c.ks_first_order),
        ]);
    }
    let mut rate_rows = Vec::new();
    for r in &rates {
        for m in 0..cfg.num_users {
            rate_rows.push(vec![
                fmt_f64(r.p1_dbm),
                (m + 1).to_string(),
                fmt_f64(r.empirical[m]),
                fmt_f64(r.approx[m]),
                fmt_f64(r.exact_inverse[m]),
            ]);
        }
        let s = |v: &[f64]| fmt_f64(v.iter().sum());
        rate_rows.push(vec![
            fmt_f64(r.p1_dbm),
            "sum".into(),
            s(&r.empirical),
            s(&r.approx),
            s(&r.exact_inverse),
        ]);
    }
    let mut caveats = vec![
        "layout: region centres of the config".to_string(),
        "rate sweep varies the first user's power; the others keep their configured power".to_string(),
    ];
    if trials < LOW_TRIAL_COUNT {
        caveats.push(format!("only {trials} Monte Carlo trials; empirical curves are noisy"));
    }
    let worst = cdfs.iter().map(|c| c.ks_second_order).fold(0.0, f64::max);
    let mut spec = ExperimentSpec::for_scenario(file);
    spec.seeds = vec![opts.seed];
    spec.trials = trials;
    let files = finish(
        &opts.out,
        "validate",
        spec,
        Some(trials),
        vec![
            (
                "cdf.csv",
                header(&["user", "sinr", "empirical", "second_order", "first_order"]),
                cdf_rows,
            ),
            (
                "cdf_distance.csv",
                header(&["user", "ks_second_order", "ks_first_order"]),
                ks_rows,
            ),
            (
                "rate.csv",
                header(&["p1_dbm", "user", "empirical", "approx", "exact_inverse"]),
                rate_rows,
            ),
        ],
        caveats,
        started,
    )?;
    Ok(CommandOutcome {
        dir: opts.out.clone(),
        files,
        exit_code: EXIT_OK,
        summary: format!("largest second-order KS distance {worst:.4}"),
    })
}

/// Runs an experiment spec (the `--config` file). `--seed` replaces the
/// spec's seeds, `--starts` its start count.
///
/// Writes `sweep.csv` and `manifest.json`; exits with
/// [`EXIT_PARTIAL`] when some rows failed.
pub fn cmd_sweep(opts: &RunOptions, override_seed: bool) -> Result<CommandOutcome> {
    let started = Instant::now();
    let mut spec = ExperimentSpec::load(&opts.config)?;
    if override_seed {
        spec.seeds = vec![opts.seed];
    }
    if let Some(t) = opts.trials {
        spec.trials = t;
    }
    spec.pga = opts.pga(spec.pga.clone());
    let users = spec.scenario.num_users;
    let result = run_sweep(&spec)?;
    let (h, rows) = sweep_table(&result, users);
    let failures = result.failures();
    let mut caveats = Vec::new();
    if failures > 0 {
        caveats.push(format!("{failures} of {} rows failed", result.rows.len()));
    }
    let files = finish(&opts.out, "sweep", spec, None, vec![("sweep.csv", h, rows)], caveats, started)?;
    Ok(CommandOutcome {
        dir: opts.out.clone(),
        files,
        exit_code: if failures > 0 { EXIT_PARTIAL } else { EXIT_OK },
        summary: format!("{} rows, {failures} failed", result.rows.len()),
    })
}

/// Every scheme at the config: the sweep machinery at a single point.
///
/// Writes `benchmark.csv` and `manifest.json`.
pub fn cmd_benchmark(opts: &RunOptions) -> Result<CommandOutcome> {
    let started = Instant::now();
    let (_, file) = load_config(&opts.config)?;
    let mut spec = ExperimentSpec::for_scenario(file);
    spec.seeds = vec![opts.seed];
    spec.pga = opts.pga(spec.pga);
    let result = run_sweep(&spec)?;
    let (h, rows) = sweep_table(&result, spec.scenario.num_users);
    let failures = result.failures();
    let summary = result
        .rows
        .iter()
        .map(|r| match &r.outcome {
            Ok(o) => format!("{} {:.4}", r.scheme.name(), o.sum_rate),
            Err(_) => format!("{} failed", r.scheme.name()),
        })
        .collect::<Vec<_>>()
        .join(", ");
    let files = finish(&opts.out, "benchmark", spec, None, vec![("benchmark.csv", h, rows)], vec![], started)?;
    Ok(CommandOutcome {
        dir: opts.out.clone(),
        files,
        exit_code: if failures > 0 { EXIT_PARTIAL } else { EXIT_OK },
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::reference_scenario;

    fn spec() -> ExperimentSpec {
        let mut s = ExperimentSpec::for_scenario(ConfigFile::from_config(&reference_scenario(5, 1.0, 15.0, 0.2)));
        s.pga.max_iters = 100;
        s.pga.num_starts = 2;
        s.rap_realizations = 10;
        s.rula_angles = 10;
        s
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-9, -2.5e300, 12345.678901234567] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn sweep_application() {
        let base = reference_scenario(5, 1.0, 15.0, 0.2);
        let c = apply_sweep(&base, SweepAxis::Side, 2.0).unwrap();
        assert_eq!(c.regions[1].x_min, 2.5);
        let c = apply_sweep(&base, SweepAxis::Antennas, 6.0).unwrap();
        assert_eq!(c.regions.len(), 6);
        assert_eq!(c.regions[0].x_max, 1.0);
        assert!(apply_sweep(&base, SweepAxis::Antennas, 3.0).is_err());
        let c = apply_sweep(&base, SweepAxis::FirstUserPower, 20.0).unwrap();
        assert!((c.tx_power[0] - 100.0).abs() < 1e-9);
        assert_eq!(c.tx_power[1], base.tx_power[1]);
        assert!(apply_sweep(&base, SweepAxis::Delta, 1.5).is_err());
    }

    #[test]
    fn spec_round_trip_and_checks() {
        let s = spec();
        let back: ExperimentSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let mut bad = s.clone();
        bad.schemes.clear();
        assert!(bad.check().is_err());
        let mut bad = s;
        bad.sweep = Some(Sweep {
            axis: SweepAxis::Side,
            values: vec![1.0, 0.5],
        });
        assert!(bad.check().is_err());
    }

    #[test]
    fn sweep_rows_are_complete_and_ordered() {
        let mut s = spec();
        s.sweep = Some(Sweep {
            axis: SweepAxis::Antennas,
            values: vec![3.0, 5.0],
        });
        s.schemes = vec![Scheme::Fpa, Scheme::Rap];
        s.seeds = vec![1, 2];
        let r = run_sweep(&s).unwrap();
        assert_eq!(r.rows.len(), 2 * 2 * 2);
        // N = 3 < M = 4 fails as a row, not as the sweep
        assert_eq!(r.failures(), 4);
        assert!(r.rows[..4].iter().all(|row| row.outcome.is_err()));
        let keys: Vec<_> = r.rows.iter().map(|x| (x.sweep_value.to_bits(), x.scheme, x.seed)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn hash_is_stable() {
        let a = config_hash(&spec().scenario);
        assert_eq!(a, config_hash(&spec().scenario));
        assert_eq!(a.len(), 64);
    }
}
