//! The `ma-outage` binary: exit codes, output files, determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ma_outage::config::{ConfigFile, VALIDATION_POSITIONS};
use ma_outage::experiment::{ExperimentSpec, Manifest, Scheme, Sweep, SweepAxis};
use ma_outage::oracle::{empirical_quantile, sample_sinr};
use ma_outage::{reference_scenario, validation_scenario, AntennaLayout};
use tempfile::TempDir;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ma-outage"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn manifest(dir: &Path) -> Manifest {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn small_spec(dir: &Path) -> (PathBuf, ExperimentSpec) {
    let mut spec = ExperimentSpec::for_scenario(ConfigFile::from_config(&reference_scenario(5, 1.0, 15.0, 0.2)));
    spec.sweep = Some(Sweep {
        axis: SweepAxis::Side,
        values: vec![0.5, 1.0],
    });
    spec.pga.num_starts = 2;
    spec.pga.max_iters = 300;
    spec.rap_realizations = 20;
    spec.rula_angles = 20;
    let path = dir.join("spec.json");
    fs::write(&path, serde_json::to_string_pretty(&spec).unwrap()).unwrap();
    (path, spec)
}

/// Two sweeps with the same spec and seed, compared byte for byte.
pub fn sweep_twice_is_byte_identical() -> bool {
    let tmp = TempDir::new().unwrap();
    let (spec, _) = small_spec(tmp.path());
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let ra = run_in("sweep", &spec, &a, &["--seed", "17"]);
    let rb = run_in("sweep", &spec, &b, &["--seed", "17"]);
    ra.status.success()
        && rb.status.success()
        && fs::read(a.join("sweep.csv")).unwrap() == fs::read(b.join("sweep.csv")).unwrap()
}

#[test]
fn optimize_reference_config() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    let r = run_in("optimize", &configs().join("reference.json"), &out, &["--seed", "1", "--starts", "3"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    for f in ["layout.csv", "traces.csv", "summary.csv", "manifest.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let summary = read_csv(&out.join("summary.csv"));
    assert_eq!(summary[0][0], "MA");
    assert_eq!(summary[1][0], "FPA");
    let ma: f64 = summary[0][1].parse().unwrap();
    let fpa: f64 = summary[1][1].parse().unwrap();
    assert!(ma > fpa);
    let layout = read_csv(&out.join("layout.csv"));
    assert_eq!(layout.len(), 5);
    let m = manifest(&out);
    assert_eq!(m.command, "optimize");
    assert_eq!(m.seeds, vec![1]);
    assert_eq!(m.spec.pga.num_starts, 3);
}

#[test]
fn repeated_seed_gives_identical_bytes() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs().join("reference.json");
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let r = run_in("optimize", &cfg, dir, &["--seed", "5", "--starts", "2"]);
        assert!(r.status.success());
    }
    for f in ["layout.csv", "traces.csv", "summary.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn malformed_config_fails_without_output() {
    let tmp = TempDir::new().unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, "{ \"num_antennas\": 5, ").unwrap();
    let out = tmp.path().join("out");
    let r = run_in("optimize", &bad, &out, &[]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("error[config]"));
    assert!(!out.exists());

    let r = run_in("validate", &tmp.path().join("missing.json"), &out, &[]);
    assert_eq!(r.status.code(), Some(1));
    assert!(!out.exists());

    // fewer antennas than users
    let mut text: serde_json::Value = serde_json::from_str(&fs::read_to_string(configs().join("reference.json")).unwrap()).unwrap();
    text["num_antennas"] = 3.into();
    fs::write(&bad, text.to_string()).unwrap();
    let r = run_in("benchmark", &bad, &out, &[]);
    assert_eq!(r.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn singular_channel_is_a_numerical_error() {
    let tmp = TempDir::new().unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(configs().join("reference.json")).unwrap()).unwrap();
    v["elevation_aod"] = serde_json::json!([0.5, 0.5, 1.0, 1.2]);
    v["azimuth_aod"] = serde_json::json!([0.3, 0.3, 0.7, 0.9]);
    let cfg = tmp.path().join("dup.json");
    fs::write(&cfg, v.to_string()).unwrap();
    let out = tmp.path().join("out");
    let r = run_in("optimize", &cfg, &out, &["--starts", "1"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("error[numerical]"));
    assert!(!out.exists());
}

#[test]
fn validate_with_few_trials_still_writes_csv() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("v");
    let r = run_in("validate", &configs().join("validation.json"), &out, &["--trials", "10", "--seed", "4"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let cdf = read_csv(&out.join("cdf.csv"));
    assert_eq!(cdf.len(), 4 * 200);
    assert!(cdf.iter().all(|row| row.len() == 5));
    assert_eq!(read_csv(&out.join("cdf_distance.csv")).len(), 4);
    assert_eq!(read_csv(&out.join("rate.csv")).len(), 11 * 5);
    let m = manifest(&out);
    assert_eq!(m.trials, Some(10));
    assert!(m.caveats.iter().any(|c| c.contains("10 Monte Carlo trials")));
    assert!(!m.notes.is_empty());
}

#[test]
fn validate_grid_spans_to_the_99th_percentile() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("v");
    let r = run_in("validate", &configs().join("validation.json"), &out, &["--trials", "3000", "--seed", "8"]);
    assert!(r.status.success());
    let cdf = read_csv(&out.join("cdf.csv"));
    let user1: Vec<f64> = cdf.iter().filter(|r| r[0] == "1").map(|r| r[1].parse().unwrap()).collect();
    let dist = sample_sinr(&AntennaLayout::new(VALIDATION_POSITIONS.to_vec()), &validation_scenario(15.0), 0, 3000, 8).unwrap();
    assert_eq!(user1[0], 0.0);
    assert_eq!(*user1.last().unwrap(), empirical_quantile(&dist, 0.99));
    let ks = read_csv(&out.join("cdf_distance.csv"));
    for row in ks {
        let second: f64 = row[1].parse().unwrap();
        let first: f64 = row[2].parse().unwrap();
        assert!(second < first);
    }
}

#[test]
fn sweep_rows_and_manifest() {
    let tmp = TempDir::new().unwrap();
    let (spec_path, mut spec) = small_spec(tmp.path());
    let out = tmp.path().join("s");
    let r = run_in("sweep", &spec_path, &out, &["--seed", "3"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let rows = read_csv(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 2 * Scheme::ALL.len());
    assert!(rows.iter().all(|r| r[4] == "ok"));
    // manifest reconstructs the spec that ran
    spec.seeds = vec![3];
    assert_eq!(manifest(&out).spec, spec);
}

#[test]
fn failed_sweep_points_give_partial_exit() {
    let tmp = TempDir::new().unwrap();
    let (_, mut spec) = small_spec(tmp.path());
    spec.sweep = Some(Sweep {
        axis: SweepAxis::Antennas,
        values: vec![3.0, 5.0],
    });
    spec.schemes = vec![Scheme::Fpa, Scheme::As];
    let path = tmp.path().join("n.json");
    fs::write(&path, serde_json::to_string(&spec).unwrap()).unwrap();
    let out = tmp.path().join("s");
    let r = run_in("sweep", &path, &out, &[]);
    assert_eq!(r.status.code(), Some(3));
    let rows = read_csv(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.iter().filter(|r| r[4] == "config").count(), 2);
    assert_eq!(rows.iter().filter(|r| r[4] == "ok").count(), 2);
}

#[test]
fn benchmark_command() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("b");
    let r = run_in("benchmark", &configs().join("reference.json"), &out, &["--starts", "2", "--seed", "2"]);
    assert!(r.status.success());
    let rows = read_csv(&out.join("benchmark.csv"));
    let names: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["MA", "FPA", "RAP", "AS", "RULA"]);
    let rate = |i: usize| rows[i][5].parse::<f64>().unwrap();
    assert!(rate(0) > rate(1));
    assert!(rate(4) >= rate(1));
}

#[test]
fn shipped_sweep_specs_parse() {
    for f in ["sweep_side.json", "sweep_delta.json"] {
        let spec = ExperimentSpec::load(&configs().join(f)).unwrap();
        assert!(spec.sweep.is_some());
        spec.scenario.into_config().unwrap();
    }
}
