//! Sum rate of every scheme as the moving regions grow.

use ma_outage::config::ConfigFile;
use ma_outage::experiment::{run_sweep, ExperimentSpec, Scheme, Sweep, SweepAxis};
use ma_outage::reference_scenario;

pub fn run_example() -> ma_outage::Result<()> {
    let mut spec = ExperimentSpec::for_scenario(ConfigFile::from_config(&reference_scenario(5, 1.0, 15.0, 0.2)));
    spec.sweep = Some(Sweep {
        axis: SweepAxis::Side,
        values: vec![0.25, 0.5, 1.0, 1.5],
    });
    spec.schemes = vec![Scheme::Ma, Scheme::Fpa, Scheme::Rap];
    spec.pga.num_starts = 2;

    let result = run_sweep(&spec)?;
    for row in &result.rows {
        match &row.outcome {
            Ok(o) => println!("L = {:<5} {:<4} {:.4}", row.sweep_value, row.scheme.name(), o.sum_rate),
            Err((cat, msg)) => println!("L = {:<5} {:<4} {} error: {msg}", row.sweep_value, row.scheme.name(), cat.as_str()),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ma_outage::Result<()> {
    run_example()
}
