//! Analytic position gradient against central differences.

use ma_outage::gradient::{check_gradient, FD_STEP};
use ma_outage::{reference_scenario, AntennaLayout, Objective};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> ma_outage::Result<()> {
    let cfg = reference_scenario(5, 1.0, 15.0, 0.2);
    let obj = Objective::new(&cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    for trial in 0..5 {
        let layout = AntennaLayout::random(&cfg.regions, &mut rng);
        let check = check_gradient(&obj, &layout, FD_STEP)?;
        println!(
            "layout {trial}: max |grad| = {:.4}, worst relative error = {:.2e}, {}",
            check.analytic.max_abs(),
            check.max_relative_error,
            if check.passed { "ok" } else { "MISMATCH" }
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ma_outage::Result<()> {
    run_example()
}
