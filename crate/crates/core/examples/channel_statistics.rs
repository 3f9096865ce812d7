//! Zero-forcing functionals, SINR moments and the fitted Gamma law.

use ma_outage::config::{validation_scenario, VALIDATION_POSITIONS};
use ma_outage::statistics::moment_sets;
use ma_outage::{AntennaLayout, LayoutState};

pub fn run_example() -> ma_outage::Result<()> {
    let cfg = validation_scenario(15.0).validate()?;
    let layout = AntennaLayout::new(VALIDATION_POSITIONS.to_vec());
    let state = LayoutState::new(&layout, &cfg)?;
    let f = &state.functionals;

    for (m, ms) in moment_sets(f, &cfg)?.iter().enumerate() {
        let fit = ms.gamma_fit()?;
        println!(
            "user {}: f1 = {:.4}  f2 = {:.2}  E[Z] = {:.4}  V[Z] = {:.4}  Gamma(shape {:.3}, scale {:.4})",
            m + 1,
            f.f1[m],
            f.f2[m],
            ms.ez,
            ms.vz,
            fit.shape,
            fit.scale
        );
        // the first-order mean drops the correction terms
        println!("        first-order E[Z] = {:.4}", ms.ez_first_order());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ma_outage::Result<()> {
    run_example()
}
