//! Exact and linearized outage-aware rates across outage targets.

use ma_outage::rate::{
    default_shape_grid, fit_linearization, outage_rate_exact, outage_rate_linear, LINEARIZATION_TABLE,
};
use ma_outage::statistics::gamma_fit;
use ma_outage::InverseGammaLinearization;

pub fn run_example() -> ma_outage::Result<()> {
    // SINR with mean 12 and variance 20
    let fit = gamma_fit(12.0, 20.0)?;
    println!("delta   kappa    rho      exact    linear");
    for &(delta, _, _) in &LINEARIZATION_TABLE {
        let lin = InverseGammaLinearization::for_delta(delta);
        let (linear, _) = outage_rate_linear(&fit, &lin);
        println!(
            "{delta:.2}    {:.4}   {:+.4}  {:.4}   {:.4}",
            lin.kappa,
            lin.rho,
            outage_rate_exact(&fit, delta),
            linear
        );
    }

    // off-table targets fall back to a least-squares fit
    let lin = fit_linearization(0.05, &default_shape_grid());
    println!("fitted at delta = 0.05: kappa {:.4}, rho {:+.4}", lin.kappa, lin.rho);
    Ok(())
}

#[allow(dead_code)]
fn main() -> ma_outage::Result<()> {
    run_example()
}
