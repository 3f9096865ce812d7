//! Monte Carlo check of the Gamma approximation and the closed-form rate.

use ma_outage::config::{validation_scenario, VALIDATION_POSITIONS};
use ma_outage::experiment::{compare_cdfs, compare_rates};
use ma_outage::AntennaLayout;

pub fn run_example() -> ma_outage::Result<()> {
    let cfg = validation_scenario(15.0);
    let layout = AntennaLayout::new(VALIDATION_POSITIONS.to_vec());
    let trials = 20_000;

    for c in compare_cdfs(&layout, &cfg, trials, 1)? {
        println!(
            "user {}: KS distance second-order {:.4}, first-order {:.4}",
            c.user + 1,
            c.ks_second_order,
            c.ks_first_order
        );
    }
    println!("P1 [dBm]  empirical  closed-form  (user 1)");
    for r in compare_rates(&layout, &cfg, &[0.0, 10.0, 20.0], trials, 1)? {
        println!("{:>8}  {:>9.4}  {:>11.4}", r.p1_dbm, r.empirical[0], r.approx[0]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ma_outage::Result<()> {
    run_example()
}
