//! Optimized layout against the fixed, random, selection and rotating
//! arrays.

use ma_outage::benchmarks::{run, BenchmarkScheme};
use ma_outage::{multi_start, reference_scenario, Objective, PgaConfig};

pub fn run_example() -> ma_outage::Result<()> {
    let cfg = reference_scenario(5, 1.0, 15.0, 0.2);
    let obj = Objective::new(&cfg);
    let seed = 3;

    let ma = multi_start(&obj, &PgaConfig::default(), seed, &[])?;
    println!("MA    {:.4}", ma.best.final_objective);
    for scheme in BenchmarkScheme::defaults() {
        let out = run(&obj, scheme, seed)?;
        println!("{:<5} {:.4}  {}", scheme.name(), out.sum_rate, out.detail);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ma_outage::Result<()> {
    run_example()
}
