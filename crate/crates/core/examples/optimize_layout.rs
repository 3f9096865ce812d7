//! Multi-start projected gradient ascent from four fixed starts.

use ma_outage::{multi_start, reference_scenario, AntennaLayout, Objective, PgaConfig};

/// Starting layouts (x row, y row), in wavelengths.
const STARTS: [([f64; 5], [f64; 5]); 4] = [
    ([0.4, 2.3, 4.7, 5.5, 7.4], [0.4, 0.3, 0.6, 0.8, 0.8]),
    ([0.8, 2.5, 4.2, 5.8, 7.1], [0.4, 0.3, 0.6, 0.5, 0.5]),
    ([0.7, 2.1, 3.8, 5.5, 7.15], [0.6, 0.3, 0.4, 0.5, 0.9]),
    ([0.5, 2.5, 4.5, 5.22, 7.13], [0.47, 0.33, 0.69, 0.88, 0.82]),
];

pub fn run_example() -> ma_outage::Result<()> {
    let cfg = reference_scenario(5, 1.0, 15.0, 0.2);
    let obj = Objective::new(&cfg);
    let starts: Vec<AntennaLayout> = STARTS.iter().map(|(x, y)| AntennaLayout::from_rows(x, y)).collect();
    let pga = PgaConfig {
        num_starts: 0,
        ..PgaConfig::default()
    };

    let result = multi_start(&obj, &pga, 0, &starts)?;
    for t in &result.traces {
        println!(
            "start {}: {:.4} -> {:.4} bit/s/Hz in {} iterations",
            t.start_index + 1,
            t.objective[0],
            t.final_objective,
            t.iterations
        );
    }
    println!("best: start {} at {:.4} bit/s/Hz", result.best.start_index + 1, result.best.final_objective);
    for (n, p) in result.best.layout.positions().iter().enumerate() {
        println!("  antenna {}: ({:.4}, {:.4})", n + 1, p[0], p[1]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ma_outage::Result<()> {
    run_example()
}
