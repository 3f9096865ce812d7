//! Statistical and structural properties beyond the numbered criteria.

use ma_outage::config::{validation_scenario, ConfigFile, VALIDATION_POSITIONS};
use ma_outage::experiment::{run_sweep, ExperimentSpec, Scheme};
use ma_outage::optimizer::{multi_start, project};
use ma_outage::oracle::{empirical_cdf, empirical_quantile, sample_sinr, EmpiricalDistribution};
use ma_outage::special::{gamma_p, gamma_p_inv};
use ma_outage::statistics::moment_sets;
use ma_outage::{reference_scenario, AntennaLayout, LayoutState, Objective, PgaConfig, Region};
use proptest::prelude::*;

#[test]
fn second_order_mean_within_three_percent() {
    let cfg = validation_scenario(15.0);
    let t = AntennaLayout::new(VALIDATION_POSITIONS.to_vec());
    let ms = moment_sets(&LayoutState::new(&t, &cfg).unwrap().functionals, &cfg).unwrap();
    let errors: Vec<f64> = (0..cfg.num_users)
        .map(|m| {
            let d = sample_sinr(&t, &cfg, m, 200_000, 31).unwrap();
            (ms[m].ez / d.mean() - 1.0).abs()
        })
        .collect();
    println!("relative mean error per user: {errors:.4?}");
    assert!(errors.iter().all(|&e| e <= 0.03), "{errors:?}");
}

#[test]
fn optimized_rate_saturates_with_region_size() {
    let pga = PgaConfig::default();
    let best = |side: f64| {
        let obj = Objective::new(&reference_scenario(5, side, 15.0, 0.2));
        multi_start(&obj, &pga, 0, &[]).unwrap().best.final_objective
    };
    let (mid, large) = (best(1.6), best(2.25));
    println!("MA at 1.6: {mid:.4}, at 2.25: {large:.4}");
    assert!((large - mid).abs() <= 0.02 * large);
}

#[test]
fn single_point_sweep_matches_direct_optimization() {
    let cfg = reference_scenario(5, 1.0, 15.0, 0.2);
    let mut spec = ExperimentSpec::for_scenario(ConfigFile::from_config(&cfg));
    spec.schemes = vec![Scheme::Ma];
    spec.seeds = vec![4];
    spec.pga.num_starts = 2;
    spec.pga.max_iters = 400;
    let swept = run_sweep(&spec).unwrap().sum_rate(Scheme::Ma, 0.0, 4).unwrap();
    let obj = Objective::new(&cfg);
    let direct = multi_start(&obj, &spec.pga, 4, &[]).unwrap();
    assert_eq!(swept, obj.evaluate(&direct.best.layout).unwrap().sum);
}

#[test]
fn ties_go_to_the_first_start() {
    let obj = Objective::new(&reference_scenario(5, 1.0, 15.0, 0.2));
    let start = AntennaLayout::centers(&obj.cfg.regions);
    let pga = PgaConfig {
        num_starts: 0,
        max_iters: 50,
        ..PgaConfig::default()
    };
    let r = multi_start(&obj, &pga, 0, &[start.clone(), start.clone(), start]).unwrap();
    assert_eq!(r.traces.len(), 3);
    assert_eq!(r.best.start_index, 0);
}

fn regions() -> Vec<Region> {
    ma_outage::config::square_regions(5, 1.0, 0.6)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn projection_lands_inside_and_is_idempotent(
        coords in prop::collection::vec((-5.0f64..12.0, -5.0f64..5.0), 5)
    ) {
        let r = regions();
        let t = AntennaLayout::new(coords.iter().map(|&(x, y)| [x, y]).collect());
        let p = project(&t, &r);
        prop_assert!(p.is_feasible(&r));
        prop_assert_eq!(project(&p, &r), p);
    }

    #[test]
    fn gamma_inverse_round_trip(a in 0.5f64..40.0, p in 0.01f64..0.99) {
        let x = gamma_p_inv(a, p);
        prop_assert!((gamma_p(a, x) - p).abs() <= 1e-10);
    }

    #[test]
    fn quantile_then_cdf_returns_the_level(
        samples in prop::collection::vec(0.0f64..100.0, 2..300),
        delta in 0.0f64..1.0,
    ) {
        let d = EmpiricalDistribution::new(samples, 0);
        let q = empirical_quantile(&d, delta);
        let n = d.len() as f64;
        prop_assert!(empirical_cdf(&d, q) + 1.0 / n >= delta);
        prop_assert!(q >= d.samples()[0] && q <= *d.samples().last().unwrap());
    }

    #[test]
    fn objective_is_translation_invariant(dx in -3.0f64..3.0, dy in -3.0f64..3.0, seed in 0u64..1000) {
        let obj = Objective::new(&reference_scenario(5, 1.0, 15.0, 0.2));
        let t = ma_outage::optimizer::random_starts(&obj.cfg.regions, 1, seed).remove(0);
        let a = obj.value(&t).unwrap();
        let b = obj.value(&t.translated([dx, dy])).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}
