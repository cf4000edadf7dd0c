use fbmvar::config::{ExperimentConfig, ExperimentId};
use fbmvar::core::hermite::gaussian_moment;
use fbmvar::core::stats::Summary;
use fbmvar::core::variations::{exact_unweighted_power_second_moment, exact_unweighted_second_moment};
use fbmvar::core::{weighted_hermite_variation, weighted_power_variation, WeightFunction};
use fbmvar::dft::circulant_sampler;
use fbmvar::experiments::run;
use fbmvar::parallel::{map_paths, with_threads};
use proptest::prelude::*;

fn json(cfg: &ExperimentConfig, threads: usize) -> String {
    with_threads(Some(threads), || run(cfg).unwrap().to_json(None).unwrap()).unwrap()
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let configs = [
        ExperimentConfig::new(ExperimentId::Clt).with_levels(vec![6, 8]).with_replicates(201),
        ExperimentConfig::new(ExperimentId::Noncentral)
            .with_levels(vec![3, 4])
            .with_offset(3)
            .with_replicates(100),
        ExperimentConfig::new(ExperimentId::Sampler).with_levels(vec![3]).with_replicates(1000),
        ExperimentConfig::new(ExperimentId::Trapezoid).with_levels(vec![4, 5, 6]).with_replicates(150),
    ];
    for cfg in &configs {
        let a = json(cfg, 1);
        assert_eq!(a, json(cfg, 1), "{}", cfg.id);
        assert_eq!(a, json(cfg, 3), "{}", cfg.id);
    }
}

#[test]
fn monte_carlo_second_moment_matches_exact_value() {
    let (h, q, n) = (0.3, 2, 8);
    let sampler = circulant_sampler(h, n).unwrap();
    let sq = map_paths(&sampler, 77, 4000, |p| {
        let v = weighted_hermite_variation(p, &WeightFunction::One, q);
        v * v
    });
    let s = Summary::of(&sq);
    let exact = exact_unweighted_second_moment(h, q, n).unwrap();
    assert!(((s.mean - exact) / s.mean_se).abs() < 4.0, "{} vs {exact}", s.mean);
}

#[test]
fn brownian_odd_power_variance_is_the_gaussian_moment() {
    // At H = 1/2 the scaled increments are iid N(0,1), so for odd q the
    // variance of 2^{-n/2} Σ (2^{n/2} ΔB)^q is μ_{2q} at every level.
    for q in [1u32, 3, 5] {
        let exact = exact_unweighted_power_second_moment(0.5, q, 9).unwrap() / 512.0;
        assert!((exact - gaussian_moment(2 * q)).abs() <= 1e-12 * exact, "q={q}");
    }
    let sampler = circulant_sampler(0.5, 9).unwrap();
    let ys = map_paths(&sampler, 5, 6000, |p| {
        weighted_power_variation(p, &WeightFunction::One, 3, false) / 512f64.sqrt()
    });
    let s = Summary::of(&ys);
    assert!(((s.variance - 15.0) / s.variance_se).abs() < 4.0, "{}", s.variance);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn config_text_survives_a_round_trip(
        h in 0.01f64..0.99, q in 2u32..6, a in 1u32..10, len in 0u32..6, reps in 100usize..5000, seed in any::<u64>()
    ) {
        let text = format!("id = clt\nH = {h}\nq = {q}\nlevels = {a}..{}\nreplicates = {reps}\nseed = {seed}\n", a + len);
        let cfg = ExperimentConfig::parse(&text, None).unwrap();
        prop_assert_eq!(cfg.hurst, Some(h));
        prop_assert_eq!(cfg.levels.clone().unwrap(), (a..=a + len).collect::<Vec<_>>());
        prop_assert_eq!(cfg.seed, seed);
    }
}
