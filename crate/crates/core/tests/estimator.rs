mod common;

use polymer_core::family::gibbs_distribution;
use polymer_core::random::{random_model, RandomModelSpec};
use polymer_core::{
    approximate_partition_function, median_amplify, partition_function_exact, rng, sample_gibbs,
    CliqueCover, Error, EstimatorConfig, PolymerModel, PreparedEstimator, SamplerBackend,
};
use proptest::prelude::*;

fn model(seed: u64, n: usize, m: usize) -> (PolymerModel, CliqueCover) {
    let spec = RandomModelSpec {
        polymers: n,
        cliques: m,
        cross_density: 0.3,
        overlap: 0.2,
        log_weight: (-3.0, -0.7),
        size: (1, 1),
    };
    random_model(&spec, &mut rng::seeded(seed))
}

fn prefix_mask(cover: &CliqueCover, i: usize) -> u32 {
    cover.prefix_union(i).iter().fold(0, |acc, &p| acc | 1 << p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn telescoping_ratios(seed in any::<u64>(), n in 1usize..=10, m in 1usize..=5) {
        let (model, cover) = model(seed, n, m);
        let z_max = cover.z_max(&model);
        let mut product = 1.0;
        for i in 1..=cover.m() {
            let before = common::z_by_filter(&model, prefix_mask(&cover, i - 1));
            let after = common::z_by_filter(&model, prefix_mask(&cover, i));
            let r = before / after;
            prop_assert!(r <= 1.0 + 1e-12 && r >= 1.0 / z_max - 1e-12);
            product *= r;

            // probability that a Gibbs sample on U_i avoids the new polymers
            let union = cover.prefix_union(i);
            let old = prefix_mask(&cover, i - 1);
            let (fams, probs) = gibbs_distribution(&model, Some(&union), 20).unwrap();
            let avoid: f64 = fams
                .iter()
                .zip(&probs)
                .filter(|(f, _)| f.members().iter().all(|&p| old >> p & 1 == 1))
                .map(|(_, p)| p)
                .sum();
            prop_assert!((avoid - r).abs() <= 1e-12);
        }
        let log_z = partition_function_exact(&model, None).unwrap();
        prop_assert!((product.ln() + log_z).abs() <= 1e-10);
    }
}

#[test]
fn same_seed_same_result() {
    let (model, cover) = model(3, 6, 2);
    let f = vec![1.0; model.len()];
    for backend in [SamplerBackend::Simulate, SamplerBackend::ExactTransient] {
        let cfg = EstimatorConfig {
            backend,
            samples_override: Some(500),
            ..Default::default()
        };
        let a = approximate_partition_function(&model, &cover, &f, 0.5, 42, &cfg).unwrap();
        let b = approximate_partition_function(&model, &cover, &f, 0.5, 42, &cfg).unwrap();
        assert_eq!(a, b);
        for r in &a.ratios {
            assert!((0.0..=1.0).contains(&r.r_hat));
            assert_eq!(r.r_hat, r.hits as f64 / 500.0);
        }
        let sum: f64 = a.ratios.iter().map(|r| r.r_hat.ln()).sum();
        assert!((a.log_z_hat + sum).abs() < 1e-12);
    }
}

#[test]
fn backends_agree() {
    let (model, cover) = model(8, 6, 2);
    let f = vec![1.0; model.len()];
    let est = |backend| {
        let cfg = EstimatorConfig {
            backend,
            samples_override: Some(5_000),
            ..Default::default()
        };
        approximate_partition_function(&model, &cover, &f, 0.3, 5, &cfg).unwrap()
    };
    let sim = est(SamplerBackend::Simulate);
    let exact = est(SamplerBackend::ExactTransient);
    for (a, b) in sim.ratios.iter().zip(&exact.ratios) {
        assert_eq!(a.steps, b.steps);
        // 4 standard deviations of the difference at s = 5000
        assert!(
            (a.r_hat - b.r_hat).abs() < 0.04,
            "{} vs {}",
            a.r_hat,
            b.r_hat
        );
    }
}

#[test]
fn degenerate_ratio_is_reported() {
    // r_1 = 1/1001, so a single sample almost surely misses
    let model = PolymerModel::from_log_weights(&[1e3f64.ln()], &[]).unwrap();
    let cfg = EstimatorConfig {
        backend: SamplerBackend::ExactTransient,
        samples_override: Some(1),
        ..Default::default()
    };
    let err =
        approximate_partition_function(&model, &CliqueCover::trivial(1), &[1.0], 0.5, 1, &cfg)
            .unwrap_err();
    assert_eq!(
        err,
        Error::DegenerateRatio {
            clique: 1,
            samples: 1
        }
    );
}

#[test]
fn precondition_failure_is_an_error() {
    let star = PolymerModel::from_log_weights(&[0.0; 4], &[(0, 1), (0, 2), (0, 3)]).unwrap();
    let err = approximate_partition_function(
        &star,
        &CliqueCover::trivial(4),
        &[1.0; 4],
        0.5,
        1,
        &EstimatorConfig::default(),
    );
    assert!(matches!(
        err,
        Err(Error::Precondition {
            worst_polymer: 0,
            ..
        })
    ));
}

#[test]
fn single_polymer_sampling_frequency() {
    let model = PolymerModel::from_log_weights(&[0.0], &[]).unwrap();
    let cover = CliqueCover::trivial(1);
    let mut r = rng::seeded(77);
    let hits = (0..10_000)
        .filter(|_| {
            !sample_gibbs(&model, &cover, &[1.0], 0.01, &mut r)
                .unwrap()
                .is_empty()
        })
        .count();
    let freq = hits as f64 / 1e4;
    assert!((freq - 0.5).abs() < 0.03, "{freq}");
}

#[test]
fn amplified_estimates_concentrate() {
    let (model, cover) = model(12, 6, 2);
    let f = vec![1.0; model.len()];
    let exact = partition_function_exact(&model, None).unwrap().exp();
    let eps = 0.2;
    let cfg = EstimatorConfig {
        backend: SamplerBackend::ExactTransient,
        ..Default::default()
    };
    let prepared = PreparedEstimator::new(&model, &cover, &f, eps, &cfg).unwrap();
    assert_eq!(
        prepared.run(9).unwrap(),
        approximate_partition_function(&model, &cover, &f, eps, 9, &cfg).unwrap()
    );
    let mut good = 0;
    for run in 0..40 {
        let amp = median_amplify(0.05, run, |seed| prepared.run(seed)).unwrap();
        assert_eq!(amp.runs, 144);
        let z = amp.median.z_hat();
        if z >= (1.0 - eps) * exact && z <= (1.0 + eps) * exact {
            good += 1;
        }
    }
    assert!(good >= 36, "{good}/40");
}
