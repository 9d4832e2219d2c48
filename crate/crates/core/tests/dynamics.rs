mod common;

use polymer_core::dynamics::transition_matrix_with_cap;
use polymer_core::family::gibbs_distribution;
use polymer_core::random::{random_model, RandomModelSpec};
use polymer_core::{
    rng, transition_matrix, ChainState, CliqueCover, CliqueDynamics, PolymerFamily, PolymerModel,
};
use proptest::prelude::*;

fn mask(f: &PolymerFamily) -> u32 {
    f.members().iter().fold(0, |acc, &p| acc | 1 << p)
}

fn model(seed: u64, n: usize, m: usize) -> (PolymerModel, CliqueCover) {
    let spec = RandomModelSpec {
        polymers: n,
        cliques: m,
        cross_density: 0.3,
        overlap: 0.25,
        log_weight: (-2.0, 1.0),
        size: (1, 1),
    };
    random_model(&spec, &mut rng::seeded(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrix_matches_step_semantics(seed in any::<u64>(), n in 0usize..=8, m in 1usize..=4) {
        let (model, cover) = model(seed, n, m);
        let p = transition_matrix(&model, &cover).unwrap();
        let oracle = common::step_matrix(&model, &cover);
        for (a, fa) in p.states.iter().enumerate() {
            let row: f64 = p.rows[a].iter().map(|&(_, v)| v).sum();
            prop_assert!((row - 1.0).abs() <= 1e-12);
            prop_assert!(p.get(a, a) > 0.0);
            for (b, fb) in p.states.iter().enumerate() {
                let want = oracle.get(&(mask(fa), mask(fb))).copied().unwrap_or(0.0);
                prop_assert!((p.get(a, b) - want).abs() <= 1e-12, "{} -> {}", fa, fb);
                if p.get(a, b) > 0.0 {
                    prop_assert!((mask(fa) ^ mask(fb)).count_ones() <= 1);
                }
            }
        }
    }

    #[test]
    fn stationary_is_gibbs(seed in any::<u64>(), n in 0usize..=10, m in 1usize..=4) {
        let (model, cover) = model(seed, n, m);
        let p = transition_matrix(&model, &cover).unwrap();
        let (fams, probs) = gibbs_distribution(&model, None, 20).unwrap();
        let pi = p.stationary(1e-15, 200_000);
        for (f, want) in fams.iter().zip(&probs) {
            let got = pi[p.index_of(f).unwrap()];
            prop_assert!((got - want).abs() <= 1e-10);
        }
    }

    #[test]
    fn glauber_on_trivial_cover(seed in any::<u64>(), n in 1usize..=8) {
        let (model, _) = model(seed, n, 2);
        let cover = CliqueCover::trivial(n);
        let p = transition_matrix(&model, &cover).unwrap();
        let empty = p.index_of(&PolymerFamily::empty()).unwrap();
        for g in 0..n {
            let w = model.log_weight(g).exp();
            let to = p.index_of(&PolymerFamily::from_ids(vec![g])).unwrap();
            let want = w / (1.0 + w) / n as f64;
            prop_assert!((p.get(empty, to) - want).abs() <= 1e-15 * want, "{} vs {}", p.get(empty, to), want);
        }
    }

    #[test]
    fn chain_stays_valid(seed in any::<u64>(), n in 1usize..=12, m in 1usize..=5) {
        let (model, cover) = model(seed, n, m);
        let dynamics = CliqueDynamics::new(&model, &cover).unwrap();
        let mut state = dynamics.empty_state();
        let mut r = rng::seeded(seed ^ 1);
        for _ in 0..500 {
            dynamics.step(&mut state, &mut r);
            let fam = state.family();
            prop_assert!(model.is_valid_family(fam.members()).unwrap());
            // cache agrees with a rebuild from the family
            prop_assert_eq!(&ChainState::from_family(&model, &cover, &fam).unwrap(), &state);
        }
    }
}

#[test]
fn detailed_balance_on_twelve_polymers() {
    let (model, cover) = model(2024, 12, 4);
    let p = transition_matrix_with_cap(&model, &cover, 12).unwrap();
    let (fams, probs) = gibbs_distribution(&model, None, 12).unwrap();
    let mu: Vec<f64> = p
        .states
        .iter()
        .map(|s| probs[fams.iter().position(|f| f == s).unwrap()])
        .collect();
    for (a, row) in p.rows.iter().enumerate() {
        for &(b, v) in row {
            assert!((mu[a] * v - mu[b] * p.get(b, a)).abs() <= 1e-12);
        }
    }
    let pi = p.stationary(1e-15, 200_000);
    let worst = pi
        .iter()
        .zip(&mu)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn run_chain_is_deterministic() {
    let (model, cover) = model(5, 9, 3);
    let run = |seed| {
        let dynamics = CliqueDynamics::new(&model, &cover).unwrap();
        let mut s = dynamics.empty_state();
        let mut out = Vec::new();
        dynamics
            .write_trajectory(&mut s, 200, &mut rng::seeded(seed), &mut out)
            .unwrap();
        out
    };
    assert_eq!(run(17), run(17));
    assert_ne!(run(17), run(18));
}
