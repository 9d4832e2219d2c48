//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use polymer_core::estimator::PreparedEstimator;
use polymer_core::family::gibbs_distribution;
use polymer_core::hardcore::thresholds::{MATCHING_CONSTANT, UNBALANCED_CONSTANT};
use polymer_core::hardcore::{
    build_polymer_model, connected_set_count_bound, enumerate_connected_sets, lambda_threshold,
    table1_evaluate, Side, SimpleGraph, Table1Row,
};
use polymer_core::random::{random_bipartite, random_model, RandomModelSpec};
use polymer_core::truncation::tail_sums;
use polymer_core::{
    check_clique_dynamics, check_clique_truncation, check_fernandez_procacci,
    check_strong_condition, empirical_tv, mixing_time_bound, partition_function_exact, rng,
    sample_schedule, transition_matrix, truncation_threshold, verify_truncation_quality,
    CliqueCover, EstimatorConfig, GrowthFn, PolymerFamily, PolymerModel, QualityMode,
    SamplerBackend,
};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 stationarity and detailed balance", criterion_1),
        ("2 estimator correctness", criterion_2),
        ("3 condition implications", criterion_3),
        ("4 truncation chain", criterion_4),
        ("5 hard-core combination identity", criterion_5),
        ("6 closed-form parameter ranges", criterion_6),
        ("7 connected-set enumeration and count bound", criterion_7),
        ("8 sample-schedule formulas", criterion_8),
        ("9 empirical mixing sanity", criterion_9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>())));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] criterion {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}

fn criterion_1() -> Outcome {
    let mut r = rng::seeded(1001);
    let mut worst_balance = 0.0f64;
    let mut worst_stationary = 0.0f64;
    for _ in 0..200 {
        let n = r.gen_range(1..=10);
        let spec = RandomModelSpec {
            polymers: n,
            cliques: r.gen_range(1..=n.min(5)),
            cross_density: r.gen_range(0.0..0.6),
            overlap: r.gen_range(0.0..0.4),
            log_weight: (-2.5, 1.0),
            size: (1, 1),
        };
        let (model, cover) = random_model(&spec, &mut r);
        let p = transition_matrix(&model, &cover).map_err(|e| e.to_string())?;
        let (fams, probs) = gibbs_distribution(&model, None, 20).map_err(|e| e.to_string())?;
        let mu: Vec<f64> = p
            .states
            .iter()
            .map(|s| probs[fams.iter().position(|f| f == s).unwrap()])
            .collect();
        for (a, row) in p.rows.iter().enumerate() {
            for &(b, v) in row {
                worst_balance = worst_balance.max((mu[a] * v - mu[b] * p.get(b, a)).abs());
            }
        }
        let pi = p.stationary(1e-15, 1_000_000);
        for (x, y) in pi.iter().zip(&mu) {
            worst_stationary = worst_stationary.max((x - y).abs());
        }
    }
    ensure(worst_balance <= 1e-12, || {
        format!("detailed balance error {worst_balance:e}")
    })?;
    ensure(worst_stationary <= 1e-10, || {
        format!("stationary L-inf error {worst_stationary:e}")
    })?;
    Ok(format!(
        "200 models, max balance error {worst_balance:.1e}, max stationary error {worst_stationary:.1e}"
    ))
}

/// Seeded models with at most 12 polymers on which `f ≡ 1` satisfies the
/// clique dynamics condition.
fn estimator_models() -> Vec<(PolymerModel, CliqueCover, SamplerBackend)> {
    let shapes = [
        (3, 1, SamplerBackend::Simulate),
        (4, 2, SamplerBackend::ExactTransient),
        (6, 2, SamplerBackend::ExactTransient),
        (7, 3, SamplerBackend::ExactTransient),
        (8, 3, SamplerBackend::ExactTransient),
        (9, 3, SamplerBackend::ExactTransient),
        (10, 4, SamplerBackend::ExactTransient),
        (11, 4, SamplerBackend::ExactTransient),
        (12, 4, SamplerBackend::ExactTransient),
        (12, 5, SamplerBackend::ExactTransient),
    ];
    let mut r = rng::seeded(2002);
    shapes
        .iter()
        .map(|&(n, m, backend)| loop {
            let spec = RandomModelSpec {
                polymers: n,
                cliques: m,
                cross_density: 0.15,
                overlap: 0.1,
                log_weight: (-3.0, -0.5),
                size: (1, 1),
            };
            let (model, cover) = random_model(&spec, &mut r);
            if check_clique_dynamics(&model, &vec![1.0; n]).unwrap().holds {
                break (model, cover, backend);
            }
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let eps = 0.2;
    let mut summary = Vec::new();
    let mut failures = Vec::new();
    for (idx, (model, cover, backend)) in estimator_models().into_iter().enumerate() {
        let exact = partition_function_exact(&model, None)
            .map_err(|e| e.to_string())?
            .exp();
        let f = vec![1.0; model.len()];
        let cfg = EstimatorConfig {
            backend,
            ..Default::default()
        };
        let prepared =
            PreparedEstimator::new(&model, &cover, &f, eps, &cfg).map_err(|e| e.to_string())?;
        let mut good = 0;
        for run in 0..40u64 {
            let est = prepared
                .run(rng::child_seed(idx as u64, run))
                .map_err(|e| e.to_string())?;
            let z = est.z_hat();
            if z >= (1.0 - eps) * exact && z <= (1.0 + eps) * exact {
                good += 1;
            }
        }
        let tag = match backend {
            SamplerBackend::Simulate => "sim",
            SamplerBackend::ExactTransient => "law",
        };
        summary.push(format!(
            "{good}/40[{tag} n={} m={}]",
            model.len(),
            cover.m()
        ));
        if good < 24 {
            failures.push(idx);
        }
    }
    ensure(failures.is_empty(), || {
        format!("models {failures:?} below 24/40: {}", summary.join(" "))
    })?;
    Ok(summary.join(" "))
}

fn criterion_3() -> Outcome {
    let mut r = rng::seeded(3003);
    let (mut strong_count, mut fp_count, mut cdc_count) = (0, 0, 0);
    for i in 0..1000 {
        let n = r.gen_range(1..=8);
        let spec = RandomModelSpec {
            polymers: n,
            cliques: r.gen_range(1..=n),
            cross_density: r.gen_range(0.0..0.5),
            overlap: 0.2,
            log_weight: (-5.0, 0.0),
            size: (1, 1),
        };
        let (model, cover) = random_model(&spec, &mut r);
        let f: Vec<f64> = (0..n).map(|_| r.gen_range(0.5..3.0)).collect();
        let cdc = check_clique_dynamics(&model, &f).unwrap().holds;
        let strong = check_strong_condition(&model, &f, Some(&cover)).unwrap();
        let fp = check_fernandez_procacci(&model, &f).unwrap().holds;
        cdc_count += cdc as usize;
        if strong.holds {
            strong_count += 1;
            ensure(cdc, || {
                format!("model {i}: strong holds but clique dynamics fails")
            })?;
            for (c, z) in strong.clique_partitions.unwrap().iter().enumerate() {
                ensure(*z <= 2.0 + 1e-12, || {
                    format!("model {i}: clique {c} has Z = {z}")
                })?;
            }
        }
        if fp {
            fp_count += 1;
            ensure(cdc, || {
                format!("model {i}: FP holds but clique dynamics fails")
            })?;
        }
    }
    ensure(strong_count >= 50 && fp_count >= 50, || {
        format!("too few premises held: strong {strong_count}, FP {fp_count}")
    })?;
    Ok(format!(
        "1000 models, strong held {strong_count}, FP held {fp_count}, clique dynamics held {cdc_count}, 0 exceptions"
    ))
}

fn criterion_4() -> Outcome {
    let mut r = rng::seeded(4004);
    let mut premise = 0;
    let mut chains = 0;
    for i in 0..500 {
        let n = r.gen_range(1..=10);
        let spec = RandomModelSpec {
            polymers: n,
            cliques: r.gen_range(1..=n.min(4)),
            cross_density: 0.3,
            overlap: 0.2,
            log_weight: (-8.0, -0.5),
            size: (1, 8),
        };
        let (model, cover) = random_model(&spec, &mut r);
        let k = r.gen_range(0.0..9.0);
        let eps = r.gen_range(0.01..0.99);
        let q =
            verify_truncation_quality(&model, &cover, k, eps, QualityMode::BruteForce { cap: 20 })
                .map_err(|e| e.to_string())?;
        if q.premise_holds {
            premise += 1;
            ensure(q.ratio_within.unwrap(), || {
                format!("model {i}: ratio {:?} outside [e^-eps, 1]", q.log_ratio)
            })?;
            ensure(q.tv_within.unwrap(), || {
                format!("model {i}: TV {:?} > {eps}", q.tv)
            })?;
        }

        // growth condition with B taken as the largest clique sum
        let g = GrowthFn::Exp {
            a: r.gen_range(0.05..1.0),
        };
        let sums = check_clique_truncation(&model, &cover, g, 1.0)
            .unwrap()
            .per_clique_sum;
        let b = sums.iter().copied().fold(1e-300, f64::max);
        let eps_prime = r.gen_range(0.01..0.99);
        let k9 = g.inverse(b / eps_prime).unwrap();
        for (c, t) in tail_sums(&model, &cover, k9)
            .unwrap()
            .into_iter()
            .enumerate()
        {
            ensure(t <= eps_prime * (1.0 + 1e-12), || {
                format!("model {i}: clique {c} tail {t} > eps' {eps_prime} at k = {k9}")
            })?;
        }
        let k10 = truncation_threshold(g, b, cover.m(), eps_prime, false).unwrap();
        let q = verify_truncation_quality(
            &model,
            &cover,
            k10,
            eps_prime,
            QualityMode::BruteForce { cap: 20 },
        )
        .map_err(|e| e.to_string())?;
        ensure(
            q.premise_holds && q.ratio_within.unwrap() && q.tv_within.unwrap(),
            || format!("model {i}: chain through k = g^-1(Bm/eps) fails: {q:?}"),
        )?;
        chains += 1;
    }
    ensure(premise >= 50, || {
        format!("premise held only {premise} times")
    })?;
    Ok(format!(
        "500 models, tail premise held {premise} times, {chains} growth chains, 0 violations"
    ))
}

fn criterion_5() -> Outcome {
    let mut r = rng::seeded(5005);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let nl = r.gen_range(1..=7);
        let nr = r.gen_range(1..=7);
        let g = random_bipartite(nl, nr, r.gen_range(0.15..0.6), &mut r);
        let independent = common::independent_sets(&g);
        for side in [Side::Left, Side::Right] {
            let left = side == Side::Left;
            let (own, other) = if left { (nl, nr) } else { (nr, nl) };
            let share = common::side_share_matrix(&g, left);
            // indicator of "all G²-components of I ∩ side are small", per set
            let ok: Vec<bool> = independent
                .iter()
                .map(|&mask| {
                    let members: Vec<usize> = if left {
                        (0..nl).filter(|&v| mask >> v & 1 == 1).collect()
                    } else {
                        (0..nr).filter(|&v| mask >> (nl + v) & 1 == 1).collect()
                    };
                    common::components(&members, &share)
                        .iter()
                        .all(|c| c.len() <= own / 2)
                })
                .collect();
            for lambda in [0.5f64, 1.0, 5.0, 50.0] {
                let built =
                    build_polymer_model(&g, side, lambda, None).map_err(|e| e.to_string())?;
                let log_z =
                    polymer_core::family::partition_function_exact_with_cap(&built.model, None, 64)
                        .map_err(|e| e.to_string())?;
                let lhs = other as f64 * (1.0 + lambda).ln() + log_z;
                let rhs: f64 = independent
                    .iter()
                    .zip(&ok)
                    .filter(|(_, &good)| good)
                    .map(|(&mask, _)| lambda.powi(mask.count_ones() as i32))
                    .sum::<f64>()
                    .ln();
                let err = (lhs - rhs).abs();
                worst = worst.max(err);
                ensure(err <= 1e-9, || {
                    format!("graph {i} side {side} lambda {lambda}: log error {err:e}")
                })?;
            }
        }
    }
    Ok(format!(
        "50 graphs x 4 fugacities x 2 sides, max log error {worst:.1e}"
    ))
}

fn criterion_6() -> Outcome {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
    let mut checks = 0;
    for delta in 1..=12usize {
        for step in 1..=10 {
            let alpha = step as f64 / 10.0;
            let t = lambda_threshold(delta, alpha).unwrap();
            let hand1 = ((1.0 + 2.0 * (delta as f64).ln() - 0.8f64.ln()) / alpha).exp();
            let hand2 = (11.0 / alpha).exp();
            ensure(
                close(t.term1, hand1) && close(t.term2, hand2) && close(t.max, hand1.max(hand2)),
                || format!("lambda_threshold({delta}, {alpha}) = {t:?}"),
            )?;
            for q in [2.0, 3.0, 5.0] {
                let p = params(&[("delta", delta as f64), ("q", q), ("alpha", alpha)]);
                let beta = table1_evaluate(Table1Row::PottsExpander, &p).unwrap().value;
                ensure(
                    close(beta, (1.5 + (delta as f64).ln() + f64::ln(q)) / alpha),
                    || format!("potts({delta}, {q}, {alpha}) = {beta}"),
                )?;
            }
            checks += 4;
        }
        if delta >= 2 {
            let z = table1_evaluate(Table1Row::Matching, &params(&[("delta", delta as f64)]))
                .unwrap()
                .value;
            ensure(close(z, (2.8399 * (delta - 1) as f64).powf(-0.5)), || {
                format!("matching({delta}) = {z}")
            })?;
            checks += 1;
        }
    }
    let u = table1_evaluate(
        Table1Row::HardcoreUnbalanced,
        &params(&[
            ("delta_l", 2.0),
            ("delta_r", 2.0),
            ("lambda_l", 1.0),
            ("lambda_r", 0.01),
            ("min_delta_r", 2.0),
        ]),
    )
    .unwrap();
    ensure(
        close(u.details["lhs"], 0.133412)
            && close(u.details["rhs"], 2.0)
            && u.satisfied == Some(true),
        || format!("unbalanced example {u:?}"),
    )?;
    ensure(
        UNBALANCED_CONSTANT == 3.3353 && MATCHING_CONSTANT == 2.8399,
        || "constants".into(),
    )?;
    let t = lambda_threshold(3, 1.0).unwrap();
    ensure(
        (t.term1 - 30.5807).abs() < 5e-5 && (t.term2 - 59874.14).abs() < 5e-3 && t.max == t.term2,
        || format!("Delta = 3, alpha = 1 gives {t:?}"),
    )?;
    ensure(
        (lambda_threshold(1, 1.0).unwrap().term1 - 3.39785).abs() < 5e-6,
        || "Delta = 1".into(),
    )?;
    Ok(format!(
        "{} closed-form evaluations, Delta=3 alpha=1 term1 = {:.4}",
        checks + 3,
        t.term1
    ))
}

fn params(pairs: &[(&str, f64)]) -> std::collections::BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn criterion_7() -> Outcome {
    let mut r = rng::seeded(7007);
    let mut sets_checked = 0usize;
    let mut tightest = f64::INFINITY;
    for i in 0..200 {
        let n = r.gen_range(1..=12);
        let p = r.gen_range(0.1..0.6);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if r.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        let g = SimpleGraph::new(n, &edges).unwrap();
        let delta = g.max_degree();
        for v in 0..n {
            let all = enumerate_connected_sets(&g, v, n);
            let oracle = common::connected_sets_by_filter(&g, v, n);
            ensure(all == oracle, || {
                format!("graph {i} vertex {v}: enumeration differs from subset filter")
            })?;
            let k_cap = r.gen_range(1..=n);
            let capped = enumerate_connected_sets(&g, v, k_cap);
            let expected: Vec<Vec<usize>> = oracle
                .iter()
                .filter(|s| s.len() <= k_cap)
                .cloned()
                .collect();
            ensure(capped == expected, || {
                format!("graph {i} vertex {v} k {k_cap}: capped enumeration differs")
            })?;
            sets_checked += all.len();
            for k in 1..=6 {
                let count = all.iter().filter(|s| s.len() == k).count() as f64;
                let bound = connected_set_count_bound(delta, k);
                if count > 0.0 {
                    tightest = tightest.min(bound / count);
                }
                ensure(count <= bound, || {
                    format!("graph {i} vertex {v} k {k}: {count} sets > bound {bound}")
                })?;
            }
        }
    }
    Ok(format!(
        "200 graphs, {sets_checked} sets matched, min bound/count ratio {tightest:.3}"
    ))
}

fn criterion_8() -> Outcome {
    // ε = p/q and Z_max = a/b as exact rationals: 125 (a/b) m q² / p²
    let mut cases = 0;
    for (a, b) in [(1u128, 1u128), (2, 1), (3, 2), (7, 4), (5, 1)] {
        for m in [1u128, 2, 3, 10, 25, 100] {
            for (p, q) in [
                (1u128, 2u128),
                (1, 5),
                (1, 10),
                (3, 10),
                (1, 4),
                (9, 10),
                (1, 1),
                (1, 20),
                (7, 100),
            ] {
                let num = 125 * a * m * q * q;
                let den = b * p * p;
                let s_exact = 1 + num.div_ceil(den);
                let z_max = a as f64 / b as f64;
                let eps = p as f64 / q as f64;
                let got = sample_schedule(z_max, m as usize, eps).map_err(|e| e.to_string())?;
                ensure(got.s as u128 == s_exact, || {
                    format!(
                        "Z_max={a}/{b} m={m} eps={p}/{q}: s = {} expected {s_exact}",
                        got.s
                    )
                })?;
                let eps_s = eps / (5.0 * z_max * m as f64);
                ensure(got.epsilon_s == eps_s, || {
                    format!("epsilon_s {} vs {eps_s}", got.epsilon_s)
                })?;
                cases += 1;
            }
        }
    }
    let s = sample_schedule(2.0, 10, 0.5).unwrap();
    ensure(s.s == 10001 && (s.epsilon_s - 0.005).abs() < 1e-18, || {
        format!("(2, 10, 0.5) gives {s:?}")
    })?;
    Ok(format!(
        "{cases} grid points match the rational oracle; (2, 10, 0.5) -> ({}, {})",
        s.s, s.epsilon_s
    ))
}

fn criterion_9() -> Outcome {
    let mut r = rng::seeded(9009);
    let mut report = Vec::new();
    let mut models = 0;
    while models < 10 {
        let n = r.gen_range(1..=4);
        let spec = RandomModelSpec {
            polymers: n,
            cliques: r.gen_range(1..=n.min(3)),
            cross_density: 0.3,
            overlap: 0.2,
            log_weight: (-2.0, 0.0),
            size: (1, 1),
        };
        let (model, cover) = random_model(&spec, &mut r);
        let f = vec![1.0; n];
        if !check_clique_dynamics(&model, &f).unwrap().holds {
            continue;
        }
        let steps = mixing_time_bound(&model, &cover, &f, 0.05).unwrap().steps;
        let tv = empirical_tv(
            &model,
            &cover,
            steps,
            10_000,
            &PolymerFamily::empty(),
            models as u64,
        )
        .map_err(|e| e.to_string())?;
        ensure(tv <= 0.07, || {
            format!("model {models}: TV {tv} after {steps} steps")
        })?;
        report.push(format!("{tv:.3}@{steps}"));
        models += 1;
    }
    Ok(format!("TV at the bound: {}", report.join(" ")))
}
