use std::collections::BTreeMap;

use polymer_core::family::gibbs_distribution;
use polymer_core::hardcore::{table1_evaluate, Table1Row};
use polymer_core::random::{random_model as generate, RandomModelSpec};
use polymer_core::{
    check_clique_dynamics, mixing_time_bound, model_from_json, model_to_json,
    partition_function_exact, rng, transition_matrix, EstimatorConfig, PreparedEstimator,
    SamplerBackend,
};
use serde::Serialize;

/// Demo inputs are kept small enough to enumerate in a browser tab.
pub const MAX_POLYMERS: usize = 14;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn load(model: &str) -> Result<(polymer_core::PolymerModel, polymer_core::CliqueCover), String> {
    let (m, c) = model_from_json(model).map_err(err)?;
    if m.len() > MAX_POLYMERS {
        return Err(format!(
            "the demo handles at most {MAX_POLYMERS} polymers, got {}",
            m.len()
        ));
    }
    Ok((m, c))
}

pub fn random_model(
    polymers: usize,
    cliques: usize,
    max_log_weight: f64,
    seed: u64,
) -> Result<String, String> {
    if polymers == 0 || polymers > MAX_POLYMERS {
        return Err(format!("polymers must be in 1..={MAX_POLYMERS}"));
    }
    if cliques == 0 || cliques > polymers {
        return Err("cliques must be in 1..=polymers".into());
    }
    let spec = RandomModelSpec {
        polymers,
        cliques,
        log_weight: (max_log_weight - 2.0, max_log_weight),
        ..Default::default()
    };
    let (model, cover) = generate(&spec, &mut rng::seeded(seed));
    Ok(model_to_json(&model, &cover))
}

pub fn thresholds(row: &str, params: &str) -> Result<String, String> {
    let row: Table1Row = row.parse().map_err(err)?;
    let params: BTreeMap<String, f64> = serde_json::from_str(params).map_err(err)?;
    let report = table1_evaluate(row, &params).map_err(err)?;
    serde_json::to_string(&report).map_err(err)
}

#[derive(Debug, Serialize)]
pub struct TvCurve {
    pub states: usize,
    pub steps: Vec<u64>,
    pub tv: Vec<f64>,
    /// Step count the mixing bound gives for ε = 1/4 with `f ≡ 1`.
    pub bound_steps: u64,
    pub condition_holds: bool,
}

pub fn tv_curve(model: &str, max_steps: u64, points: usize) -> Result<String, String> {
    let (model, cover) = load(model)?;
    let points = points.clamp(2, 400);
    let p = transition_matrix(&model, &cover).map_err(err)?;
    let (fams, probs) = gibbs_distribution(&model, None, MAX_POLYMERS).map_err(err)?;
    let mut gibbs = vec![0.0; p.len()];
    for (fam, pr) in fams.iter().zip(probs) {
        if let Some(i) = p.index_of(fam) {
            gibbs[i] = pr;
        }
    }
    let start = p
        .index_of(&polymer_core::PolymerFamily::empty())
        .ok_or("no empty state")?;

    let steps: Vec<u64> = (0..points)
        .map(|i| (max_steps as f64 * i as f64 / (points - 1) as f64).round() as u64)
        .collect();
    // one pass, stepping the law forward between sample points
    let mut law = vec![0.0; p.len()];
    law[start] = 1.0;
    let mut at = 0;
    let mut tv = Vec::with_capacity(points);
    for &t in &steps {
        while at < t {
            law = p.left_multiply(&law);
            at += 1;
        }
        tv.push(
            0.5 * law
                .iter()
                .zip(&gibbs)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>(),
        );
    }
    let f = vec![1.0; model.len()];
    let bound = mixing_time_bound(&model, &cover, &f, 0.25).map_err(err)?;
    serde_json::to_string(&TvCurve {
        states: p.len(),
        steps,
        tv,
        bound_steps: bound.steps,
        condition_holds: bound.condition_holds,
    })
    .map_err(err)
}

#[derive(Debug, Serialize)]
pub struct EstimateComparison {
    pub log_z_exact: f64,
    pub z_exact: f64,
    pub epsilon: f64,
    pub samples_per_ratio: u64,
    pub z_hats: Vec<f64>,
    /// Runs within `(1 ± ε) Z`.
    pub within: usize,
}

pub fn estimate_vs_exact(
    model: &str,
    epsilon: f64,
    runs: u64,
    seed: u64,
) -> Result<String, String> {
    let (model, cover) = load(model)?;
    let runs = runs.clamp(1, 200);
    let f = vec![1.0; model.len()];
    check_clique_dynamics(&model, &f)
        .map_err(err)?
        .require()
        .map_err(err)?;
    let config = EstimatorConfig {
        backend: SamplerBackend::ExactTransient,
        samples_override: None,
        cap: MAX_POLYMERS,
    };
    let prepared = PreparedEstimator::new(&model, &cover, &f, epsilon, &config).map_err(err)?;
    let log_z = partition_function_exact(&model, None).map_err(err)?;
    let z = log_z.exp();
    let z_hats = (0..runs)
        .map(|r| prepared.run(rng::child_seed(seed, r)).map(|e| e.z_hat()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let within = z_hats
        .iter()
        .filter(|&&x| (x - z).abs() <= epsilon * z)
        .count();
    serde_json::to_string(&EstimateComparison {
        log_z_exact: log_z,
        z_exact: z,
        epsilon,
        samples_per_ratio: prepared.samples(),
        z_hats,
        within,
    })
    .map_err(err)
}
