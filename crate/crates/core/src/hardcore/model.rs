//! Hard-core polymer models on the two sides of a bipartite graph.
//!
//! A polymer on side `i` is a nonempty small vertex set `S ⊆ P_i` that is
//! connected in `G²`, with weight `λ^{|S|} / (1+λ)^{|N_G(S)|}`. Two polymers
//! are incompatible when their vertex sets are at distance at most 1 in `G²`.

use serde::{Deserialize, Serialize};

use super::enumerate::enumerate_all_connected_sets;
use super::graph::{BipartiteGraph, Side};
use super::thresholds::lambda_threshold;
use crate::conditions::GrowthFn;
use crate::cover::CliqueCover;
use crate::error::{Error, Result};
use crate::estimator::{median_amplify, EstimatorConfig, PreparedEstimator};
use crate::family::partition_function_exact_with_cap;
use crate::logspace::{log1p_exp, log_add_exp};
use crate::model::{Polymer, PolymerModel};
use crate::truncation::truncation_threshold;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardCoreParams {
    pub lambda: f64,
    pub alpha: f64,
}

impl HardCoreParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::Input(format!(
                "lambda = {} must be positive",
                self.lambda
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Input(format!(
                "alpha = {} is not in (0, 1]",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// `ln w = |S| ln λ - |N_G(S)| ln(1+λ)`.
pub fn polymer_weight(g: &BipartiteGraph, side: Side, set: &[usize], lambda: f64) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::Input("polymer vertex set is empty".into()));
    }
    if let Some(&v) = set.iter().find(|&&v| v >= g.side_len(side)) {
        return Err(Error::Graph(format!("vertex {v} is not on side {side}")));
    }
    let mut distinct = set.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let nb = g.neighborhood(side, &distinct).len();
    Ok(distinct.len() as f64 * lambda.ln() - nb as f64 * log1p_exp(lambda.ln()))
}

/// Largest side enumerated without a size cap.
pub const UNCAPPED_SIDE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SideModel {
    pub side: Side,
    pub model: PolymerModel,
    /// `Λ_v` for every vertex `v` of the side.
    pub cover: CliqueCover,
    /// Vertex set of each polymer, indexed by polymer id.
    pub sets: Vec<Vec<usize>>,
}

impl SideModel {
    /// `f(γ) = |V(γ)|`.
    pub fn size_function(&self) -> Vec<f64> {
        self.sets.iter().map(|s| s.len() as f64).collect()
    }
}

/// Polymers of one side, ordered by (size, vertex list). `size_cap` limits
/// polymer sizes further (truncation); without it the side must have at
/// most [`UNCAPPED_SIDE_LIMIT`] vertices.
pub fn build_polymer_model(
    g: &BipartiteGraph,
    side: Side,
    lambda: f64,
    size_cap: Option<usize>,
) -> Result<SideModel> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Input(format!("lambda = {lambda} must be positive")));
    }
    let n = g.side_len(side);
    let small = n / 2;
    let k = match size_cap {
        Some(c) => c.min(small),
        None if n <= UNCAPPED_SIDE_LIMIT => small,
        None => {
            return Err(Error::EnumerationCap {
                count: n,
                cap: UNCAPPED_SIDE_LIMIT,
            })
        }
    };
    let square = g.side_square(side);
    let sets = enumerate_all_connected_sets(&square, k);
    let polymers = sets
        .iter()
        .enumerate()
        .map(|(id, s)| {
            Ok(Polymer::new(id, polymer_weight(g, side, s, lambda)?).with_size(s.len() as f64))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut containing = vec![Vec::new(); n];
    for (id, s) in sets.iter().enumerate() {
        for &v in s {
            containing[v].push(id);
        }
    }
    let mut pairs = Vec::new();
    let mut mark = vec![usize::MAX; sets.len()];
    for (a, s) in sets.iter().enumerate() {
        for &v in s {
            let reach = std::iter::once(v).chain(square.neighbors(v).iter().copied());
            for u in reach {
                for &b in &containing[u] {
                    if b > a && mark[b] != a {
                        mark[b] = a;
                        pairs.push((a, b));
                    }
                }
            }
        }
    }
    let model = PolymerModel::new(polymers, &pairs)?;
    Ok(SideModel {
        side,
        model,
        cover: CliqueCover::new(containing),
        sets,
    })
}

/// Largest graph (total vertices) accepted by [`exact_hardcore`].
pub const EXACT_HARDCORE_LIMIT: usize = 30;

/// `ln Z_G(λ) = ln Σ_{I independent} λ^{|I|}`.
pub fn exact_hardcore(g: &BipartiteGraph, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Input(format!("lambda = {lambda} must be positive")));
    }
    let n = g.n();
    if n > EXACT_HARDCORE_LIMIT {
        return Err(Error::EnumerationCap {
            count: n,
            cap: EXACT_HARDCORE_LIMIT,
        });
    }
    let simple = g.to_simple();
    let masks: Vec<u64> = (0..n)
        .map(|v| simple.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u))
        .collect();
    let alive = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    Ok(log_independence(&masks, alive, lambda.ln()))
}

/// Branches on a vertex of maximum degree inside `alive`:
/// `Z(G) = Z(G - v) + λ Z(G - N[v])`. When no vertex has degree above 1 the
/// remainder is isolated vertices and disjoint edges, which are closed form.
fn log_independence(masks: &[u64], alive: u64, log_lambda: f64) -> f64 {
    let mut best = None;
    let mut best_deg = 0;
    let mut isolated = 0u32;
    let mut edge_ends = 0u32;
    let mut bits = alive;
    while bits != 0 {
        let v = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let deg = (masks[v] & alive).count_ones();
        match deg {
            0 => isolated += 1,
            1 => edge_ends += 1,
            _ => {}
        }
        if deg > best_deg {
            best_deg = deg;
            best = Some(v);
        }
    }
    if best_deg <= 1 {
        let log_vertex = log1p_exp(log_lambda);
        // an edge {a, b} contributes 1 + 2λ
        let log_edge = log1p_exp(std::f64::consts::LN_2 + log_lambda);
        return isolated as f64 * log_vertex + (edge_ends / 2) as f64 * log_edge;
    }
    let v = best.expect("a vertex of degree >= 2");
    let without = log_independence(masks, alive & !(1 << v), log_lambda);
    let with = log_lambda + log_independence(masks, alive & !(1 << v) & !masks[v], log_lambda);
    log_add_exp(without, with)
}

/// `ln((1+λ)^{|R|} Z_L + (1+λ)^{|L|} Z_R)` from side log partition functions.
pub fn combine_sides(g: &BipartiteGraph, lambda: f64, log_z_left: f64, log_z_right: f64) -> f64 {
    let l1 = log1p_exp(lambda.ln());
    log_add_exp(
        g.n_right() as f64 * l1 + log_z_left,
        g.n_left() as f64 * l1 + log_z_right,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactCombination {
    pub log_z_left: f64,
    pub log_z_right: f64,
    pub log_combination: f64,
}

/// Exact side partition functions (no truncation) and their combination.
pub fn exact_combination(g: &BipartiteGraph, lambda: f64, cap: usize) -> Result<ExactCombination> {
    let left = build_polymer_model(g, Side::Left, lambda, None)?;
    let right = build_polymer_model(g, Side::Right, lambda, None)?;
    let log_z_left = partition_function_exact_with_cap(&left.model, None, cap)?;
    let log_z_right = partition_function_exact_with_cap(&right.model, None, cap)?;
    Ok(ExactCombination {
        log_z_left,
        log_z_right,
        log_combination: combine_sides(g, lambda, log_z_left, log_z_right),
    })
}

/// Size growth used for hard-core truncation, `g(x) = e^{x/5}`, with `B = 1`.
pub const HARDCORE_GROWTH: GrowthFn = GrowthFn::Exp { a: 0.2 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideEstimate {
    pub side: Side,
    pub m: usize,
    /// Truncation size (polymers with more vertices are dropped).
    pub k: usize,
    pub polymers: usize,
    pub log_z_hat: f64,
    pub runs: u64,
    pub s: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinedEstimate {
    pub log_z: f64,
    pub epsilon: f64,
    pub sides: Vec<SideEstimate>,
    pub warnings: Vec<String>,
}

/// Failure probability allowed for each side so that both succeed with
/// probability at least 3/4.
pub fn side_failure_probability() -> f64 {
    1.0 - 3f64.sqrt() / 2.0
}

/// Approximates `Z_G(λ)` by estimating each side's polymer partition
/// function and combining them as `(1+λ)^{|R|} Z_L + (1+λ)^{|L|} Z_R`.
///
/// Each side targets accuracy `ε/4`: it is truncated at
/// `k = g⁻¹(2m/(ε/4))`, the truncated model is estimated at `ε/8`, and the
/// estimate is amplified by the median of independent runs.
pub fn combined_estimate(
    g: &BipartiteGraph,
    params: HardCoreParams,
    epsilon: f64,
    seed: u64,
    config: &EstimatorConfig,
) -> Result<CombinedEstimate> {
    params.validate()?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Input(format!(
            "epsilon = {epsilon} is not in (0, 1]"
        )));
    }
    let mut warnings = Vec::new();
    let threshold = lambda_threshold(g.max_degree().max(1), params.alpha)?;
    if params.lambda < threshold.max {
        warnings.push(format!(
            "lambda = {} is below the threshold {:.6} for Delta = {}, alpha = {}; the combination guarantee does not apply",
            params.lambda,
            threshold.max,
            g.max_degree(),
            params.alpha
        ));
    }
    let side_eps = epsilon / 4.0;
    let delta = side_failure_probability();
    let mut sides = Vec::new();
    let mut logs = [0.0; 2];
    for (slot, side) in [Side::Left, Side::Right].into_iter().enumerate() {
        let m = g.side_len(side);
        if m == 0 {
            sides.push(SideEstimate {
                side,
                m,
                k: 0,
                polymers: 0,
                log_z_hat: 0.0,
                runs: 0,
                s: 0,
            });
            continue;
        }
        let k_real = truncation_threshold(HARDCORE_GROWTH, 1.0, m, side_eps, true)?;
        let k = k_real.floor().min(usize::MAX as f64) as usize;
        let built = build_polymer_model(g, side, params.lambda, Some(k))?;
        let f = built.size_function();
        let side_seed = crate::rng::child_seed(seed, slot as u64);
        let prepared =
            PreparedEstimator::new(&built.model, &built.cover, &f, side_eps / 2.0, config)?;
        let amplified = median_amplify(delta, side_seed, |s| prepared.run(s))?;
        logs[slot] = amplified.median.log_z_hat;
        sides.push(SideEstimate {
            side,
            m,
            k,
            polymers: built.model.len(),
            log_z_hat: amplified.median.log_z_hat,
            runs: amplified.runs,
            s: amplified.median.s,
        });
    }
    Ok(CombinedEstimate {
        log_z: combine_sides(g, params.lambda, logs[0], logs[1]),
        epsilon,
        sides,
        warnings,
    })
}
