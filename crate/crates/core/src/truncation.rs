//! Truncating polymer models to polymers of bounded size.

use serde::{Deserialize, Serialize};

use crate::conditions::GrowthFn;
use crate::cover::CliqueCover;
use crate::error::{Error, Result};
use crate::family::{for_each_family, partition_function_exact_with_cap};
use crate::logspace::log_sum_exp;
use crate::model::PolymerModel;

#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub model: PolymerModel,
    /// The supplied cover intersected with the survivors. Cliques that lose
    /// all members stay in place (as empty cliques), so `m` is unchanged.
    pub cover: Option<CliqueCover>,
    pub new_to_old: Vec<usize>,
    pub old_to_new: Vec<Option<usize>>,
}

/// Keeps the polymers with `size <= k`.
pub fn truncate(model: &PolymerModel, k: f64, cover: Option<&CliqueCover>) -> Result<Truncation> {
    let keep: Vec<usize> = (0..model.len()).filter(|&i| model.size(i) <= k).collect();
    let (sub, new_to_old) = model.induced(&keep)?;
    let mut old_to_new = vec![None; model.len()];
    for (new, &old) in new_to_old.iter().enumerate() {
        old_to_new[old] = Some(new);
    }
    let cover = cover.map(|c| {
        CliqueCover::new(
            c.cliques()
                .iter()
                .map(|cl| {
                    cl.iter()
                        .filter_map(|&p| old_to_new.get(p).copied().flatten())
                        .collect()
                })
                .collect(),
        )
    });
    Ok(Truncation {
        model: sub,
        cover,
        new_to_old,
        old_to_new,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPlan {
    pub g: GrowthFn,
    pub b: f64,
    pub m: usize,
    pub epsilon: f64,
    pub doubled: bool,
    pub k: f64,
}

/// Size threshold `k = g⁻¹(Bm/ε)`, or `g⁻¹(2Bm/ε)` when `doubled`.
/// Without `doubled` ε must lie in (0,1); with it ε = 1 is also allowed.
pub fn truncation_threshold(
    g: GrowthFn,
    b: f64,
    m: usize,
    epsilon: f64,
    doubled: bool,
) -> Result<f64> {
    Ok(truncation_plan(g, b, m, epsilon, doubled)?.k)
}

pub fn truncation_plan(
    g: GrowthFn,
    b: f64,
    m: usize,
    epsilon: f64,
    doubled: bool,
) -> Result<TruncationPlan> {
    g.validate()?;
    let upper_ok = if doubled {
        epsilon <= 1.0
    } else {
        epsilon < 1.0
    };
    if !(epsilon > 0.0 && upper_ok) {
        let range = if doubled { "(0, 1]" } else { "(0, 1)" };
        return Err(Error::Input(format!(
            "epsilon = {epsilon} is not in {range}"
        )));
    }
    if !(b > 0.0) {
        return Err(Error::Input(format!("B = {b} must be positive")));
    }
    if m == 0 {
        return Err(Error::Input("m must be at least 1".into()));
    }
    let factor = if doubled { 2.0 } else { 1.0 };
    let k = g.inverse(factor * b * m as f64 / epsilon)?;
    Ok(TruncationPlan {
        g,
        b,
        m,
        epsilon,
        doubled,
        k,
    })
}

/// Per-clique weight of polymers larger than `k`: `Σ_{γ∈Λ_i, |γ|>k} w_γ`.
pub fn tail_sums(model: &PolymerModel, cover: &CliqueCover, k: f64) -> Result<Vec<f64>> {
    (0..cover.m())
        .map(|i| {
            let clique = cover.clique(i)?;
            for &p in clique {
                model.check_id(p)?;
            }
            let lws: Vec<f64> = clique
                .iter()
                .filter(|&&p| model.size(p) > k)
                .map(|&p| model.log_weight(p))
                .collect();
            Ok(log_sum_exp(&lws).exp())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QualityMode {
    /// Exact partition functions and total variation by enumeration.
    BruteForce { cap: usize },
    /// Only the per-clique tail sums.
    PremiseOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationQuality {
    pub k: f64,
    pub epsilon: f64,
    pub tail_sums: Vec<f64>,
    /// Every tail sum is at most `ε/m`.
    pub premise_holds: bool,
    /// `ln(Z_{≤k}/Z)`.
    pub log_ratio: Option<f64>,
    /// `d_TV(μ, μ_{≤k})`.
    pub tv: Option<f64>,
    /// `e^{-ε} ≤ Z_{≤k}/Z ≤ 1`.
    pub ratio_within: Option<bool>,
    pub tv_within: Option<bool>,
}

pub fn verify_truncation_quality(
    model: &PolymerModel,
    cover: &CliqueCover,
    k: f64,
    epsilon: f64,
    mode: QualityMode,
) -> Result<TruncationQuality> {
    let tails = tail_sums(model, cover, k)?;
    let m = cover.m().max(1) as f64;
    let premise_holds = tails.iter().all(|&t| t <= epsilon / m * (1.0 + 1e-12));
    let mut out = TruncationQuality {
        k,
        epsilon,
        tail_sums: tails,
        premise_holds,
        log_ratio: None,
        tv: None,
        ratio_within: None,
        tv_within: None,
    };
    if let QualityMode::BruteForce { cap } = mode {
        let small: Vec<usize> = (0..model.len()).filter(|&i| model.size(i) <= k).collect();
        let log_z = partition_function_exact_with_cap(model, None, cap)?;
        let log_zk = partition_function_exact_with_cap(model, Some(&small), cap)?;
        let mut tv = 0.0;
        for_each_family(model, None, cap, |members, lw| {
            let mu = (lw - log_z).exp();
            let mu_k = if members.iter().all(|&p| model.size(p) <= k) {
                (lw - log_zk).exp()
            } else {
                0.0
            };
            tv += (mu - mu_k).abs();
        })?;
        let tv = tv / 2.0;
        let log_ratio = log_zk - log_z;
        out.ratio_within = Some(log_ratio >= -epsilon - 1e-12 && log_ratio <= 1e-12);
        out.tv_within = Some(tv <= epsilon + 1e-12);
        out.log_ratio = Some(log_ratio);
        out.tv = Some(tv);
    }
    Ok(out)
}
