//! Clique covers and the restricted Gibbs distribution on a single clique.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::{log1p_exp, log_sum_exp};
use crate::model::PolymerModel;

/// A sequence of polymer cliques whose union is the polymer set.
/// Cliques may overlap and may be empty (truncation can empty a clique).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CliqueCover {
    cliques: Vec<Vec<usize>>,
}

impl CliqueCover {
    /// Stores the cliques with ids sorted and deduplicated. Use
    /// [`validate_clique_cover`] to check the cover properties.
    pub fn new(cliques: Vec<Vec<usize>>) -> Self {
        let cliques = cliques
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        Self { cliques }
    }

    /// One singleton clique per polymer. The clique dynamics on this cover
    /// is Glauber dynamics.
    pub fn trivial(n: usize) -> Self {
        Self {
            cliques: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.cliques.len()
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    pub fn clique(&self, i: usize) -> Result<&[usize]> {
        self.cliques
            .get(i)
            .map(Vec::as_slice)
            .ok_or(Error::CliqueIndex {
                index: i,
                m: self.m(),
            })
    }

    /// For each polymer, the indices of the cliques containing it.
    pub fn memberships(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); n];
        for (i, c) in self.cliques.iter().enumerate() {
            for &id in c {
                if id < n {
                    out[id].push(i);
                }
            }
        }
        out
    }

    /// Union of the first `i` cliques, sorted.
    pub fn prefix_union(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.cliques[..i].iter().flatten().copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `ln Z_Λ = ln(1 + Σ_{γ∈Λ} w_γ)` for clique `i`.
    pub fn log_clique_partition(&self, model: &PolymerModel, i: usize) -> Result<f64> {
        let c = self.clique(i)?;
        let lws: Vec<f64> = c.iter().map(|&id| model.log_weight(id)).collect();
        Ok(log1p_exp(log_sum_exp(&lws)))
    }

    /// Largest `Z_Λ` over all cliques (1 for an empty cover).
    pub fn z_max(&self, model: &PolymerModel) -> f64 {
        (0..self.m())
            .map(|i| self.log_clique_partition(model, i).unwrap_or(0.0).exp())
            .fold(1.0, f64::max)
    }
}

/// Exact Gibbs distribution restricted to a clique: the empty family with
/// probability `1/Z_Λ`, a single polymer `γ` with probability `w_γ/Z_Λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueDistribution {
    pub clique_index: usize,
    pub log_z: f64,
    pub p_empty: f64,
    /// `(polymer id, probability)` in clique order.
    pub p_polymer: Vec<(usize, f64)>,
}

impl CliqueDistribution {
    pub fn total(&self) -> f64 {
        self.p_empty + self.p_polymer.iter().map(|&(_, p)| p).sum::<f64>()
    }
}

pub fn clique_distribution(
    model: &PolymerModel,
    cover: &CliqueCover,
    i: usize,
) -> Result<CliqueDistribution> {
    let c = cover.clique(i)?;
    for &id in c {
        model.check_id(id)?;
    }
    let log_z = cover.log_clique_partition(model, i)?;
    Ok(CliqueDistribution {
        clique_index: i,
        log_z,
        p_empty: (-log_z).exp(),
        p_polymer: c
            .iter()
            .map(|&id| (id, (model.log_weight(id) - log_z).exp()))
            .collect(),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverReport {
    /// Polymers in no clique.
    pub uncovered: Vec<usize>,
    /// `(clique, a, b)` where `a` and `b` are compatible members of the clique.
    pub compatible_pairs: Vec<(usize, usize, usize)>,
    /// `(clique, id)` for ids that are not polymers of the model.
    pub unknown: Vec<(usize, usize)>,
}

impl CoverReport {
    pub fn is_valid(&self) -> bool {
        self.uncovered.is_empty() && self.compatible_pairs.is_empty() && self.unknown.is_empty()
    }
}

pub fn validate_clique_cover(model: &PolymerModel, cover: &CliqueCover) -> CoverReport {
    let n = model.len();
    let mut covered = vec![false; n];
    let mut report = CoverReport::default();
    for (ci, c) in cover.cliques().iter().enumerate() {
        for (k, &a) in c.iter().enumerate() {
            if a >= n {
                report.unknown.push((ci, a));
                continue;
            }
            covered[a] = true;
            for &b in &c[k + 1..] {
                if b < n && !model.is_incompatible(a, b) {
                    report.compatible_pairs.push((ci, a, b));
                }
            }
        }
    }
    report.uncovered = (0..n).filter(|&i| !covered[i]).collect();
    report
}

/// Returns an error describing the first problem if the cover is invalid.
pub fn require_valid_cover(model: &PolymerModel, cover: &CliqueCover) -> Result<()> {
    let r = validate_clique_cover(model, cover);
    if let Some(&(c, id)) = r.unknown.first() {
        return Err(Error::InvalidModel(format!(
            "clique {c} names unknown polymer {id}"
        )));
    }
    if let Some(&id) = r.uncovered.first() {
        return Err(Error::InvalidModel(format!(
            "polymer {id} is not covered by any clique"
        )));
    }
    if let Some(&(c, a, b)) = r.compatible_pairs.first() {
        return Err(Error::InvalidModel(format!(
            "clique {c} contains compatible polymers {a} and {b}"
        )));
    }
    Ok(())
}
