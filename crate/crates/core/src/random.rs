//! Seeded generators for random polymer models and bipartite graphs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cover::CliqueCover;
use crate::hardcore::BipartiteGraph;
use crate::model::{Polymer, PolymerModel};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomModelSpec {
    pub polymers: usize,
    /// Number of cliques in the cover. Each clique gets at least one polymer
    /// when `polymers >= cliques`.
    pub cliques: usize,
    /// Probability of an incompatibility between polymers of different cliques.
    pub cross_density: f64,
    /// Probability that a polymer also joins a second clique.
    pub overlap: f64,
    /// Log weights are drawn uniformly from this range.
    pub log_weight: (f64, f64),
    /// Integer sizes drawn uniformly from this inclusive range.
    pub size: (u32, u32),
}

impl Default for RandomModelSpec {
    fn default() -> Self {
        Self {
            polymers: 6,
            cliques: 3,
            cross_density: 0.2,
            overlap: 0.1,
            log_weight: (-3.0, 0.0),
            size: (1, 1),
        }
    }
}

/// A random model together with a valid clique cover.
pub fn random_model<R: Rng + ?Sized>(
    spec: &RandomModelSpec,
    rng: &mut R,
) -> (PolymerModel, CliqueCover) {
    let n = spec.polymers;
    let m = spec.cliques.max(usize::from(n > 0));
    let mut home: Vec<usize> = (0..n)
        .map(|i| if i < m { i } else { rng.gen_range(0..m) })
        .collect();
    home.shuffle(rng);
    let mut cliques: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (p, &c) in home.iter().enumerate() {
        cliques[c].push(p);
    }
    let mut pairs = Vec::new();
    for c in &cliques {
        for (i, &a) in c.iter().enumerate() {
            pairs.extend(c[i + 1..].iter().map(|&b| (a, b)));
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if home[a] != home[b] && rng.gen_bool(spec.cross_density.clamp(0.0, 1.0)) {
                pairs.push((a, b));
            }
        }
    }
    if m > 1 {
        for p in 0..n {
            if rng.gen_bool(spec.overlap.clamp(0.0, 1.0)) {
                let mut c = rng.gen_range(0..m - 1);
                if c >= home[p] {
                    c += 1;
                }
                pairs.extend(cliques[c].iter().map(|&q| (p, q)));
                cliques[c].push(p);
            }
        }
    }
    let (lo, hi) = spec.log_weight;
    let polymers = (0..n)
        .map(|i| {
            let lw = if hi > lo { rng.gen_range(lo..hi) } else { lo };
            let size = rng.gen_range(spec.size.0..=spec.size.1.max(spec.size.0));
            Polymer::new(i, lw).with_size(size as f64)
        })
        .collect();
    let model = PolymerModel::new(polymers, &pairs).expect("generated model is valid");
    (model, CliqueCover::new(cliques))
}

/// Bipartite graph with each of the `n_left * n_right` edges present
/// independently with probability `p`.
pub fn random_bipartite<R: Rng + ?Sized>(
    n_left: usize,
    n_right: usize,
    p: f64,
    rng: &mut R,
) -> BipartiteGraph {
    let mut edges = Vec::new();
    for l in 0..n_left {
        for r in 0..n_right {
            if rng.gen_bool(p.clamp(0.0, 1.0)) {
                edges.push((l, r));
            }
        }
    }
    BipartiteGraph::new(n_left, n_right, &edges).expect("generated graph is valid")
}
