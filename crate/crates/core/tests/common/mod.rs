//! Brute-force oracles shared by the integration tests. Each one is written
//! independently of the library code it checks.

#![allow(dead_code)]

use std::collections::HashMap;

use polymer_core::hardcore::{BipartiteGraph, SimpleGraph};
use polymer_core::{CliqueCover, PolymerModel};

/// All valid families as bitmasks, by filtering all `2^n` subsets.
pub fn families_by_filter(model: &PolymerModel) -> Vec<u32> {
    let n = model.len();
    (0u32..1 << n)
        .filter(|&mask| {
            (0..n).all(|a| {
                (a + 1..n).all(|b| {
                    mask >> a & 1 == 0 || mask >> b & 1 == 0 || !model.is_incompatible(a, b)
                })
            })
        })
        .collect()
}

pub fn mask_members(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

pub fn mask_weight(model: &PolymerModel, mask: u32) -> f64 {
    mask_members(mask)
        .iter()
        .map(|&i| model.log_weight(i).exp())
        .product()
}

/// Plain-double partition function over families inside `allowed` (bitmask).
pub fn z_by_filter(model: &PolymerModel, allowed: u32) -> f64 {
    families_by_filter(model)
        .into_iter()
        .filter(|&f| f & !allowed == 0)
        .map(|f| mask_weight(model, f))
        .sum()
}

pub fn full_mask(n: usize) -> u32 {
    if n == 0 {
        0
    } else {
        u32::MAX >> (32 - n)
    }
}

/// Transition probabilities obtained by walking through every
/// (clique, outcome) pair of one step and applying the update rule.
pub fn step_matrix(model: &PolymerModel, cover: &CliqueCover) -> HashMap<(u32, u32), f64> {
    let m = cover.m() as f64;
    let mut out = HashMap::new();
    for fam in families_by_filter(model) {
        for clique in cover.cliques() {
            let zl: f64 = 1.0
                + clique
                    .iter()
                    .map(|&p| model.log_weight(p).exp())
                    .sum::<f64>();
            // empty outcome
            let mut next = fam;
            for &p in clique {
                next &= !(1 << p);
            }
            *out.entry((fam, next)).or_insert(0.0) += 1.0 / (m * zl);
            for &p in clique {
                let w = model.log_weight(p).exp();
                let candidate = fam | 1 << p;
                let valid = mask_members(candidate)
                    .iter()
                    .all(|&q| q == p || !model.is_incompatible(p, q));
                let next = if valid { candidate } else { fam };
                *out.entry((fam, next)).or_insert(0.0) += w / (m * zl);
            }
        }
    }
    out
}

/// Connected subsets containing `v` of size at most `k`, by filtering all
/// subsets of the vertex set.
pub fn connected_sets_by_filter(g: &SimpleGraph, v: usize, k: usize) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        if mask >> v & 1 == 0 || mask.count_ones() as usize > k {
            continue;
        }
        let set = mask_members(mask);
        // flood fill inside the mask
        let mut reached = 1u32 << v;
        loop {
            let mut grown = reached;
            for u in mask_members(reached) {
                for &w in g.neighbors(u) {
                    if mask >> w & 1 == 1 {
                        grown |= 1 << w;
                    }
                }
            }
            if grown == reached {
                break;
            }
            reached = grown;
        }
        if reached == mask {
            out.push(set);
        }
    }
    out.sort();
    out
}

/// Distance-at-most-2 pairs by breadth-first search from every vertex.
pub fn square_pairs_by_bfs(g: &SimpleGraph) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for s in 0..g.n() {
        let mut dist = vec![usize::MAX; g.n()];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        for t in s + 1..g.n() {
            if dist[t] <= 2 {
                out.push((s, t));
            }
        }
    }
    out
}

/// Independent sets of a bipartite graph as bitmasks over global vertex
/// indices (left first).
pub fn independent_sets(g: &BipartiteGraph) -> Vec<u32> {
    let n = g.n();
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(l, r)| (l, g.n_left() + r))
        .collect();
    (0u32..1 << n)
        .filter(|&mask| {
            edges
                .iter()
                .all(|&(a, b)| mask >> a & 1 == 0 || mask >> b & 1 == 0)
        })
        .collect()
}

/// `share[a][b]`: vertices `a != b` of one side have a common neighbor,
/// read straight off the edge list.
pub fn side_share_matrix(g: &BipartiteGraph, left: bool) -> Vec<Vec<bool>> {
    let n = if left { g.n_left() } else { g.n_right() };
    let mut share = vec![vec![false; n]; n];
    for &(l1, r1) in g.edges() {
        for &(l2, r2) in g.edges() {
            let (a, b, same_hub) = if left {
                (l1, l2, r1 == r2)
            } else {
                (r1, r2, l1 == l2)
            };
            if same_hub && a != b {
                share[a][b] = true;
            }
        }
    }
    share
}

/// Connected components of `set` under the `share` relation.
pub fn components(set: &[usize], share: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; set.len()];
    let mut count = 0;
    for i in 0..set.len() {
        if comp[i] != usize::MAX {
            continue;
        }
        comp[i] = count;
        let mut stack = vec![i];
        while let Some(x) = stack.pop() {
            for j in 0..set.len() {
                if comp[j] == usize::MAX && share[set[x]][set[j]] {
                    comp[j] = count;
                    stack.push(j);
                }
            }
        }
        count += 1;
    }
    (0..count)
        .map(|c| {
            (0..set.len())
                .filter(|&j| comp[j] == c)
                .map(|j| set[j])
                .collect()
        })
        .collect()
}
