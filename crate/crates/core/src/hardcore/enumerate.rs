//! Enumeration of connected vertex sets.
//!
//! Each set is reached by exactly one branch of an include/exclude search:
//! pick a frontier vertex, then either add it (growing the frontier by its
//! new neighbors) or ban it for the rest of the branch.

use super::graph::SimpleGraph;

/// All connected vertex sets that contain `v` and have at most `k`
/// vertices, each once, sorted ascending; the list is in lexicographic order.
pub fn enumerate_connected_sets(graph: &SimpleGraph, v: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut banned = vec![false; graph.n()];
    grow_from(graph, v, k, &mut banned, &mut |s| out.push(s.to_vec()));
    out.sort();
    out
}

/// Every connected vertex set with at most `k` vertices, each once,
/// sorted by (size, vertices).
pub fn enumerate_all_connected_sets(graph: &SimpleGraph, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut banned = vec![false; graph.n()];
    for v in 0..graph.n() {
        // sets are anchored at their smallest vertex
        for b in banned.iter_mut().take(v) {
            *b = true;
        }
        grow_from(graph, v, k, &mut banned, &mut |s| out.push(s.to_vec()));
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn grow_from<F: FnMut(&[usize])>(
    graph: &SimpleGraph,
    v: usize,
    k: usize,
    banned: &mut [bool],
    emit: &mut F,
) {
    if k == 0 || banned[v] {
        return;
    }
    let mut in_play = banned.to_vec();
    in_play[v] = true;
    let mut set = vec![v];
    let frontier: Vec<usize> = graph
        .neighbors(v)
        .iter()
        .copied()
        .filter(|&u| !in_play[u])
        .collect();
    for &u in &frontier {
        in_play[u] = true;
    }
    search(graph, k, &mut set, frontier, &mut in_play, emit);
}

/// `in_play` marks vertices that are in the set, on the frontier or banned.
fn search<F: FnMut(&[usize])>(
    graph: &SimpleGraph,
    k: usize,
    set: &mut Vec<usize>,
    mut frontier: Vec<usize>,
    in_play: &mut [bool],
    emit: &mut F,
) {
    if set.len() == k || frontier.is_empty() {
        let mut sorted = set.clone();
        sorted.sort_unstable();
        emit(&sorted);
        return;
    }
    let u = frontier.pop().expect("frontier is nonempty");

    // include u
    let added: Vec<usize> = graph
        .neighbors(u)
        .iter()
        .copied()
        .filter(|&w| !in_play[w])
        .collect();
    for &w in &added {
        in_play[w] = true;
    }
    let mut grown = frontier.clone();
    grown.extend_from_slice(&added);
    set.push(u);
    search(graph, k, set, grown, in_play, emit);
    set.pop();
    for &w in &added {
        in_play[w] = false;
    }

    // exclude u: it stays marked, so no later step can add it
    search(graph, k, set, frontier, in_play, emit);
}

/// Upper bound `e^k Δ^{k-1} / (k^{3/2} √(2π))` on the number of connected
/// sets of exactly `k` vertices containing a fixed vertex, in a graph of
/// maximum degree `Δ`.
pub fn connected_set_count_bound(max_degree: usize, k: usize) -> f64 {
    let power = if k == 1 {
        1.0
    } else {
        (max_degree as f64).powi(k as i32 - 1)
    };
    let k = k as f64;
    k.exp() * power / (k.powf(1.5) * (2.0 * std::f64::consts::PI).sqrt())
}
