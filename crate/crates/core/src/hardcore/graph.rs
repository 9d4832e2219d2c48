//! Bipartite graphs, plain graphs and graph squares.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "L",
            Side::Right => "R",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l" | "left" => Ok(Side::Left),
            "r" | "right" => Ok(Side::Right),
            _ => Err(Error::Input(format!("unknown side '{s}'"))),
        }
    }
}

/// Undirected simple graph on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    /// Loops and repeated edges are dropped.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Graph(format!("edge ({a}, {b}) leaves 0..{n}")));
            }
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { adj })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    /// Graph with an edge between every pair at distance 1 or 2.
    pub fn square(&self) -> SimpleGraph {
        let adj = (0..self.n())
            .map(|v| {
                let mut reach: Vec<usize> = self.adj[v]
                    .iter()
                    .flat_map(|&u| std::iter::once(u).chain(self.adj[u].iter().copied()))
                    .filter(|&u| u != v)
                    .collect();
                reach.sort_unstable();
                reach.dedup();
                reach
            })
            .collect();
        SimpleGraph { adj }
    }

    /// Whether `set` (nonempty) induces a connected subgraph.
    pub fn is_connected_subset(&self, set: &[usize]) -> bool {
        let Some(&start) = set.first() else {
            return false;
        };
        let mut seen = vec![start];
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if set.contains(&u) && !seen.contains(&u) {
                    seen.push(u);
                    stack.push(u);
                }
            }
        }
        let mut distinct = set.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        seen.len() == distinct.len()
    }
}

/// Bipartite graph with sides `L = 0..n_left` and `R = 0..n_right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    edges: Vec<(usize, usize)>,
    left_adj: Vec<Vec<usize>>,
    right_adj: Vec<Vec<usize>>,
    max_degree: usize,
}

impl BipartiteGraph {
    /// Edges are `(left, right)` pairs.
    pub fn new(n_left: usize, n_right: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut left_adj = vec![Vec::new(); n_left];
        let mut right_adj = vec![Vec::new(); n_right];
        for &(l, r) in edges {
            if l >= n_left || r >= n_right {
                return Err(Error::Graph(format!(
                    "edge ({l}, {r}) outside a {n_left} x {n_right} bipartition"
                )));
            }
            left_adj[l].push(r);
            right_adj[r].push(l);
        }
        for list in left_adj.iter_mut().chain(right_adj.iter_mut()) {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Graph("duplicate edge".into()));
            }
        }
        let mut edges = edges.to_vec();
        edges.sort_unstable();
        let max_degree = left_adj
            .iter()
            .chain(&right_adj)
            .map(Vec::len)
            .max()
            .unwrap_or(0);
        Ok(Self {
            n_left,
            n_right,
            edges,
            left_adj,
            right_adj,
            max_degree,
        })
    }

    /// Parses the text format: a header line `n_left n_right`, then one
    /// `u v` edge per line with `u` on the left and `v` on the right.
    /// Blank lines and everything after `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header = None;
        let mut edges = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(parse_err(format!("expected two integers, found '{line}'")));
            }
            let a: usize = fields[0]
                .parse()
                .map_err(|_| parse_err(format!("'{}' is not a vertex index", fields[0])))?;
            let b: usize = fields[1]
                .parse()
                .map_err(|_| parse_err(format!("'{}' is not a vertex index", fields[1])))?;
            match header {
                None => header = Some((a, b)),
                Some((nl, nr)) => {
                    if a >= nl {
                        return Err(parse_err(format!("left vertex {a} out of range 0..{nl}")));
                    }
                    if b >= nr {
                        return Err(parse_err(format!("right vertex {b} out of range 0..{nr}")));
                    }
                    if !seen.insert((a, b)) {
                        return Err(parse_err(format!("duplicate edge {a} {b}")));
                    }
                    edges.push((a, b));
                }
            }
        }
        let (nl, nr) = header.ok_or(Error::Parse {
            line: 1,
            message: "missing 'n_left n_right' header".into(),
        })?;
        Self::new(nl, nr, &edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n_left, self.n_right);
        for &(l, r) in &self.edges {
            out.push_str(&format!("{l} {r}\n"));
        }
        out
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn n(&self) -> usize {
        self.n_left + self.n_right
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn side_len(&self, side: Side) -> usize {
        match side {
            Side::Left => self.n_left,
            Side::Right => self.n_right,
        }
    }

    /// Neighbors (on the other side) of vertex `v` of `side`.
    pub fn neighbors(&self, side: Side, v: usize) -> &[usize] {
        match side {
            Side::Left => &self.left_adj[v],
            Side::Right => &self.right_adj[v],
        }
    }

    /// `N_G(S)` for `S` on `side`, sorted.
    pub fn neighborhood(&self, side: Side, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set
            .iter()
            .flat_map(|&v| self.neighbors(side, v).iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Global index: left vertices first, then right ones.
    pub fn global(&self, side: Side, v: usize) -> usize {
        match side {
            Side::Left => v,
            Side::Right => self.n_left + v,
        }
    }

    pub fn to_simple(&self) -> SimpleGraph {
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(l, r)| (l, self.n_left + r))
            .collect();
        SimpleGraph::new(self.n(), &edges).expect("edges are in range")
    }

    /// `G²` induced on one side: two vertices are adjacent iff they share a
    /// neighbor.
    pub fn side_square(&self, side: Side) -> SimpleGraph {
        let n = self.side_len(side);
        let mut edges = Vec::new();
        for u in 0..self.side_len(side.other()) {
            let nb = self.neighbors(side.other(), u);
            for (i, &a) in nb.iter().enumerate() {
                edges.extend(nb[i + 1..].iter().map(|&b| (a, b)));
            }
        }
        SimpleGraph::new(n, &edges).expect("edges are in range")
    }
}

/// Full `G²` of a bipartite graph, in global vertex numbering.
pub fn square_graph(g: &BipartiteGraph) -> SimpleGraph {
    g.to_simple().square()
}

/// Largest side size the brute-force expansion check accepts.
pub const EXPANDER_CHECK_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpanderWitness {
    pub side: Side,
    pub set: Vec<usize>,
    pub neighborhood_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanderCheck {
    pub alpha: f64,
    pub is_expander: bool,
    pub witness: Option<ExpanderWitness>,
}

/// Checks `|N_G(S)| ≥ (1+α)|S|` for every nonempty `S` with
/// `|S| ≤ ⌊|P_i|/2⌋` on both sides, by enumeration.
pub fn check_bipartite_expander(g: &BipartiteGraph, alpha: f64) -> Result<ExpanderCheck> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Input(format!("alpha = {alpha} is not in (0, 1]")));
    }
    for side in [Side::Left, Side::Right] {
        let n = g.side_len(side);
        if n > EXPANDER_CHECK_CAP {
            return Err(Error::EnumerationCap {
                count: n,
                cap: EXPANDER_CHECK_CAP,
            });
        }
        let masks: Vec<u64> = (0..n)
            .map(|v| g.neighbors(side, v).iter().fold(0u64, |m, &u| m | 1 << u))
            .collect();
        let small = n / 2;
        for set in 1u64..(1u64 << n) {
            let size = set.count_ones() as usize;
            if size > small {
                continue;
            }
            let mut nb = 0u64;
            let mut bits = set;
            while bits != 0 {
                nb |= masks[bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
            let nsize = nb.count_ones() as usize;
            if (nsize as f64) < (1.0 + alpha) * size as f64 {
                return Ok(ExpanderCheck {
                    alpha,
                    is_expander: false,
                    witness: Some(ExpanderWitness {
                        side,
                        set: (0..n).filter(|&v| set >> v & 1 == 1).collect(),
                        neighborhood_size: nsize,
                    }),
                });
            }
        }
    }
    Ok(ExpanderCheck {
        alpha,
        is_expander: true,
        witness: None,
    })
}
