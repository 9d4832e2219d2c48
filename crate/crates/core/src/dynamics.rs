//! The polymer clique dynamics.
//!
//! One step picks a clique `Λ_i` uniformly, draws from the Gibbs
//! distribution restricted to `Λ_i`, then removes the state's member of
//! `Λ_i` (empty draw) or adds the drawn polymer if the result is still a
//! family.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use rand::Rng;

use crate::cover::{clique_distribution, CliqueCover};
use crate::error::{Error, Result};
use crate::family::{enumerate_families_with_cap, gibbs_distribution, DEFAULT_ENUMERATION_CAP};
use crate::model::{PolymerFamily, PolymerModel};
use crate::rng;

/// Result of drawing from a clique distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliqueOutcome {
    Empty,
    Polymer(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainState {
    present: Vec<bool>,
    /// Member of each clique, if any. A family has at most one.
    occupancy: Vec<Option<usize>>,
}

impl ChainState {
    pub fn empty(model: &PolymerModel, cover: &CliqueCover) -> Self {
        Self {
            present: vec![false; model.len()],
            occupancy: vec![None; cover.m()],
        }
    }

    pub fn from_family(
        model: &PolymerModel,
        cover: &CliqueCover,
        family: &PolymerFamily,
    ) -> Result<Self> {
        if !model.is_valid_family(family.members())? {
            return Err(Error::InvalidFamily(format!(
                "{family} contains an incompatible pair"
            )));
        }
        let mut state = Self::empty(model, cover);
        for &p in family.members() {
            state.present[p] = true;
        }
        for (i, c) in cover.cliques().iter().enumerate() {
            let mut members = c.iter().filter(|&&p| p < model.len() && state.present[p]);
            state.occupancy[i] = members.next().copied();
            if let Some(&extra) = members.next() {
                return Err(Error::InvalidFamily(format!(
                    "{family} holds {} and {extra} from clique {i}",
                    state.occupancy[i].unwrap()
                )));
            }
        }
        Ok(state)
    }

    pub fn family(&self) -> PolymerFamily {
        PolymerFamily::from_ids(
            self.present
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
        )
    }

    pub fn contains(&self, id: usize) -> bool {
        self.present[id]
    }

    pub fn occupant(&self, clique: usize) -> Option<usize> {
        self.occupancy[clique]
    }

    pub fn len(&self) -> usize {
        self.present.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
struct CliqueSampler {
    ids: Vec<usize>,
    /// `cdf[0]` is the probability of the empty draw, `cdf[k]` adds `ids[..k]`.
    cdf: Vec<f64>,
}

impl CliqueSampler {
    fn draw(&self, u: f64) -> CliqueOutcome {
        let k = self.cdf.partition_point(|&c| c <= u);
        if k == 0 {
            CliqueOutcome::Empty
        } else {
            CliqueOutcome::Polymer(self.ids[(k - 1).min(self.ids.len() - 1)])
        }
    }
}

/// Precomputed clique distributions for one model and cover.
#[derive(Debug, Clone)]
pub struct CliqueDynamics<'a> {
    model: &'a PolymerModel,
    cover: &'a CliqueCover,
    samplers: Vec<CliqueSampler>,
    memberships: Vec<Vec<usize>>,
}

impl<'a> CliqueDynamics<'a> {
    pub fn new(model: &'a PolymerModel, cover: &'a CliqueCover) -> Result<Self> {
        crate::cover::require_valid_cover(model, cover)?;
        let samplers = (0..cover.m())
            .map(|i| {
                let d = clique_distribution(model, cover, i)?;
                let mut cdf = Vec::with_capacity(d.p_polymer.len() + 1);
                let mut acc = d.p_empty;
                cdf.push(acc);
                for &(_, p) in &d.p_polymer {
                    acc += p;
                    cdf.push(acc);
                }
                Ok(CliqueSampler {
                    ids: d.p_polymer.iter().map(|&(id, _)| id).collect(),
                    cdf,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            model,
            cover,
            samplers,
            memberships: cover.memberships(model.len()),
        })
    }

    pub fn model(&self) -> &PolymerModel {
        self.model
    }

    pub fn cover(&self) -> &CliqueCover {
        self.cover
    }

    pub fn empty_state(&self) -> ChainState {
        ChainState::empty(self.model, self.cover)
    }

    /// Applies the update for clique `clique` with a given draw. This is the
    /// deterministic half of a step.
    pub fn apply_draw(&self, state: &mut ChainState, clique: usize, outcome: CliqueOutcome) {
        match outcome {
            CliqueOutcome::Empty => {
                if let Some(p) = state.occupancy[clique] {
                    state.present[p] = false;
                    for &c in &self.memberships[p] {
                        state.occupancy[c] = None;
                    }
                }
            }
            CliqueOutcome::Polymer(p) => {
                if state.present[p] {
                    return;
                }
                if self.model.neighbors(p).iter().any(|&q| state.present[q]) {
                    return;
                }
                state.present[p] = true;
                for &c in &self.memberships[p] {
                    state.occupancy[c] = Some(p);
                }
            }
        }
    }

    /// Draws a clique index and an outcome.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(usize, CliqueOutcome)> {
        if self.samplers.is_empty() {
            return None;
        }
        let i = rng.gen_range(0..self.samplers.len());
        let u: f64 = rng.gen();
        Some((i, self.samplers[i].draw(u)))
    }

    pub fn step<R: Rng + ?Sized>(&self, state: &mut ChainState, rng: &mut R) {
        if let Some((i, outcome)) = self.draw(rng) {
            self.apply_draw(state, i, outcome);
        }
    }

    pub fn run<R: Rng + ?Sized>(&self, state: &mut ChainState, steps: u64, rng: &mut R) {
        for _ in 0..steps {
            self.step(state, rng);
        }
    }

    /// Runs the chain and counts the state reached after every step.
    pub fn run_traced<R: Rng + ?Sized>(
        &self,
        state: &mut ChainState,
        steps: u64,
        rng: &mut R,
    ) -> BTreeMap<PolymerFamily, u64> {
        let mut visits = BTreeMap::new();
        for _ in 0..steps {
            self.step(state, rng);
            *visits.entry(state.family()).or_insert(0) += 1;
        }
        visits
    }

    /// Writes `step,family` rows (family as space-separated sorted ids),
    /// starting with the initial state at step 0.
    pub fn write_trajectory<R: Rng + ?Sized, W: Write>(
        &self,
        state: &mut ChainState,
        steps: u64,
        rng: &mut R,
        out: &mut W,
    ) -> std::io::Result<()> {
        writeln!(out, "step,family")?;
        let row = |out: &mut W, t: u64, s: &ChainState| {
            let ids: Vec<String> = s.family().members().iter().map(|i| i.to_string()).collect();
            writeln!(out, "{t},{}", ids.join(" "))
        };
        row(out, 0, state)?;
        for t in 1..=steps {
            self.step(state, rng);
            row(out, t, state)?;
        }
        Ok(())
    }
}

/// Output of [`run_chain`].
#[derive(Debug, Clone)]
pub struct ChainRun {
    pub state: ChainState,
    pub visits: Option<BTreeMap<PolymerFamily, u64>>,
}

pub fn chain_step<R: Rng + ?Sized>(
    model: &PolymerModel,
    cover: &CliqueCover,
    state: &mut ChainState,
    rng: &mut R,
) -> Result<()> {
    CliqueDynamics::new(model, cover)?.step(state, rng);
    Ok(())
}

pub fn run_chain<R: Rng + ?Sized>(
    model: &PolymerModel,
    cover: &CliqueCover,
    steps: u64,
    initial: ChainState,
    rng: &mut R,
    trace: bool,
) -> Result<ChainRun> {
    let dynamics = CliqueDynamics::new(model, cover)?;
    let mut state = initial;
    let visits = if trace {
        if model.len() > DEFAULT_ENUMERATION_CAP {
            return Err(Error::EnumerationCap {
                count: model.len(),
                cap: DEFAULT_ENUMERATION_CAP,
            });
        }
        Some(dynamics.run_traced(&mut state, steps, rng))
    } else {
        dynamics.run(&mut state, steps, rng);
        None
    };
    Ok(ChainRun { state, visits })
}

/// Transition matrix over all families, stored by rows of nonzero entries
/// (column index, probability), diagonal included.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    pub states: Vec<PolymerFamily>,
    pub rows: Vec<Vec<(usize, f64)>>,
    index: HashMap<PolymerFamily, usize>,
}

impl TransitionMatrix {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, family: &PolymerFamily) -> Option<usize> {
        self.index.get(family).copied()
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.rows[from]
            .iter()
            .find(|&&(j, _)| j == to)
            .map_or(0.0, |&(_, p)| p)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0.0; n];
                for &(j, p) in row {
                    dense[j] = p;
                }
                dense
            })
            .collect()
    }

    /// `x P` for a row vector `x`.
    pub fn left_multiply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for &(j, p) in row {
                out[j] += xi * p;
            }
        }
        out
    }

    /// Distribution after `steps` steps from a point mass on `start`.
    pub fn transient(&self, start: usize, steps: u64) -> Vec<f64> {
        let mut x = vec![0.0; self.len()];
        x[start] = 1.0;
        for _ in 0..steps {
            x = self.left_multiply(&x);
        }
        x
    }

    /// Stationary vector by power iteration from the uniform distribution.
    /// Stops once successive iterates differ by at most `tol` in L1 or after
    /// `max_iter` iterations.
    pub fn stationary(&self, tol: f64, max_iter: usize) -> Vec<f64> {
        let n = self.len();
        let mut x = vec![1.0 / n as f64; n];
        for _ in 0..max_iter {
            let next = self.left_multiply(&x);
            let diff: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
            x = next;
            if diff <= tol {
                break;
            }
        }
        let total: f64 = x.iter().sum();
        x.iter().map(|v| v / total).collect()
    }
}

/// Exact transition matrix. Adding `γ` to `Γ` has probability
/// `w_γ z_γ / m` and removing it `z_γ / m`, with
/// `z_γ = Σ_{i: γ∈Λ_i} 1/Z_{Λ_i}`; the rest of each row sits on the
/// diagonal.
pub fn transition_matrix(model: &PolymerModel, cover: &CliqueCover) -> Result<TransitionMatrix> {
    transition_matrix_with_cap(model, cover, DEFAULT_ENUMERATION_CAP)
}

pub fn transition_matrix_with_cap(
    model: &PolymerModel,
    cover: &CliqueCover,
    cap: usize,
) -> Result<TransitionMatrix> {
    crate::cover::require_valid_cover(model, cover)?;
    let states = enumerate_families_with_cap(model, None, cap)?;
    let index: HashMap<PolymerFamily, usize> = states
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i))
        .collect();
    let m = cover.m() as f64;
    let mut z = vec![0.0; model.len()];
    for i in 0..cover.m() {
        let inv = (-cover.log_clique_partition(model, i)?).exp();
        for &p in cover.clique(i)? {
            z[p] += inv;
        }
    }
    let mut rows = Vec::with_capacity(states.len());
    for (si, fam) in states.iter().enumerate() {
        let mut row = Vec::new();
        let mut off = 0.0;
        for p in 0..model.len() {
            let (target, prob) = if fam.contains(p) {
                let rest: Vec<usize> = fam.members().iter().copied().filter(|&q| q != p).collect();
                (PolymerFamily::from_ids(rest), z[p] / m)
            } else {
                if fam.members().iter().any(|&q| model.is_incompatible(p, q)) {
                    continue;
                }
                let mut more = fam.members().to_vec();
                more.push(p);
                (
                    PolymerFamily::from_ids(more),
                    model.log_weight(p).exp() * z[p] / m,
                )
            };
            row.push((index[&target], prob));
            off += prob;
        }
        row.push((si, 1.0 - off));
        row.sort_by_key(|&(j, _)| j);
        rows.push(row);
    }
    Ok(TransitionMatrix {
        states,
        rows,
        index,
    })
}

/// Total variation between the end states of `trials` independent chains
/// run for `steps` steps from `initial` and the exact Gibbs distribution.
/// Trial `t` uses random stream `t` of `seed`.
pub fn empirical_tv(
    model: &PolymerModel,
    cover: &CliqueCover,
    steps: u64,
    trials: u64,
    initial: &PolymerFamily,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Input("trials must be at least 1".into()));
    }
    let (fams, probs) = gibbs_distribution(model, None, DEFAULT_ENUMERATION_CAP)?;
    let index: HashMap<&PolymerFamily, usize> =
        fams.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let dynamics = CliqueDynamics::new(model, cover)?;
    let start = ChainState::from_family(model, cover, initial)?;
    let run_one = |t: u64| {
        let mut rng = rng::stream(seed, t);
        let mut state = start.clone();
        dynamics.run(&mut state, steps, &mut rng);
        index[&state.family()]
    };
    let ends: Vec<usize> = crate::par::map_range(trials, run_one);
    let mut counts = vec![0u64; fams.len()];
    for e in ends {
        counts[e] += 1;
    }
    let tv = counts
        .iter()
        .zip(&probs)
        .map(|(&c, &p)| (c as f64 / trials as f64 - p).abs())
        .sum::<f64>()
        / 2.0;
    Ok(tv)
}
