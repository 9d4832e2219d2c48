//! Partition-function estimation by clique-wise self-reducibility.
//!
//! With `U_0 = ∅` and `U_i = U_{i-1} ∪ Λ_i`, the ratio
//! `r_i = Z(U_{i-1})/Z(U_i)` is the probability that a Gibbs sample on
//! `U_i` avoids `Λ_i \ U_{i-1}`, and `Z = 1/Π r_i`. Each ratio is estimated
//! from `s` approximate samples produced by the clique dynamics on the
//! cliques `Λ_1..Λ_i`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::conditions::{check_clique_dynamics, mixing_time_bound};
use crate::cover::{require_valid_cover, CliqueCover};
use crate::dynamics::{transition_matrix_with_cap, ChainState, CliqueDynamics};
use crate::error::{Error, Result};
use crate::family::DEFAULT_ENUMERATION_CAP;
use crate::model::{PolymerFamily, PolymerModel};
use crate::rng;

/// Samples per ratio and the sampling accuracy used for each sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSchedule {
    pub s: u64,
    pub epsilon_s: f64,
}

/// `s = 1 + ⌈125 Z_max m / ε²⌉` and `ε_s = ε / (5 Z_max m)`.
///
/// Values of `125 Z_max m / ε²` within a relative `1e-9` of an integer are
/// treated as that integer, so decimal inputs such as `ε = 0.2` are not
/// pushed up by one through rounding noise.
pub fn sample_schedule(z_max: f64, m: usize, epsilon: f64) -> Result<SampleSchedule> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Input(format!(
            "epsilon = {epsilon} is not in (0, 1]"
        )));
    }
    if !(z_max >= 1.0) || !z_max.is_finite() {
        return Err(Error::Input(format!("Z_max = {z_max} must be at least 1")));
    }
    let x = 125.0 * z_max * m as f64 / (epsilon * epsilon);
    let nearest = x.round();
    let ceil = if (x - nearest).abs() <= 1e-9 * x.max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    let s = if ceil >= u64::MAX as f64 {
        u64::MAX
    } else {
        1 + ceil as u64
    };
    Ok(SampleSchedule {
        s,
        epsilon_s: epsilon / (5.0 * z_max * m.max(1) as f64),
    })
}

/// How approximate samples of the restricted Gibbs distributions are drawn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerBackend {
    /// Simulate one chain per sample.
    #[default]
    Simulate,
    /// Compute the exact law of the chain after the prescribed number of
    /// steps by repeated multiplication with the transition matrix, then draw
    /// from it. Samples have the same distribution as `Simulate`; only
    /// feasible below the enumeration cap.
    ExactTransient,
}

impl std::str::FromStr for SamplerBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simulate" => Ok(Self::Simulate),
            "exact-transient" => Ok(Self::ExactTransient),
            _ => Err(Error::Input(format!("unknown sampler backend '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub backend: SamplerBackend,
    /// Replaces the schedule's `s`. The accuracy guarantee only holds
    /// for the scheduled value.
    pub samples_override: Option<u64>,
    pub cap: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            backend: SamplerBackend::Simulate,
            samples_override: None,
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    /// One-based clique index.
    pub i: usize,
    pub r_hat: f64,
    pub hits: u64,
    /// Chain steps per sample; 0 when the ratio is exactly 1.
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub log_z_hat: f64,
    pub epsilon: f64,
    pub s: u64,
    pub epsilon_s: f64,
    pub z_max: f64,
    pub m: usize,
    pub ratios: Vec<RatioEstimate>,
    pub root_seed: u64,
}

impl EstimateResult {
    pub fn z_hat(&self) -> f64 {
        self.log_z_hat.exp()
    }
}

/// Draws one family approximately from the Gibbs distribution by running the
/// chain from the empty family for the mixing bound at `epsilon`. Refuses
/// models where the clique dynamics condition fails for `f`.
pub fn sample_gibbs<R: Rng + ?Sized>(
    model: &PolymerModel,
    cover: &CliqueCover,
    f: &[f64],
    epsilon: f64,
    rng: &mut R,
) -> Result<PolymerFamily> {
    check_clique_dynamics(model, f)?.require()?;
    let bound = mixing_time_bound(model, cover, f, epsilon)?;
    let dynamics = CliqueDynamics::new(model, cover)?;
    let mut state = dynamics.empty_state();
    dynamics.run(&mut state, bound.steps, rng);
    Ok(state.family())
}

pub fn approximate_partition_function(
    model: &PolymerModel,
    cover: &CliqueCover,
    f: &[f64],
    epsilon: f64,
    seed: u64,
    config: &EstimatorConfig,
) -> Result<EstimateResult> {
    PreparedEstimator::new(model, cover, f, epsilon, config)?.run(seed)
}

#[derive(Debug, Clone)]
enum StageSampler {
    /// `Λ_i` adds no polymer, so `r_i = 1`.
    Trivial,
    Simulate {
        model: PolymerModel,
        cover: CliqueCover,
        /// Polymers (in sub-model ids) of `Λ_i \ U_{i-1}`.
        fresh: Vec<bool>,
    },
    Transient {
        cdf: Vec<f64>,
        /// Whether each state avoids `Λ_i \ U_{i-1}`.
        good: Vec<bool>,
    },
}

#[derive(Debug, Clone)]
struct Stage {
    steps: u64,
    sampler: StageSampler,
}

/// Everything about an estimate that does not depend on the seed: the
/// schedule, the restricted models with their chain lengths, and (for the
/// exact-transient backend) the sampling laws. Reuse it for repeated runs.
#[derive(Debug, Clone)]
pub struct PreparedEstimator {
    epsilon: f64,
    s: u64,
    schedule: SampleSchedule,
    z_max: f64,
    m: usize,
    stages: Vec<Stage>,
}

impl PreparedEstimator {
    /// Checks the cover and the clique dynamics condition for `f`, then
    /// builds the restricted chain for every prefix `Λ_1..Λ_i`.
    pub fn new(
        model: &PolymerModel,
        cover: &CliqueCover,
        f: &[f64],
        epsilon: f64,
        config: &EstimatorConfig,
    ) -> Result<Self> {
        require_valid_cover(model, cover)?;
        check_clique_dynamics(model, f)?.require()?;
        let m = cover.m();
        let z_max = cover.z_max(model);
        let schedule = sample_schedule(z_max, m, epsilon)?;
        let s = config.samples_override.unwrap_or(schedule.s);
        if s == 0 {
            return Err(Error::Input("sample count must be positive".into()));
        }
        let mut stages = Vec::with_capacity(m);
        let mut seen = vec![false; model.len()];
        for i in 0..m {
            let fresh: Vec<usize> = cover.cliques()[i]
                .iter()
                .copied()
                .filter(|&p| !seen[p])
                .collect();
            for &p in &cover.cliques()[i] {
                seen[p] = true;
            }
            if fresh.is_empty() {
                stages.push(Stage {
                    steps: 0,
                    sampler: StageSampler::Trivial,
                });
                continue;
            }
            let union = cover.prefix_union(i + 1);
            let (sub, new_to_old) = model.induced(&union)?;
            let mut old_to_new = vec![usize::MAX; model.len()];
            for (new, &old) in new_to_old.iter().enumerate() {
                old_to_new[old] = new;
            }
            let sub_cover = CliqueCover::new(
                cover.cliques()[..=i]
                    .iter()
                    .map(|c| c.iter().map(|&p| old_to_new[p]).collect())
                    .collect(),
            );
            let sub_f: Vec<f64> = new_to_old.iter().map(|&old| f[old]).collect();
            let mut is_fresh = vec![false; sub.len()];
            for &p in &fresh {
                is_fresh[old_to_new[p]] = true;
            }
            let steps = mixing_time_bound(&sub, &sub_cover, &sub_f, schedule.epsilon_s)?.steps;
            let sampler = match config.backend {
                SamplerBackend::Simulate => StageSampler::Simulate {
                    model: sub,
                    cover: sub_cover,
                    fresh: is_fresh,
                },
                SamplerBackend::ExactTransient => {
                    let matrix = transition_matrix_with_cap(&sub, &sub_cover, config.cap)?;
                    let start = matrix
                        .index_of(&PolymerFamily::empty())
                        .expect("empty family is a state");
                    let law = matrix.transient(start, steps);
                    let mut acc = 0.0;
                    let cdf = law
                        .iter()
                        .map(|&p| {
                            acc += p;
                            acc
                        })
                        .collect();
                    let good = matrix
                        .states
                        .iter()
                        .map(|fam| fam.members().iter().all(|&p| !is_fresh[p]))
                        .collect();
                    StageSampler::Transient { cdf, good }
                }
            };
            stages.push(Stage { steps, sampler });
        }
        Ok(Self {
            epsilon,
            s,
            schedule,
            z_max,
            m,
            stages,
        })
    }

    pub fn samples(&self) -> u64 {
        self.s
    }

    /// Chain steps per sample for every ratio.
    pub fn steps(&self) -> Vec<u64> {
        self.stages.iter().map(|st| st.steps).collect()
    }

    /// One estimate. Ratio `i` draws from streams of `child_seed(seed, i)`.
    pub fn run(&self, seed: u64) -> Result<EstimateResult> {
        let s = self.s;
        let mut ratios = Vec::with_capacity(self.m);
        let mut log_z_hat = 0.0;
        for (i, stage) in self.stages.iter().enumerate() {
            let ratio_seed = rng::child_seed(seed, i as u64);
            let hits = match &stage.sampler {
                StageSampler::Trivial => s,
                StageSampler::Simulate {
                    model,
                    cover,
                    fresh,
                } => {
                    let dynamics = CliqueDynamics::new(model, cover)?;
                    let outcomes = crate::par::map_range(s, |j| {
                        let mut r = rng::stream(ratio_seed, j);
                        let mut state = dynamics.empty_state();
                        dynamics.run(&mut state, stage.steps, &mut r);
                        avoids(&state, fresh)
                    });
                    outcomes.into_iter().filter(|&b| b).count() as u64
                }
                StageSampler::Transient { cdf, good } => {
                    let total = *cdf.last().expect("at least one state");
                    let mut r = rng::stream(ratio_seed, 0);
                    (0..s)
                        .filter(|_| {
                            let u: f64 = r.gen::<f64>() * total;
                            good[cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)]
                        })
                        .count() as u64
                }
            };
            if hits == 0 {
                return Err(Error::DegenerateRatio {
                    clique: i + 1,
                    samples: s,
                });
            }
            let r_hat = hits as f64 / s as f64;
            log_z_hat -= r_hat.ln();
            ratios.push(RatioEstimate {
                i: i + 1,
                r_hat,
                hits,
                steps: stage.steps,
            });
        }
        Ok(EstimateResult {
            log_z_hat,
            epsilon: self.epsilon,
            s,
            epsilon_s: self.schedule.epsilon_s,
            z_max: self.z_max,
            m: self.m,
            ratios,
            root_seed: seed,
        })
    }
}

fn avoids(state: &ChainState, is_fresh: &[bool]) -> bool {
    is_fresh
        .iter()
        .enumerate()
        .all(|(p, &fresh)| !fresh || !state.contains(p))
}

/// Number of runs used by [`median_amplify`]: `⌈48 ln(1/δ)⌉`.
pub fn amplification_runs(delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Input(format!("delta = {delta} is not in (0, 1)")));
    }
    Ok((48.0 * (1.0 / delta).ln()).ceil().max(1.0) as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplifiedEstimate {
    /// The run whose `log_z_hat` is the (lower) median.
    pub median: EstimateResult,
    pub runs: u64,
    /// `log_z_hat` of every run, in run order.
    pub log_z_hats: Vec<f64>,
}

/// Runs `estimate(child_seed)` independently [`amplification_runs`] times
/// and keeps the median by `log_z_hat`. Any run's error is returned.
pub fn median_amplify<F>(delta: f64, seed: u64, estimate: F) -> Result<AmplifiedEstimate>
where
    F: Fn(u64) -> Result<EstimateResult> + Sync + Send,
{
    let runs = amplification_runs(delta)?;
    let results = crate::par::map_range(runs, |r| estimate(rng::child_seed(seed, r)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let log_z_hats: Vec<f64> = results.iter().map(|r| r.log_z_hat).collect();
    let mut order: Vec<usize> = (0..results.len()).collect();
    order.sort_by(|&a, &b| log_z_hats[a].total_cmp(&log_z_hats[b]).then(a.cmp(&b)));
    let pick = order[(order.len() - 1) / 2];
    Ok(AmplifiedEstimate {
        median: results[pick].clone(),
        runs,
        log_z_hats,
    })
}
