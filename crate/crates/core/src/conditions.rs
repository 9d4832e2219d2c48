//! Weight conditions on polymer models and the explicit mixing-time bound of
//! the clique dynamics.
//!
//! The function `f` that parametrizes each condition is passed as a slice
//! indexed by polymer id.

use serde::{Deserialize, Serialize};

use crate::cover::{validate_clique_cover, CliqueCover};
use crate::error::{Error, Result};
use crate::family::{partition_function_exact_with_cap, DEFAULT_ENUMERATION_CAP};
use crate::logspace::{log1p_exp, log_sum_exp, weight_fraction};
use crate::model::PolymerModel;

/// Absolute tolerance (scaled by `max(1, f(γ))`) under which a negative
/// slack still counts as equality.
pub const SLACK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition_name: String,
    pub holds: bool,
    /// `f(γ)` minus the condition's left-hand side, by polymer id.
    pub per_polymer_slack: Vec<f64>,
    pub worst_polymer: Option<usize>,
    pub min_slack: Option<f64>,
    /// `Z_Λ` per clique, filled in by the strong condition when a cover is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clique_partitions: Option<Vec<f64>>,
}

impl ConditionReport {
    fn from_slacks(name: &str, slacks: Vec<f64>, f: &[f64]) -> Self {
        let worst = slacks
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i);
        let holds = slacks
            .iter()
            .zip(f)
            .all(|(&s, &fv)| s >= -SLACK_TOLERANCE * fv.max(1.0));
        Self {
            condition_name: name.to_string(),
            holds,
            min_slack: worst.map(|i| slacks[i]),
            worst_polymer: worst,
            per_polymer_slack: slacks,
            clique_partitions: None,
        }
    }

    /// Converts a failing report into a precondition error.
    pub fn require(&self) -> Result<()> {
        if self.holds {
            return Ok(());
        }
        Err(Error::Precondition {
            condition: self.condition_name.clone(),
            worst_polymer: self.worst_polymer.unwrap_or(0),
            slack: self.min_slack.unwrap_or(0.0),
        })
    }
}

fn check_f(model: &PolymerModel, f: &[f64]) -> Result<()> {
    if f.len() != model.len() {
        return Err(Error::Input(format!(
            "f has {} values for {} polymers",
            f.len(),
            model.len()
        )));
    }
    if let Some(i) = f.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Input(format!(
            "f({i}) = {} is not a positive real",
            f[i]
        )));
    }
    Ok(())
}

/// `f(γ) - Σ_{γ'≁γ, γ'≠γ} f(γ') w_{γ'}/(1+w_{γ'})` for every polymer.
pub fn check_clique_dynamics(model: &PolymerModel, f: &[f64]) -> Result<ConditionReport> {
    check_f(model, f)?;
    let term: Vec<f64> = (0..model.len())
        .map(|i| f[i] * weight_fraction(model.log_weight(i)))
        .collect();
    let slacks = (0..model.len())
        .map(|g| f[g] - model.neighbors(g).iter().map(|&h| term[h]).sum::<f64>())
        .collect();
    Ok(ConditionReport::from_slacks("clique dynamics", slacks, f))
}

/// `f(γ) - Σ_{γ'≁γ} f(γ') w_{γ'}` where the sum includes `γ` itself.
///
/// With a cover, the report also lists `Z_Λ` for every clique; when the
/// condition holds with `f ≡ 1` these are all at most 2.
pub fn check_strong_condition(
    model: &PolymerModel,
    f: &[f64],
    cover: Option<&CliqueCover>,
) -> Result<ConditionReport> {
    check_f(model, f)?;
    let term: Vec<f64> = (0..model.len())
        .map(|i| f[i] * model.log_weight(i).exp())
        .collect();
    let slacks = (0..model.len())
        .map(|g| f[g] - term[g] - model.neighbors(g).iter().map(|&h| term[h]).sum::<f64>())
        .collect();
    let mut report = ConditionReport::from_slacks("strong", slacks, f);
    if let Some(cover) = cover {
        let zs = (0..cover.m())
            .map(|i| cover.log_clique_partition(model, i).map(f64::exp))
            .collect::<Result<Vec<_>>>()?;
        report.clique_partitions = Some(zs);
    }
    Ok(report)
}

/// `f(γ) - Σ_{Γ ∈ F(N*(γ))} Π_{γ'∈Γ} f(γ') w_{γ'}`, where `N*(γ)` is `γ`
/// together with all polymers incompatible with it. The empty family
/// contributes 1.
pub fn check_fernandez_procacci(model: &PolymerModel, f: &[f64]) -> Result<ConditionReport> {
    check_fernandez_procacci_with_cap(model, f, DEFAULT_ENUMERATION_CAP)
}

pub fn check_fernandez_procacci_with_cap(
    model: &PolymerModel,
    f: &[f64],
    cap: usize,
) -> Result<ConditionReport> {
    check_f(model, f)?;
    let tilted: Vec<f64> = (0..model.len())
        .map(|i| f[i].ln() + model.log_weight(i))
        .collect();
    let tilted_model = model.with_log_weights(&tilted)?;
    let mut slacks = Vec::with_capacity(model.len());
    for g in 0..model.len() {
        let mut star = model.neighbors(g).to_vec();
        star.push(g);
        let lhs = partition_function_exact_with_cap(&tilted_model, Some(&star), cap)?.exp();
        slacks.push(f[g] - lhs);
    }
    Ok(ConditionReport::from_slacks(
        "Fernandez-Procacci",
        slacks,
        f,
    ))
}

/// Monotonically increasing functions with a closed-form inverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GrowthFn {
    /// `e^{a x}`
    Exp { a: f64 },
    /// `x^a` on `x > 0`
    Power { a: f64 },
    /// `a x + b`
    Linear { a: f64, b: f64 },
}

impl GrowthFn {
    pub fn validate(&self) -> Result<()> {
        let (a, b) = match *self {
            GrowthFn::Exp { a } | GrowthFn::Power { a } => (a, 0.0),
            GrowthFn::Linear { a, b } => (a, b),
        };
        if !(a > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Input(format!(
                "{self} is not monotonically increasing"
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            GrowthFn::Exp { a } => (a * x).exp(),
            GrowthFn::Power { a } => x.powf(a),
            GrowthFn::Linear { a, b } => a * x + b,
        }
    }

    /// `ln g(x)` when `g(x) > 0`.
    pub fn log_eval(&self, x: f64) -> Option<f64> {
        match *self {
            GrowthFn::Exp { a } => Some(a * x),
            GrowthFn::Power { a } if x > 0.0 => Some(a * x.ln()),
            _ => {
                let v = self.eval(x);
                (v > 0.0).then(|| v.ln())
            }
        }
    }

    pub fn inverse(&self, y: f64) -> Result<f64> {
        let out = match *self {
            GrowthFn::Exp { a } => {
                if !(y > 0.0) {
                    return Err(Error::Input(format!("{self} never reaches {y}")));
                }
                y.ln() / a
            }
            GrowthFn::Power { a } => {
                if !(y > 0.0) {
                    return Err(Error::Input(format!("{self} never reaches {y}")));
                }
                y.powf(1.0 / a)
            }
            GrowthFn::Linear { a, b } => (y - b) / a,
        };
        Ok(out)
    }
}

impl std::fmt::Display for GrowthFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GrowthFn::Exp { a } => write!(f, "exp:{a}"),
            GrowthFn::Power { a } => write!(f, "power:{a}"),
            GrowthFn::Linear { a, b } => write!(f, "linear:{a},{b}"),
        }
    }
}

impl std::str::FromStr for GrowthFn {
    type Err = Error;

    /// Parses `exp:<a>`, `power:<a>` or `linear:<a>,<b>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("cannot parse growth function '{s}'"));
        let (kind, params) = s.split_once(':').ok_or_else(bad)?;
        let nums = params
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let g = match (kind.trim(), nums.as_slice()) {
            ("exp", [a]) => GrowthFn::Exp { a: *a },
            ("power", [a]) => GrowthFn::Power { a: *a },
            ("linear", [a, b]) => GrowthFn::Linear { a: *a, b: *b },
            _ => return Err(bad()),
        };
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueTruncationReport {
    pub g: GrowthFn,
    pub b: f64,
    /// `Σ_{γ∈Λ_i} g(|γ|) w_γ` per clique.
    pub per_clique_sum: Vec<f64>,
    pub holds: bool,
    pub worst_clique: Option<usize>,
}

pub fn check_clique_truncation(
    model: &PolymerModel,
    cover: &CliqueCover,
    g: GrowthFn,
    b: f64,
) -> Result<CliqueTruncationReport> {
    g.validate()?;
    if !(b > 0.0) {
        return Err(Error::Input(format!("B = {b} must be positive")));
    }
    let mut sums = Vec::with_capacity(cover.m());
    for i in 0..cover.m() {
        let mut logs = Vec::new();
        let mut plain = 0.0;
        for &id in cover.clique(i)? {
            model.check_id(id)?;
            match g.log_eval(model.size(id)) {
                Some(lg) => logs.push(lg + model.log_weight(id)),
                None => plain += g.eval(model.size(id)) * model.log_weight(id).exp(),
            }
        }
        sums.push(log_sum_exp(&logs).exp() + plain);
    }
    let worst = sums
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i);
    Ok(CliqueTruncationReport {
        g,
        b,
        holds: sums.iter().all(|&s| s <= b * (1.0 + SLACK_TOLERANCE)),
        worst_clique: worst,
        per_clique_sum: sums,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingBoundInputs {
    pub m: usize,
    /// `z_γ = Σ_{i: γ∈Λ_i} 1/Z_{Λ_i}` by polymer id.
    pub z: Vec<f64>,
    pub eta: f64,
    pub kappa: f64,
    pub d: f64,
    #[serde(rename = "D")]
    pub big_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingBound {
    pub steps: u64,
    /// Real value of the bound before rounding up.
    pub value: f64,
    pub inputs: Option<MixingBoundInputs>,
    pub condition_holds: bool,
    pub warning: Option<String>,
}

/// Number of clique dynamics steps after which the chain started anywhere is
/// within total variation `epsilon` of the Gibbs distribution, given that
/// the clique dynamics condition holds for `f`:
///
/// `(ln(D/d) + 2 ln 2)^2 / (ln(1+η)^2 κ) · ln(1/ε)`
///
/// with `δ'(γ) = f(γ)/(z_γ(1+w_γ))`, `d = min δ'`, `D = 2m max δ'`,
/// `η = 1/(2m)` and `κ = min z_γ / m`. If the condition fails the number is
/// still computed but carries a warning.
pub fn mixing_time_bound(
    model: &PolymerModel,
    cover: &CliqueCover,
    f: &[f64],
    epsilon: f64,
) -> Result<MixingBound> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Input(format!(
            "epsilon = {epsilon} is not in (0, 1]"
        )));
    }
    let report = check_clique_dynamics(model, f)?;
    let warning = (!report.holds).then(|| {
        format!(
            "clique dynamics condition fails at polymer {} (slack {:e}); the bound is not guaranteed",
            report.worst_polymer.unwrap_or(0),
            report.min_slack.unwrap_or(0.0)
        )
    });
    if model.is_empty() {
        return Ok(MixingBound {
            steps: 0,
            value: 0.0,
            inputs: None,
            condition_holds: report.holds,
            warning,
        });
    }
    let cover_report = validate_clique_cover(model, cover);
    if let Some(&id) = cover_report.uncovered.first() {
        return Err(Error::InvalidModel(format!(
            "polymer {id} is not covered by any clique"
        )));
    }
    if let Some(&(c, id)) = cover_report.unknown.first() {
        return Err(Error::InvalidModel(format!(
            "clique {c} names unknown polymer {id}"
        )));
    }
    let m = cover.m();
    let inv_z: Vec<f64> = (0..m)
        .map(|i| cover.log_clique_partition(model, i).map(|lz| (-lz).exp()))
        .collect::<Result<_>>()?;
    let mut z = vec![0.0; model.len()];
    for (i, c) in cover.cliques().iter().enumerate() {
        for &id in c {
            z[id] += inv_z[i];
        }
    }
    let delta: Vec<f64> = (0..model.len())
        .map(|g| (f[g].ln() - z[g].ln() - log1p_exp(model.log_weight(g))).exp())
        .collect();
    let d = delta.iter().copied().fold(f64::INFINITY, f64::min);
    let big_d = 2.0 * m as f64 * delta.iter().copied().fold(0.0, f64::max);
    let eta = 1.0 / (2.0 * m as f64);
    let kappa = z.iter().copied().fold(f64::INFINITY, f64::min) / m as f64;
    let log_ratio = big_d.ln() - d.ln();
    let numerator = (log_ratio + 2.0 * std::f64::consts::LN_2).powi(2);
    let value = numerator / (eta.ln_1p().powi(2) * kappa) * (1.0 / epsilon).ln();
    let steps = if value <= 0.0 {
        0
    } else if value >= u64::MAX as f64 {
        u64::MAX
    } else {
        value.ceil() as u64
    };
    Ok(MixingBound {
        steps,
        value,
        inputs: Some(MixingBoundInputs {
            m,
            z,
            eta,
            kappa,
            d,
            big_d,
        }),
        condition_holds: report.holds,
        warning,
    })
}
