//! Closed-form parameter ranges for the expander and bipartite applications.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaThreshold {
    /// `(e Δ² / 0.8)^{1/α}`
    pub term1: f64,
    /// `e^{11/α}`
    pub term2: f64,
    pub max: f64,
}

/// Fugacity above which both side models satisfy the clique dynamics
/// condition and the two-sided combination is accurate.
pub fn lambda_threshold(delta: usize, alpha: f64) -> Result<LambdaThreshold> {
    if delta < 1 {
        return Err(Error::Input("maximum degree must be at least 1".into()));
    }
    check_alpha(alpha)?;
    let d = delta as f64;
    let term1 = (std::f64::consts::E * d * d / 0.8).powf(1.0 / alpha);
    let term2 = (11.0 / alpha).exp();
    Ok(LambdaThreshold {
        term1,
        term2,
        max: term1.max(term2),
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::Input(format!("alpha = {alpha} is not in (0, 1]")))
    }
}

/// Constant in the unbalanced bipartite hard-core condition.
pub const UNBALANCED_CONSTANT: f64 = 3.3353;
/// Constant in the matching polynomial range.
pub const MATCHING_CONSTANT: f64 = 2.8399;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Table1Row {
    /// `λ ≥ (e Δ² / 0.8)^{1/α}`; parameters `delta`, `alpha`, optional `lambda`.
    HardcoreExpander,
    /// `β ≥ (3/2 + ln(Δ q))/α`; parameters `delta`, `q`, `alpha`, optional `beta`.
    PottsExpander,
    /// `3.3353 Δ_L Δ_R λ_R ≤ (1+λ_L)^{δ_R/Δ_L}`; parameters `delta_l`,
    /// `delta_r`, `lambda_l`, `lambda_r`, `min_delta_r`.
    HardcoreUnbalanced,
    /// `z ≤ 1/√(2.8399 (Δ-1))`; parameters `delta`, optional `z`.
    Matching,
}

impl Table1Row {
    pub const ALL: [Table1Row; 4] = [
        Table1Row::HardcoreExpander,
        Table1Row::PottsExpander,
        Table1Row::HardcoreUnbalanced,
        Table1Row::Matching,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Table1Row::HardcoreExpander => "hardcore_expander",
            Table1Row::PottsExpander => "potts_expander",
            Table1Row::HardcoreUnbalanced => "hardcore_unbalanced",
            Table1Row::Matching => "matching",
        }
    }

    pub fn required(self) -> &'static [&'static str] {
        match self {
            Table1Row::HardcoreExpander => &["delta", "alpha"],
            Table1Row::PottsExpander => &["delta", "q", "alpha"],
            Table1Row::HardcoreUnbalanced => {
                &["delta_l", "delta_r", "lambda_l", "lambda_r", "min_delta_r"]
            }
            Table1Row::Matching => &["delta"],
        }
    }
}

impl std::str::FromStr for Table1Row {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Table1Row::ALL
            .into_iter()
            .find(|r| r.label() == s)
            .ok_or_else(|| Error::Input(format!("unknown row '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub row: String,
    pub inputs: BTreeMap<String, f64>,
    /// Threshold for threshold rows; `RHS - LHS` for the inequality row.
    pub value: f64,
    /// Further named quantities (both threshold terms, both sides, ...).
    pub details: BTreeMap<String, f64>,
    /// Whether the supplied parameter meets the range; `None` when the
    /// parameter being tested was not supplied.
    pub satisfied: Option<bool>,
}

pub fn table1_evaluate(row: Table1Row, params: &BTreeMap<String, f64>) -> Result<ThresholdReport> {
    let get = |name: &str| {
        params
            .get(name)
            .copied()
            .ok_or_else(|| Error::Input(format!("{} needs parameter '{name}'", row.label())))
    };
    let degree = |name: &str| -> Result<usize> {
        let v = get(name)?;
        if v < 1.0 || v.fract() != 0.0 {
            return Err(Error::Input(format!(
                "{name} = {v} must be a positive integer"
            )));
        }
        Ok(v as usize)
    };
    let mut details = BTreeMap::new();
    let (value, satisfied) = match row {
        Table1Row::HardcoreExpander => {
            let t = lambda_threshold(degree("delta")?, get("alpha")?)?;
            details.insert("term1".to_string(), t.term1);
            details.insert("term2".to_string(), t.term2);
            details.insert("max".to_string(), t.max);
            (t.term1, params.get("lambda").map(|&l| l >= t.term1))
        }
        Table1Row::PottsExpander => {
            let d = degree("delta")? as f64;
            let q = get("q")?;
            let alpha = get("alpha")?;
            check_alpha(alpha)?;
            if !(q >= 2.0) {
                return Err(Error::Input(format!("q = {q} must be at least 2")));
            }
            let beta = (1.5 + (d * q).ln()) / alpha;
            (beta, params.get("beta").map(|&b| b >= beta))
        }
        Table1Row::HardcoreUnbalanced => {
            let dl = degree("delta_l")? as f64;
            let dr = degree("delta_r")? as f64;
            let ll = get("lambda_l")?;
            let lr = get("lambda_r")?;
            let min_dr = get("min_delta_r")?;
            if !(ll > 0.0 && lr > 0.0) {
                return Err(Error::Input("fugacities must be positive".into()));
            }
            if !(min_dr >= 0.0 && min_dr <= dr) {
                return Err(Error::Input(format!(
                    "min_delta_r = {min_dr} must lie in [0, delta_r]"
                )));
            }
            let lhs = UNBALANCED_CONSTANT * dl * dr * lr;
            let rhs = (1.0 + ll).powf(min_dr / dl);
            details.insert("lhs".to_string(), lhs);
            details.insert("rhs".to_string(), rhs);
            (rhs - lhs, Some(lhs <= rhs))
        }
        Table1Row::Matching => {
            let d = degree("delta")?;
            if d < 2 {
                return Err(Error::Input("matching range needs delta >= 2".into()));
            }
            let z = 1.0 / (MATCHING_CONSTANT * (d - 1) as f64).sqrt();
            (z, params.get("z").map(|&v| v <= z))
        }
    };
    Ok(ThresholdReport {
        row: row.label().to_string(),
        inputs: params.clone(),
        value,
        details,
        satisfied,
    })
}
