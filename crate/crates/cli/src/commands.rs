use std::collections::BTreeMap;
use std::path::Path;

use polymer_core::conditions::check_fernandez_procacci_with_cap;
use polymer_core::dynamics::{transition_matrix_with_cap, TransitionMatrix};
use polymer_core::family::{gibbs_distribution, partition_function_exact_with_cap};
use polymer_core::hardcore::model::EXACT_HARDCORE_LIMIT;
use polymer_core::hardcore::{
    combined_estimate, exact_hardcore, table1_evaluate, BipartiteGraph, HardCoreParams,
};
use polymer_core::truncation::{tail_sums, truncation_plan};
use polymer_core::{
    check_clique_dynamics, check_clique_truncation, check_strong_condition, empirical_tv,
    median_amplify, mixing_time_bound, model_from_json, model_to_json, rng, sample_gibbs, truncate,
    verify_truncation_quality, ChainState, CliqueCover, CliqueDynamics, EstimatorConfig,
    PolymerFamily, PolymerModel, PreparedEstimator, QualityMode,
};
use rayon::prelude::*;
use serde_json::json;

use crate::output::{family, num, opt_num, Report, Table};
use crate::{
    CheckConditionsArgs, CliError, Command, Common, EstimateArgs, ExactArgs, HardcoreArgs,
    SampleArgs, ThresholdArgs, TruncateArgs, TvCurveArgs,
};

/// The per-polymer function `f` of the weight conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FSpec {
    One,
    Size,
    Exp(f64),
}

impl std::str::FromStr for FSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "one" => Ok(FSpec::One),
            "size" => Ok(FSpec::Size),
            _ => {
                let a = s
                    .strip_prefix("exp:")
                    .ok_or_else(|| format!("'{s}' is not one, size or exp:<a>"))?;
                a.parse::<f64>()
                    .ok()
                    .filter(|a| a.is_finite())
                    .map(FSpec::Exp)
                    .ok_or_else(|| format!("bad exponent '{a}'"))
            }
        }
    }
}

impl FSpec {
    pub fn values(self, model: &PolymerModel) -> Vec<f64> {
        (0..model.len())
            .map(|i| match self {
                FSpec::One => 1.0,
                FSpec::Size => model.size(i),
                FSpec::Exp(a) => (a * model.size(i)).exp(),
            })
            .collect()
    }
}

pub fn dispatch(command: &Command, common: &Common) -> Result<Report, CliError> {
    match command {
        Command::CheckConditions(a) => check_conditions(a, common),
        Command::Sample(a) => sample(a, common),
        Command::EstimateZ(a) => estimate_z(a, common),
        Command::ExactZ(a) => exact_z(a, common),
        Command::Truncate(a) => truncate_cmd(a, common),
        Command::Thresholds(a) => thresholds(a),
        Command::Hardcore(a) => hardcore(a, common),
        Command::TvCurve(a) => tv_curve(a, common),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_model(path: &Path) -> Result<(PolymerModel, CliqueCover), CliError> {
    Ok(model_from_json(&read(path)?)?)
}

fn check_conditions(a: &CheckConditionsArgs, common: &Common) -> Result<Report, CliError> {
    let (model, cover) = load_model(&a.model.model)?;
    let f = a.model.f.values(&model);
    let cdc = check_clique_dynamics(&model, &f)?;
    let strong = check_strong_condition(&model, &f, Some(&cover))?;
    let fp = check_fernandez_procacci_with_cap(&model, &f, common.cap)?;

    let mut table = Table::new(&["condition", "holds", "worst", "min_slack", "steps"]);
    let mut json = serde_json::Map::new();
    for r in [&cdc, &strong, &fp] {
        table.push(vec![
            r.condition_name.clone(),
            r.holds.to_string(),
            r.worst_polymer.map(|p| p.to_string()).unwrap_or_default(),
            opt_num(r.min_slack),
            String::new(),
        ]);
        json.insert(r.condition_name.clone(), serde_json::to_value(r)?);
    }
    if let Some(g) = a.growth {
        let t = check_clique_truncation(&model, &cover, g, a.b)?;
        let worst_sum = t.worst_clique.map(|c| t.per_clique_sum[c]);
        table.push(vec![
            "clique_truncation".into(),
            t.holds.to_string(),
            t.worst_clique.map(|c| c.to_string()).unwrap_or_default(),
            opt_num(worst_sum.map(|s| a.b - s)),
            String::new(),
        ]);
        json.insert("clique_truncation".into(), serde_json::to_value(&t)?);
    }
    if let Some(eps) = a.epsilon {
        let bound = mixing_time_bound(&model, &cover, &f, eps)?;
        if let Some(w) = &bound.warning {
            eprintln!("warning: {w}");
        }
        table.push(vec![
            "mixing_bound".into(),
            bound.condition_holds.to_string(),
            String::new(),
            String::new(),
            bound.steps.to_string(),
        ]);
        json.insert("mixing_bound".into(), serde_json::to_value(&bound)?);
    }
    let mut report = Report::new(table, json.into());
    if a.require {
        report.failure = cdc.require().err();
    }
    Ok(report)
}

fn sample(a: &SampleArgs, common: &Common) -> Result<Report, CliError> {
    let (model, cover) = load_model(&a.model.model)?;
    let f = a.model.f.values(&model);
    if a.trajectory {
        let steps = match a.steps {
            Some(s) => s,
            None => {
                check_clique_dynamics(&model, &f)?.require()?;
                mixing_time_bound(&model, &cover, &f, a.epsilon)?.steps
            }
        };
        let dynamics = CliqueDynamics::new(&model, &cover)?;
        let mut state = dynamics.empty_state();
        let mut r = rng::seeded(common.seed);
        let mut table = Table::new(&["step", "family"]);
        let mut rows = Vec::new();
        for t in 0..=steps {
            if t > 0 {
                dynamics.step(&mut state, &mut r);
            }
            let fam = state.family();
            table.push(vec![t.to_string(), family(fam.members())]);
            rows.push(json!({ "step": t, "family": fam }));
        }
        return Ok(Report::new(table, rows.into()));
    }

    let steps = match a.steps {
        Some(s) => s,
        None => {
            check_clique_dynamics(&model, &f)?.require()?;
            mixing_time_bound(&model, &cover, &f, a.epsilon)?.steps
        }
    };
    let dynamics = CliqueDynamics::new(&model, &cover)?;
    let draws: Vec<PolymerFamily> = (0..a.count)
        .into_par_iter()
        .map(|i| -> Result<PolymerFamily, polymer_core::Error> {
            let mut r = rng::seeded(rng::child_seed(common.seed, i));
            match a.steps {
                Some(_) => {
                    let mut state = dynamics.empty_state();
                    dynamics.run(&mut state, steps, &mut r);
                    Ok(state.family())
                }
                None => sample_gibbs(&model, &cover, &f, a.epsilon, &mut r),
            }
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["sample", "steps", "family"]);
    let mut rows = Vec::new();
    for (i, fam) in draws.iter().enumerate() {
        table.push(vec![
            i.to_string(),
            steps.to_string(),
            family(fam.members()),
        ]);
        rows.push(json!({ "sample": i, "steps": steps, "family": fam }));
    }
    Ok(Report::new(table, rows.into()))
}

fn estimate_z(a: &EstimateArgs, common: &Common) -> Result<Report, CliError> {
    let (model, cover) = load_model(&a.model.model)?;
    let f = a.model.f.values(&model);
    let config = EstimatorConfig {
        backend: a.sampler,
        samples_override: a.samples,
        cap: common.cap,
    };
    let prepared = PreparedEstimator::new(&model, &cover, &f, a.epsilon, &config)?;
    let (result, runs, json) = match a.delta {
        Some(delta) => {
            let amp = median_amplify(delta, common.seed, |seed| prepared.run(seed))?;
            let json = serde_json::to_value(&amp)?;
            (amp.median, amp.runs, json)
        }
        None => {
            let r = prepared.run(common.seed)?;
            let json = serde_json::to_value(&r)?;
            (r, 1, json)
        }
    };
    let table = if a.ratios {
        let mut t = Table::new(&["i", "r_hat", "hits", "steps"]);
        for r in &result.ratios {
            t.push(vec![
                r.i.to_string(),
                num(r.r_hat),
                r.hits.to_string(),
                r.steps.to_string(),
            ]);
        }
        t
    } else {
        let mut t = Table::new(&[
            "log_z_hat",
            "z_hat",
            "epsilon",
            "s",
            "epsilon_s",
            "z_max",
            "m",
            "runs",
            "seed",
        ]);
        t.push(vec![
            num(result.log_z_hat),
            num(result.z_hat()),
            num(result.epsilon),
            result.s.to_string(),
            num(result.epsilon_s),
            num(result.z_max),
            result.m.to_string(),
            runs.to_string(),
            common.seed.to_string(),
        ]);
        t
    };
    Ok(Report::new(table, json))
}

fn exact_z(a: &ExactArgs, common: &Common) -> Result<Report, CliError> {
    let (model, _) = load_model(&a.model)?;
    let log_z = partition_function_exact_with_cap(&model, None, common.cap)?;
    let mut table = Table::new(&["log_z", "z", "polymers"]);
    table.push(vec![num(log_z), num(log_z.exp()), model.len().to_string()]);
    Ok(Report::new(
        table,
        json!({ "log_z": log_z, "z": log_z.exp(), "polymers": model.len() }),
    ))
}

fn truncate_cmd(a: &TruncateArgs, common: &Common) -> Result<Report, CliError> {
    let (model, cover) = load_model(&a.model)?;
    let (k, plan) = match (a.k, a.growth) {
        (Some(k), _) => (k, None),
        (None, Some(g)) => {
            let eps = a
                .epsilon
                .ok_or_else(|| CliError::Usage("--growth needs --epsilon".into()))?;
            let plan = truncation_plan(g, a.b, cover.m(), eps, a.doubled)?;
            (plan.k, Some(plan))
        }
        (None, None) => return Err(CliError::Usage("give either --k or --growth".into())),
    };
    let cut = truncate(&model, k, Some(&cover))?;
    let eps = a.epsilon.unwrap_or(f64::NAN);
    let quality = if a.verify {
        if !(eps > 0.0) {
            return Err(CliError::Usage("--verify needs --epsilon".into()));
        }
        Some(verify_truncation_quality(
            &model,
            &cover,
            k,
            eps,
            QualityMode::BruteForce { cap: common.cap },
        )?)
    } else {
        None
    };
    let tails = match &quality {
        Some(q) => q.tail_sums.clone(),
        None => tail_sums(&model, &cover, k)?,
    };
    let max_tail = tails.iter().copied().fold(0.0, f64::max);
    let premise = quality.as_ref().map(|q| q.premise_holds);

    if let Some(path) = &a.model_out {
        let cut_cover = cut
            .cover
            .clone()
            .unwrap_or_else(|| CliqueCover::trivial(cut.model.len()));
        std::fs::write(path, model_to_json(&cut.model, &cut_cover)).map_err(|source| {
            CliError::Io {
                path: path.display().to_string(),
                source,
            }
        })?;
    }

    let mut table = Table::new(&[
        "k",
        "polymers_before",
        "polymers_after",
        "max_tail",
        "premise_holds",
        "log_ratio",
        "tv",
    ]);
    table.push(vec![
        num(k),
        model.len().to_string(),
        cut.model.len().to_string(),
        num(max_tail),
        premise.map(|p| p.to_string()).unwrap_or_default(),
        opt_num(quality.as_ref().and_then(|q| q.log_ratio)),
        opt_num(quality.as_ref().and_then(|q| q.tv)),
    ]);
    let json = json!({
        "k": k,
        "plan": plan,
        "polymers_before": model.len(),
        "polymers_after": cut.model.len(),
        "kept": cut.new_to_old,
        "tail_sums": tails,
        "quality": quality,
    });
    Ok(Report::new(table, json))
}

fn thresholds(a: &ThresholdArgs) -> Result<Report, CliError> {
    let mut params = BTreeMap::new();
    for (key, value) in [
        ("delta", a.delta),
        ("alpha", a.alpha),
        ("lambda", a.lambda),
        ("q", a.q),
        ("beta", a.beta),
        ("delta_l", a.delta_l),
        ("delta_r", a.delta_r),
        ("lambda_l", a.lambda_l),
        ("lambda_r", a.lambda_r),
        ("min_delta_r", a.min_delta_r),
        ("z", a.z),
    ] {
        if let Some(v) = value {
            params.insert(key.to_string(), v);
        }
    }
    let report = table1_evaluate(a.row, &params)?;
    let mut table = Table::new(&["row", "quantity", "value"]);
    table.push(vec![report.row.clone(), "value".into(), num(report.value)]);
    for (name, v) in &report.details {
        table.push(vec![report.row.clone(), name.clone(), num(*v)]);
    }
    if let Some(s) = report.satisfied {
        table.push(vec![report.row.clone(), "satisfied".into(), s.to_string()]);
    }
    Ok(Report::new(table, serde_json::to_value(&report)?))
}

fn hardcore(a: &HardcoreArgs, common: &Common) -> Result<Report, CliError> {
    let g = BipartiteGraph::parse(&read(&a.graph)?)?;
    let config = EstimatorConfig {
        backend: a.sampler,
        samples_override: None,
        cap: common.cap,
    };
    let params = HardCoreParams {
        lambda: a.lambda,
        alpha: a.alpha,
    };
    let est = combined_estimate(&g, params, a.epsilon, common.seed, &config)?;
    for w in &est.warnings {
        eprintln!("warning: {w}");
    }
    let exact = if !a.no_exact && g.n() <= EXACT_HARDCORE_LIMIT {
        Some(exact_hardcore(&g, a.lambda)?)
    } else {
        None
    };
    let rel = exact.map(|e| (est.log_z - e).exp() - 1.0);
    let within = rel.map(|r| r.abs() <= a.epsilon);
    let mut table = Table::new(&[
        "log_z_hat",
        "z_hat",
        "log_z_exact",
        "relative_error",
        "within_epsilon",
        "warnings",
    ]);
    table.push(vec![
        num(est.log_z),
        num(est.log_z.exp()),
        opt_num(exact),
        opt_num(rel),
        within.map(|w| w.to_string()).unwrap_or_default(),
        est.warnings.len().to_string(),
    ]);
    let json = json!({
        "estimate": est,
        "log_z_exact": exact,
        "relative_error": rel,
        "within_epsilon": within,
    });
    Ok(Report::new(table, json))
}

fn tv_curve(a: &TvCurveArgs, common: &Common) -> Result<Report, CliError> {
    let (model, cover) = load_model(&a.model)?;
    let initial = PolymerFamily::checked(&model, a.initial.clone())?;
    // validates the starting family against the cover as well
    ChainState::from_family(&model, &cover, &initial)?;
    let p: TransitionMatrix = transition_matrix_with_cap(&model, &cover, common.cap)?;
    let start = p
        .index_of(&initial)
        .ok_or_else(|| CliError::Usage("initial family is not a state of the chain".into()))?;
    let (fams, probs) = gibbs_distribution(&model, None, common.cap)?;
    let mut gibbs = vec![0.0; p.len()];
    for (fam, pr) in fams.iter().zip(probs) {
        if let Some(i) = p.index_of(fam) {
            gibbs[i] = pr;
        }
    }
    let mut table = Table::new(&["steps", "empirical_tv", "exact_tv"]);
    let mut rows = Vec::new();
    for (idx, &steps) in a.steps.iter().enumerate() {
        let emp = empirical_tv(
            &model,
            &cover,
            steps,
            a.trials,
            &initial,
            rng::child_seed(common.seed, idx as u64),
        )?;
        let law = p.transient(start, steps);
        let exact = 0.5
            * law
                .iter()
                .zip(&gibbs)
                .map(|(x, y)| (x - y).abs())
                .sum::<f64>();
        table.push(vec![steps.to_string(), num(emp), num(exact)]);
        rows.push(json!({ "steps": steps, "empirical_tv": emp, "exact_tv": exact }));
    }
    Ok(Report::new(table, rows.into()))
}
