//! Brute-force enumeration of polymer families and exact Gibbs quantities.

use crate::error::{Error, Result};
use crate::logspace::LogAccumulator;
use crate::model::{PolymerFamily, PolymerModel};

/// Default largest polymer set that exact routines will enumerate over.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

fn restriction_ids(model: &PolymerModel, restriction: Option<&[usize]>) -> Result<Vec<usize>> {
    match restriction {
        None => Ok((0..model.len()).collect()),
        Some(ids) => {
            let mut v = ids.to_vec();
            v.sort_unstable();
            v.dedup();
            for &id in &v {
                model.check_id(id)?;
            }
            Ok(v)
        }
    }
}

/// Calls `visit(members, log_weight)` once for every family inside the
/// restriction, the empty family first. Members are passed in increasing id
/// order.
pub fn for_each_family<F>(
    model: &PolymerModel,
    restriction: Option<&[usize]>,
    cap: usize,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[usize], f64),
{
    let ids = restriction_ids(model, restriction)?;
    if ids.len() > cap {
        return Err(Error::EnumerationCap {
            count: ids.len(),
            cap,
        });
    }
    // blocked[p] counts chosen members incompatible with p
    let mut blocked = vec![0u32; model.len()];
    let mut chosen = Vec::with_capacity(ids.len());
    recurse(model, &ids, 0, &mut blocked, &mut chosen, 0.0, &mut visit);
    Ok(())
}

fn recurse<F: FnMut(&[usize], f64)>(
    model: &PolymerModel,
    ids: &[usize],
    start: usize,
    blocked: &mut [u32],
    chosen: &mut Vec<usize>,
    log_w: f64,
    visit: &mut F,
) {
    visit(chosen, log_w);
    for pos in start..ids.len() {
        let p = ids[pos];
        if blocked[p] > 0 {
            continue;
        }
        for &q in model.neighbors(p) {
            blocked[q] += 1;
        }
        chosen.push(p);
        recurse(
            model,
            ids,
            pos + 1,
            blocked,
            chosen,
            log_w + model.log_weight(p),
            visit,
        );
        chosen.pop();
        for &q in model.neighbors(p) {
            blocked[q] -= 1;
        }
    }
}

pub fn enumerate_families(
    model: &PolymerModel,
    restriction: Option<&[usize]>,
) -> Result<Vec<PolymerFamily>> {
    enumerate_families_with_cap(model, restriction, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_families_with_cap(
    model: &PolymerModel,
    restriction: Option<&[usize]>,
    cap: usize,
) -> Result<Vec<PolymerFamily>> {
    let mut out = Vec::new();
    for_each_family(model, restriction, cap, |members, _| {
        out.push(PolymerFamily::from_ids(members.to_vec()))
    })?;
    Ok(out)
}

/// `ln Z` over the families inside the restriction.
pub fn partition_function_exact(
    model: &PolymerModel,
    restriction: Option<&[usize]>,
) -> Result<f64> {
    partition_function_exact_with_cap(model, restriction, DEFAULT_ENUMERATION_CAP)
}

pub fn partition_function_exact_with_cap(
    model: &PolymerModel,
    restriction: Option<&[usize]>,
    cap: usize,
) -> Result<f64> {
    let mut acc = LogAccumulator::new();
    for_each_family(model, restriction, cap, |_, lw| acc.push(lw))?;
    Ok(acc.value())
}

pub fn gibbs_probability(
    model: &PolymerModel,
    family: &PolymerFamily,
    restriction: Option<&[usize]>,
) -> Result<f64> {
    if !model.is_valid_family(family.members())? {
        return Err(Error::InvalidFamily(format!(
            "{family} contains an incompatible pair"
        )));
    }
    if let Some(r) = restriction {
        if let Some(&id) = family.members().iter().find(|id| !r.contains(id)) {
            return Err(Error::InvalidFamily(format!(
                "{family} has polymer {id} outside the restriction"
            )));
        }
    }
    let log_z = partition_function_exact(model, restriction)?;
    Ok((model.family_log_weight(family.members()) - log_z).exp())
}

/// All families with their exact Gibbs probabilities, in enumeration order.
pub fn gibbs_distribution(
    model: &PolymerModel,
    restriction: Option<&[usize]>,
    cap: usize,
) -> Result<(Vec<PolymerFamily>, Vec<f64>)> {
    let mut fams = Vec::new();
    let mut lws = Vec::new();
    for_each_family(model, restriction, cap, |members, lw| {
        fams.push(PolymerFamily::from_ids(members.to_vec()));
        lws.push(lw);
    })?;
    let log_z = crate::logspace::log_sum_exp(&lws);
    let probs = lws.iter().map(|lw| (lw - log_z).exp()).collect();
    Ok((fams, probs))
}
