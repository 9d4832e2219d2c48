//! Polymer models: weighted polymers plus a symmetric incompatibility relation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polymer {
    pub id: usize,
    /// Natural log of the weight.
    pub log_weight: f64,
    /// Value of the size function, used by truncation.
    #[serde(default = "default_size")]
    pub size: f64,
}

fn default_size() -> f64 {
    1.0
}

impl Polymer {
    pub fn new(id: usize, log_weight: f64) -> Self {
        Self {
            id,
            log_weight,
            size: 1.0,
        }
    }

    pub fn with_size(mut self, size: f64) -> Self {
        self.size = size;
        self
    }

    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }
}

/// A finite polymer model.
///
/// Ids are dense (`0..len`). Every polymer is incompatible with itself; that
/// self-relation is implied and never appears in [`PolymerModel::neighbors`].
#[derive(Debug, Clone, PartialEq)]
pub struct PolymerModel {
    polymers: Vec<Polymer>,
    adjacency: Vec<Vec<usize>>,
}

impl PolymerModel {
    /// Builds a model from polymers (ids must be `0..n` in order) and a list of
    /// incompatible pairs. Pairs may be given in either orientation and may
    /// repeat; self pairs are ignored.
    pub fn new(polymers: Vec<Polymer>, incompat: &[(usize, usize)]) -> Result<Self> {
        for (i, p) in polymers.iter().enumerate() {
            if p.id != i {
                return Err(Error::InvalidModel(format!(
                    "polymer at position {i} has id {}; ids must be contiguous from 0",
                    p.id
                )));
            }
            if !p.log_weight.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "polymer {i} has non-finite log weight"
                )));
            }
            if !(p.size > 0.0) || !p.size.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "polymer {i} has size {}; sizes must be positive",
                    p.size
                )));
            }
        }
        let n = polymers.len();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in incompat {
            if a >= n {
                return Err(Error::UnknownPolymer(a));
            }
            if b >= n {
                return Err(Error::UnknownPolymer(b));
            }
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            polymers,
            adjacency,
        })
    }

    /// Model with unit sizes from a slice of log weights.
    pub fn from_log_weights(log_weights: &[f64], incompat: &[(usize, usize)]) -> Result<Self> {
        let polymers = log_weights
            .iter()
            .enumerate()
            .map(|(i, &lw)| Polymer::new(i, lw))
            .collect();
        Self::new(polymers, incompat)
    }

    pub fn empty() -> Self {
        Self {
            polymers: Vec::new(),
            adjacency: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.polymers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polymers.is_empty()
    }

    pub fn polymers(&self) -> &[Polymer] {
        &self.polymers
    }

    pub fn polymer(&self, id: usize) -> Result<&Polymer> {
        self.polymers.get(id).ok_or(Error::UnknownPolymer(id))
    }

    #[inline]
    pub fn log_weight(&self, id: usize) -> f64 {
        self.polymers[id].log_weight
    }

    #[inline]
    pub fn size(&self, id: usize) -> f64 {
        self.polymers[id].size
    }

    /// Incompatible polymers other than `id` itself, sorted.
    #[inline]
    pub fn neighbors(&self, id: usize) -> &[usize] {
        &self.adjacency[id]
    }

    /// Reflexive incompatibility test.
    pub fn is_incompatible(&self, a: usize, b: usize) -> bool {
        a == b || self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Incompatible pairs `(a, b)` with `a < b`, in lexicographic order.
    pub fn incompatible_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    pub fn check_id(&self, id: usize) -> Result<()> {
        if id < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownPolymer(id))
        }
    }

    /// True iff no two distinct ids are incompatible. Duplicate ids count
    /// as the same polymer.
    pub fn is_valid_family(&self, ids: &[usize]) -> Result<bool> {
        for &id in ids {
            self.check_id(id)?;
        }
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                if a != b && self.is_incompatible(a, b) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Sum of log weights of a family.
    pub fn family_log_weight(&self, ids: &[usize]) -> f64 {
        ids.iter().map(|&id| self.log_weight(id)).sum()
    }

    /// Induced sub-model on `ids` (any order, duplicates ignored).
    /// Returns the model and the new-to-old id map; new ids follow the
    /// increasing order of old ids.
    pub fn induced(&self, ids: &[usize]) -> Result<(PolymerModel, Vec<usize>)> {
        let mut keep: Vec<usize> = ids.to_vec();
        keep.sort_unstable();
        keep.dedup();
        for &id in &keep {
            self.check_id(id)?;
        }
        let mut old_to_new = vec![usize::MAX; self.len()];
        for (new, &old) in keep.iter().enumerate() {
            old_to_new[old] = new;
        }
        let polymers = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| Polymer {
                id: new,
                ..self.polymers[old]
            })
            .collect();
        let adjacency = keep
            .iter()
            .map(|&old| {
                self.adjacency[old]
                    .iter()
                    .filter_map(|&b| match old_to_new[b] {
                        usize::MAX => None,
                        nb => Some(nb),
                    })
                    .collect()
            })
            .collect();
        Ok((
            PolymerModel {
                polymers,
                adjacency,
            },
            keep,
        ))
    }

    /// Same model with all weights replaced.
    pub fn with_log_weights(&self, log_weights: &[f64]) -> Result<Self> {
        if log_weights.len() != self.len() {
            return Err(Error::Input(format!(
                "expected {} weights, got {}",
                self.len(),
                log_weights.len()
            )));
        }
        let mut out = self.clone();
        for (p, &lw) in out.polymers.iter_mut().zip(log_weights) {
            if !lw.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "polymer {} has non-finite log weight",
                    p.id
                )));
            }
            p.log_weight = lw;
        }
        Ok(out)
    }
}

/// A set of pairwise compatible polymers, stored as sorted ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolymerFamily {
    members: Vec<usize>,
}

impl PolymerFamily {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts and deduplicates; does not check validity.
    pub fn from_ids(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Self { members: ids }
    }

    /// Builds a family, rejecting unknown ids and incompatible pairs.
    pub fn checked(model: &PolymerModel, ids: Vec<usize>) -> Result<Self> {
        let fam = Self::from_ids(ids);
        if model.is_valid_family(&fam.members)? {
            Ok(fam)
        } else {
            Err(Error::InvalidFamily(format!(
                "{:?} contains an incompatible pair",
                fam.members
            )))
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members.binary_search(&id).is_ok()
    }
}

impl std::fmt::Display for PolymerFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("{")?;
        for (i, id) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{id}")?;
        }
        f.write_str("}")
    }
}
