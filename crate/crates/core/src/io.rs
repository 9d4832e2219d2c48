//! JSON model documents.
//!
//! ```json
//! {"polymers": [{"id": 0, "log_weight": -0.7, "size": 1.0}],
//!  "incompat": [[0, 1]],
//!  "cliques": [[0, 1]]}
//! ```
//!
//! `size` defaults to 1. An omitted or empty `cliques` list on a non-empty
//! model means the trivial cover (one singleton clique per polymer).

use serde::{Deserialize, Serialize};

use crate::cover::{require_valid_cover, CliqueCover};
use crate::error::{Error, Result};
use crate::model::{Polymer, PolymerModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub polymers: Vec<Polymer>,
    #[serde(default)]
    pub incompat: Vec<[usize; 2]>,
    #[serde(default)]
    pub cliques: Vec<Vec<usize>>,
}

impl ModelDocument {
    pub fn new(model: &PolymerModel, cover: &CliqueCover) -> Self {
        Self {
            polymers: model.polymers().to_vec(),
            incompat: model
                .incompatible_pairs()
                .into_iter()
                .map(|(a, b)| [a, b])
                .collect(),
            cliques: cover.cliques().to_vec(),
        }
    }

    pub fn into_parts(self) -> Result<(PolymerModel, CliqueCover)> {
        let mut polymers = self.polymers;
        polymers.sort_by_key(|p| p.id);
        let pairs: Vec<(usize, usize)> = self.incompat.iter().map(|&[a, b]| (a, b)).collect();
        let model = PolymerModel::new(polymers, &pairs)?;
        let cover = if self.cliques.is_empty() {
            CliqueCover::trivial(model.len())
        } else {
            CliqueCover::new(self.cliques)
        };
        require_valid_cover(&model, &cover)?;
        Ok((model, cover))
    }
}

pub fn model_to_json(model: &PolymerModel, cover: &CliqueCover) -> String {
    serde_json::to_string_pretty(&ModelDocument::new(model, cover)).expect("model serializes")
}

pub fn model_from_json(text: &str) -> Result<(PolymerModel, CliqueCover)> {
    let doc: ModelDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    doc.into_parts()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_cover() {
        let text = r#"{"polymers": [{"id": 0, "log_weight": 0}, {"id": 1, "log_weight": 0}],
                       "incompat": [], "cliques": [[0, 1]]}"#;
        assert!(matches!(model_from_json(text), Err(Error::InvalidModel(_))));
        let text =
            r#"{"polymers": [{"id": 0, "log_weight": 0}], "incompat": [], "cliques": [[0], [3]]}"#;
        assert!(model_from_json(text).is_err());
    }

    #[test]
    fn round_trip() {
        let m = PolymerModel::new(
            vec![
                Polymer::new(0, -0.25).with_size(2.0),
                Polymer::new(1, 0.5),
                Polymer::new(2, 1e-3),
            ],
            &[(1, 0), (2, 1)],
        )
        .unwrap();
        let cover = CliqueCover::new(vec![vec![0, 1], vec![1, 2]]);
        let text = model_to_json(&m, &cover);
        let (m2, c2) = model_from_json(&text).unwrap();
        assert_eq!(m, m2);
        assert_eq!(cover, c2);
        assert_eq!(model_to_json(&m2, &c2), text);
    }

    #[test]
    fn defaults_and_errors() {
        let (m, c) = model_from_json(r#"{"polymers":[{"id":0,"log_weight":0.0}]}"#).unwrap();
        assert_eq!(m.size(0), 1.0);
        assert_eq!(c, CliqueCover::trivial(1));
        assert!(matches!(
            model_from_json("{\n\"polymers\": 3}"),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
