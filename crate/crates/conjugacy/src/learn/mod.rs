//! Classifiers for the conjugacy decision task: decision trees, random
//! forests, and n-tuple lookup networks, plus a common on-disk model format.

pub mod forest;
pub mod ntnn;
pub mod tree;

use crate::datagen::Dataset;
use crate::error::{Error, Result};
use crate::features::Extractor;
use crate::group::GroupHandle;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub use ntnn::Prediction;

/// A trained model together with the provenance needed to refuse
/// mismatched inputs later.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub group: String,
    pub recipe: String,
    pub model: Model,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Model {
    Tree { tree: tree::TreeNode, criterion: tree::Criterion },
    Forest(forest::ForestModel),
    Ntnn(ntnn::NtnnModel),
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

impl Model {
    pub fn predict(&self, x: &[f64]) -> Prediction {
        match self {
            Model::Tree { tree, .. } => Prediction::Class(tree.predict(x)),
            Model::Forest(f) => Prediction::Class(f.predict(x)),
            Model::Ntnn(n) => n.classify(x),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Model::Tree { .. } => "tree",
            Model::Forest(_) => "forest",
            Model::Ntnn(_) => "ntnn",
        }
    }
}

impl ModelFile {
    pub fn new(group: &str, recipe: &str, model: Model) -> ModelFile {
        ModelFile {
            version: MODEL_FORMAT_VERSION,
            group: group.to_string(),
            recipe: recipe.to_string(),
            model,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let js = serde_json::to_string_pretty(self)?;
        std::fs::write(path, js)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<ModelFile> {
        let text = std::fs::read_to_string(path)?;
        let mf: ModelFile = serde_json::from_str(&text)?;
        if mf.version > MODEL_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "model format version {} is newer than supported {}",
                mf.version, MODEL_FORMAT_VERSION
            )));
        }
        Ok(mf)
    }

    /// Rejects evaluation against data from a different group or feature
    /// recipe than the model was trained on.
    pub fn check_compatible(&self, group: &str, recipe: &str) -> Result<()> {
        if self.group != group || self.recipe != recipe {
            return Err(Error::Refusal(format!(
                "model was trained on group '{}' with recipe '{}', got group '{}' with recipe '{}'",
                self.group, self.recipe, group, recipe
            )));
        }
        Ok(())
    }
}

/// Runs the feature recipe over every pair in a dataset.
pub fn featurize(
    dataset: &Dataset,
    group: &GroupHandle,
    extractor: &Extractor,
) -> Result<(Vec<Vec<f64>>, Vec<u8>)> {
    let mut x = Vec::with_capacity(dataset.pairs.len());
    let mut y = Vec::with_capacity(dataset.pairs.len());
    for pair in &dataset.pairs {
        x.push(extractor.pair_features(group, &pair.u, &pair.v)?);
        y.push(pair.label);
    }
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::derive_rng;
    use tempfile::tempdir;

    fn toy() -> (Vec<Vec<f64>>, Vec<u8>) {
        let x: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i % 2) as f64, (i % 7) as f64])
            .collect();
        let y: Vec<u8> = (0..40).map(|i| (i % 2) as u8).collect();
        (x, y)
    }

    #[test]
    fn model_file_round_trips_all_families() {
        let (x, y) = toy();
        let dir = tempdir().unwrap();
        let params = tree::TreeParams {
            criterion: tree::Criterion::Gini,
            depth_limit: Some(4),
            feature_subset: None,
        };
        let t = tree::train_tree(&x, &y, &params, None).unwrap();
        let f = forest::train_forest(
            &x,
            &y,
            &forest::ForestParams {
                trees: 5,
                criterion: tree::Criterion::Entropy,
                depth_limit: Some(4),
                feature_subset: None,
                vote_rule: forest::VoteRule::Vote,
                seed: 3,
            },
        )
        .unwrap();
        let mut rng = derive_rng(4, "mf");
        let n = ntnn::NtnnModel::train(&x, &y, 2, 1, ntnn::VoteCriterion::Voting, &mut rng)
            .unwrap();
        let models = vec![
            Model::Tree { tree: t, criterion: tree::Criterion::Gini },
            Model::Forest(f),
            Model::Ntnn(n),
        ];
        for (i, m) in models.into_iter().enumerate() {
            let path = dir.path().join(format!("m{}.json", i));
            let mf = ModelFile::new("bs12", "c0", m);
            mf.save(&path).unwrap();
            let back = ModelFile::load(&path).unwrap();
            assert_eq!(back.version, MODEL_FORMAT_VERSION);
            assert_eq!(back.model.family(), mf.model.family());
            for xi in &x {
                assert_eq!(back.model.predict(xi), mf.model.predict(xi));
            }
        }
    }

    #[test]
    fn compatibility_check_refuses_mismatch() {
        let (x, y) = toy();
        let params = tree::TreeParams {
            criterion: tree::Criterion::Gini,
            depth_limit: Some(2),
            feature_subset: None,
        };
        let t = tree::train_tree(&x, &y, &params, None).unwrap();
        let mf = ModelFile::new("bs12", "c1", Model::Tree {
            tree: t,
            criterion: tree::Criterion::Gini,
        });
        assert!(mf.check_compatible("bs12", "c1").is_ok());
        assert!(matches!(
            mf.check_compatible("sl2z", "c1"),
            Err(Error::Refusal(_))
        ));
        assert!(matches!(
            mf.check_compatible("bs12", "c2"),
            Err(Error::Refusal(_))
        ));
    }
}
