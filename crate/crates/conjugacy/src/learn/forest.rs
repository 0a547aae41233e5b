//! Random forests: bootstrapped trees with per-split feature subsets.

use crate::datagen::derive_rng;
use crate::error::{Error, Result};
use crate::learn::tree::{train_tree, Criterion, TreeNode, TreeParams};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VoteRule {
    Vote,
    Average,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<TreeNode>,
    pub seed: u64,
    pub feature_subset: usize,
    pub criterion: Criterion,
    pub vote_rule: VoteRule,
}

pub struct ForestParams {
    pub trees: usize,
    pub criterion: Criterion,
    pub depth_limit: Option<usize>,
    /// None = round(sqrt(dim))
    pub feature_subset: Option<usize>,
    pub vote_rule: VoteRule,
    pub seed: u64,
}

pub fn train_forest(x: &[Vec<f64>], y: &[u8], params: &ForestParams) -> Result<ForestModel> {
    if x.is_empty() {
        return Err(Error::EmptyData);
    }
    let dim = x[0].len();
    let subset = params
        .feature_subset
        .unwrap_or_else(|| ((dim as f64).sqrt().round() as usize).clamp(1, dim));
    let trees: Vec<TreeNode> = (0..params.trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_rng(params.seed, &format!("forest/tree/{}", t));
            let idx: Vec<usize> = (0..x.len()).map(|_| rng.gen_range(0..x.len())).collect();
            let bx: Vec<Vec<f64>> = idx.iter().map(|&i| x[i].clone()).collect();
            let by: Vec<u8> = idx.iter().map(|&i| y[i]).collect();
            let tp = TreeParams {
                criterion: params.criterion,
                depth_limit: params.depth_limit,
                feature_subset: Some(subset),
            };
            train_tree(&bx, &by, &tp, Some(&mut rng))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestModel {
        trees,
        seed: params.seed,
        feature_subset: subset,
        criterion: params.criterion,
        vote_rule: params.vote_rule,
    })
}

impl ForestModel {
    /// Plurality vote (or probability average); ties go to non-conjugate.
    pub fn predict(&self, x: &[f64]) -> u8 {
        match self.vote_rule {
            VoteRule::Vote => {
                let ones = self.trees.iter().filter(|t| t.predict(x) == 1).count();
                if 2 * ones > self.trees.len() {
                    1
                } else {
                    0
                }
            }
            VoteRule::Average => {
                let score: f64 = self
                    .trees
                    .iter()
                    .map(|t| leaf_probability(t, x))
                    .sum::<f64>()
                    / self.trees.len() as f64;
                if score > 0.5 {
                    1
                } else {
                    0
                }
            }
        }
    }
}

fn leaf_probability(t: &TreeNode, x: &[f64]) -> f64 {
    match t {
        TreeNode::Leaf { counts, .. } => {
            let n = counts[0] + counts[1];
            if n == 0 {
                0.5
            } else {
                counts[1] as f64 / n as f64
            }
        }
        TreeNode::Split { feature, threshold, left, right } => {
            if x[*feature] <= *threshold {
                leaf_probability(left, x)
            } else {
                leaf_probability(right, x)
            }
        }
    }
}
