//! Binary decision trees with gini/entropy split criteria.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Gini,
    Entropy,
}

impl Criterion {
    pub fn parse(s: &str) -> Result<Criterion> {
        match s {
            "gini" => Ok(Criterion::Gini),
            "entropy" => Ok(Criterion::Entropy),
            _ => Err(Error::Config(format!("unknown criterion '{}'", s))),
        }
    }

    fn impurity(&self, counts: &[usize; 2]) -> f64 {
        let n = (counts[0] + counts[1]) as f64;
        if n == 0.0 {
            return 0.0;
        }
        let p0 = counts[0] as f64 / n;
        let p1 = counts[1] as f64 / n;
        match self {
            Criterion::Gini => 1.0 - p0 * p0 - p1 * p1,
            Criterion::Entropy => {
                let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
                term(p0) + term(p1)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        class: u8,
        counts: [usize; 2],
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn predict(&self, x: &[f64]) -> u8 {
        match self {
            TreeNode::Leaf { class, .. } => *class,
            TreeNode::Split { feature, threshold, left, right } => {
                if x[*feature] <= *threshold {
                    left.predict(x)
                } else {
                    right.predict(x)
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

/// Depth limit rule: floor(log2(sample count)) - 1, at least 1.
pub fn default_depth_limit(n_samples: usize) -> usize {
    let log = (usize::BITS - 1 - n_samples.leading_zeros()) as usize;
    log.saturating_sub(1).max(1)
}

pub struct TreeParams {
    pub criterion: Criterion,
    pub depth_limit: Option<usize>,
    /// candidate features per split; None = all
    pub feature_subset: Option<usize>,
}

pub fn train_tree(
    x: &[Vec<f64>],
    y: &[u8],
    params: &TreeParams,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<TreeNode> {
    if x.is_empty() {
        return Err(Error::EmptyData);
    }
    let idx: Vec<usize> = (0..x.len()).collect();
    let mut rng = rng;
    Ok(grow(x, y, &idx, params, 0, &mut rng))
}

fn class_counts(y: &[u8], idx: &[usize]) -> [usize; 2] {
    let mut c = [0usize; 2];
    for &i in idx {
        c[y[i] as usize] += 1;
    }
    c
}

fn majority(counts: &[usize; 2]) -> u8 {
    // ties fall to class 0 (non-conjugate), matching the forest tie rule
    if counts[1] > counts[0] {
        1
    } else {
        0
    }
}

fn grow(
    x: &[Vec<f64>],
    y: &[u8],
    idx: &[usize],
    params: &TreeParams,
    depth: usize,
    rng: &mut Option<&mut ChaCha8Rng>,
) -> TreeNode {
    let counts = class_counts(y, idx);
    let leaf = TreeNode::Leaf { class: majority(&counts), counts };
    if counts[0] == 0 || counts[1] == 0 || idx.len() < 2 {
        return leaf;
    }
    if let Some(limit) = params.depth_limit {
        if depth >= limit {
            return leaf;
        }
    }
    let dim = x[0].len();
    let features: Vec<usize> = match (params.feature_subset, rng.as_deref_mut()) {
        (Some(k), Some(rng)) if k < dim => {
            let mut all: Vec<usize> = (0..dim).collect();
            all.shuffle(rng);
            let mut sub = all[..k].to_vec();
            sub.sort_unstable();
            sub
        }
        _ => (0..dim).collect(),
    };
    let parent_impurity = params.criterion.impurity(&counts);
    let mut best: Option<(f64, usize, f64)> = None; // (gain, feature, threshold)
    for &f in &features {
        let mut vals: Vec<(f64, u8)> = idx.iter().map(|&i| (x[i][f], y[i])).collect();
        vals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let total = counts;
        let mut left = [0usize; 2];
        let n = vals.len() as f64;
        for w in 0..vals.len() - 1 {
            left[vals[w].1 as usize] += 1;
            if vals[w].0 == vals[w + 1].0 {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let nl = (left[0] + left[1]) as f64;
            let nr = n - nl;
            let child = (nl / n) * params.criterion.impurity(&left)
                + (nr / n) * params.criterion.impurity(&right);
            let gain = parent_impurity - child;
            let threshold = (vals[w].0 + vals[w + 1].0) / 2.0;
            let better = match best {
                None => true,
                Some((bg, bf, bt)) => {
                    gain > bg + 1e-12
                        || ((gain - bg).abs() <= 1e-12 && (f, threshold) < (bf, bt))
                }
            };
            if better {
                best = Some((gain, f, threshold));
            }
        }
    }
    let Some((_, feature, threshold)) = best else {
        return leaf;
    };
    let (li, ri): (Vec<usize>, Vec<usize>) =
        idx.iter().partition(|&&i| x[i][feature] <= threshold);
    let left = grow(x, y, &li, params, depth + 1, rng);
    let right = grow(x, y, &ri, params, depth + 1, rng);
    TreeNode::Split {
        feature,
        threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(criterion: Criterion) -> TreeParams {
        TreeParams { criterion, depth_limit: None, feature_subset: None }
    }

    #[test]
    fn separable_pair_gives_depth_one() {
        let x = vec![vec![0.0], vec![1.0]];
        let y = vec![0, 1];
        let t = train_tree(&x, &y, &params(Criterion::Gini), None).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(t.predict(&[0.0]), 0);
        assert_eq!(t.predict(&[1.0]), 1);
    }

    #[test]
    fn single_class_is_a_leaf() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0]];
        let y = vec![1, 1, 1];
        let t = train_tree(&x, &y, &params(Criterion::Entropy), None).unwrap();
        assert_eq!(t.depth(), 0);
        assert_eq!(t.predict(&[5.0]), 1);
    }

    #[test]
    fn xor_needs_depth_two() {
        let x = vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
        ];
        let y = vec![0, 1, 1, 0];
        let t = train_tree(&x, &y, &params(Criterion::Gini), None).unwrap();
        assert_eq!(t.depth(), 2);
        for (xi, yi) in x.iter().zip(y.iter()) {
            assert_eq!(t.predict(xi), *yi);
        }
    }

    #[test]
    fn empty_data_errors() {
        assert!(matches!(
            train_tree(&[], &[], &params(Criterion::Gini), None),
            Err(Error::EmptyData)
        ));
    }

    #[test]
    fn depth_limit_respected() {
        let x: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64]).collect();
        let y: Vec<u8> = (0..16).map(|i| (i % 2) as u8).collect();
        let p = TreeParams {
            criterion: Criterion::Gini,
            depth_limit: Some(2),
            feature_subset: None,
        };
        let t = train_tree(&x, &y, &p, None).unwrap();
        assert!(t.depth() <= 2);
    }

    #[test]
    fn default_depth_rule() {
        assert_eq!(default_depth_limit(2), 1);
        assert_eq!(default_depth_limit(4), 1);
        assert_eq!(default_depth_limit(8), 2);
        assert_eq!(default_depth_limit(4000), 10);
    }
}
