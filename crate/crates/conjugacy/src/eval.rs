//! Evaluation of trained classifiers: accuracy, confusion tables,
//! per-length accuracy series, and detection of the length beyond which
//! accuracy settles.

use crate::error::{Error, Result};
use crate::learn::Prediction;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Fraction of predictions matching the true label. Reserved decisions
/// count as incorrect.
pub fn accuracy(y_true: &[u8], preds: &[Prediction]) -> Result<f64> {
    if y_true.is_empty() {
        return Err(Error::EmptyData);
    }
    let correct = y_true
        .iter()
        .zip(preds.iter())
        .filter(|(y, p)| **p == Prediction::Class(**y))
        .count();
    Ok(correct as f64 / y_true.len() as f64)
}

/// rows: true class (0 = non-conjugate, 1 = conjugate);
/// columns: predicted non-conjugate, predicted conjugate, reserved
pub fn confusion(y_true: &[u8], preds: &[Prediction]) -> [[u64; 3]; 2] {
    let mut c = [[0u64; 3]; 2];
    for (y, p) in y_true.iter().zip(preds.iter()) {
        let col = match p {
            Prediction::Class(0) => 0,
            Prediction::Class(_) => 1,
            Prediction::Reserved => 2,
        };
        c[*y as usize][col] += 1;
    }
    c
}

/// Accuracy bucketed by the length of the first word of each pair.
pub fn per_length_accuracy(
    lengths: &[u64],
    y_true: &[u8],
    preds: &[Prediction],
) -> BTreeMap<u64, (u64, u64)> {
    let mut buckets: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    for ((l, y), p) in lengths.iter().zip(y_true.iter()).zip(preds.iter()) {
        let e = buckets.entry(*l).or_insert((0, 0));
        if *p == Prediction::Class(*y) {
            e.0 += 1;
        }
        e.1 += 1;
    }
    buckets
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// length beyond which the series is judged to have settled
    pub threshold: u64,
    pub mean_below: f64,
    pub mean_above: f64,
    pub gap: f64,
    /// true when another candidate achieved the same gap
    pub tied: bool,
}

/// Finds the length L splitting an accuracy series into a "short words"
/// and a "long words" regime. Candidates are the interior lengths where
/// the second difference of the series is nonzero; the winner maximizes
/// the absolute difference between the mean accuracy below L and the mean
/// at or above L. A series with no curvature (constant or affine) reports
/// the smallest length with gap 0.
pub fn length_threshold(lengths: &[u64], values: &[f64]) -> Result<ThresholdReport> {
    if lengths.len() != values.len() {
        return Err(Error::Config(
            "length and accuracy series differ in size".to_string(),
        ));
    }
    if lengths.len() < 3 {
        return Err(Error::SeriesTooShort(lengths.len()));
    }
    let n = lengths.len();
    let mut candidates = Vec::new();
    for i in 1..n - 1 {
        let dd = values[i + 1] - 2.0 * values[i] + values[i - 1];
        if dd.abs() > 1e-12 {
            candidates.push(i);
        }
    }
    if candidates.is_empty() {
        let mean = values.iter().sum::<f64>() / n as f64;
        return Ok(ThresholdReport {
            threshold: lengths[0],
            mean_below: mean,
            mean_above: mean,
            gap: 0.0,
            tied: false,
        });
    }
    let mut best: Option<(f64, usize)> = None;
    let mut tied = false;
    for &i in &candidates {
        let below = &values[..i];
        let above = &values[i..];
        let mb = below.iter().sum::<f64>() / below.len() as f64;
        let ma = above.iter().sum::<f64>() / above.len() as f64;
        let gap = (ma - mb).abs();
        match best {
            None => best = Some((gap, i)),
            Some((bg, _)) if gap > bg + 1e-12 => {
                best = Some((gap, i));
                tied = false;
            }
            Some((bg, _)) if (gap - bg).abs() <= 1e-12 => tied = true,
            _ => {}
        }
    }
    let (gap, i) = best.unwrap();
    let mb = values[..i].iter().sum::<f64>() / i as f64;
    let ma = values[i..].iter().sum::<f64>() / (n - i) as f64;
    Ok(ThresholdReport {
        threshold: lengths[i],
        mean_below: mb,
        mean_above: ma,
        gap,
        tied,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub group: String,
    pub recipe: String,
    pub family: String,
    pub samples: usize,
    pub accuracy: f64,
    pub confusion: [[u64; 3]; 2],
    /// length -> (correct, total)
    pub per_length: BTreeMap<u64, (u64, u64)>,
    pub threshold: Option<ThresholdReport>,
}

impl EvalReport {
    pub fn build(
        group: &str,
        recipe: &str,
        family: &str,
        lengths: &[u64],
        y_true: &[u8],
        preds: &[Prediction],
    ) -> Result<EvalReport> {
        let acc = accuracy(y_true, preds)?;
        let per_length = per_length_accuracy(lengths, y_true, preds);
        let series_l: Vec<u64> = per_length.keys().copied().collect();
        let series_v: Vec<f64> = per_length
            .values()
            .map(|(c, t)| *c as f64 / *t as f64)
            .collect();
        let threshold = length_threshold(&series_l, &series_v).ok();
        Ok(EvalReport {
            group: group.to_string(),
            recipe: recipe.to_string(),
            family: family.to_string(),
            samples: y_true.len(),
            accuracy: acc,
            confusion: confusion(y_true, preds),
            per_length,
            threshold,
        })
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "group {}  recipe {}  model {}  samples {}",
            self.group, self.recipe, self.family, self.samples
        )?;
        writeln!(f, "accuracy {:.4}", self.accuracy)?;
        writeln!(f, "confusion (rows: true non-conj, conj)")?;
        writeln!(f, "  {:>10} {:>10} {:>10}", "non-conj", "conj", "reserved")?;
        for (name, row) in ["non-conj", "conj"].iter().zip(self.confusion.iter()) {
            writeln!(
                f,
                "  {:>8}: {:>8} {:>10} {:>10}",
                name, row[0], row[1], row[2]
            )?;
        }
        if !self.per_length.is_empty() {
            writeln!(f, "accuracy by length of u:")?;
            for (l, (c, t)) in &self.per_length {
                writeln!(f, "  {:>6}: {:.4} ({}/{})", l, *c as f64 / *t as f64, c, t)?;
            }
        }
        if let Some(t) = &self.threshold {
            writeln!(
                f,
                "settling length {} (mean below {:.4}, at/above {:.4}, gap {:.4}{})",
                t.threshold,
                t.mean_below,
                t.mean_above,
                t.gap,
                if t.tied { ", tied" } else { "" }
            )?;
        }
        Ok(())
    }
}
