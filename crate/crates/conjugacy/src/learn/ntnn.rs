//! N-tuple neural network: a weightless classifier storing, per class and
//! index pattern, how often each projected value tuple occurred in training.
//! Classification sums table counts (or their logs); no strict maximum means
//! the decision is reserved.
//!
//! Each class owns a permutation of all C(N,P) patterns, realized as an
//! affine bijection i -> (a*i + b) mod C decoded by combinatorial unranking,
//! so the cursor into the permutation survives serialization without
//! materializing millions of patterns.

use crate::datagen::derive_rng;
use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub type Pattern = Vec<u16>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteCriterion {
    Voting,
    LogVoting,
}

impl VoteCriterion {
    pub fn parse(s: &str) -> Result<VoteCriterion> {
        match s {
            "voting" => Ok(VoteCriterion::Voting),
            "log_voting" | "log-voting" => Ok(VoteCriterion::LogVoting),
            _ => Err(Error::Config(format!("unknown vote criterion '{}'", s))),
        }
    }

    /// Per-table contribution of a count; absent keys contribute 0.
    fn contribution(&self, count: u64) -> f64 {
        match self {
            VoteCriterion::Voting => count as f64,
            VoteCriterion::LogVoting => {
                if count == 0 {
                    0.0
                } else {
                    (count as f64).ln()
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    Class(u8),
    Reserved,
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Lexicographic unranking of a k-subset of {0..n-1}.
fn unrank(mut rank: u128, n: u64, k: u64) -> Pattern {
    let mut out = Vec::with_capacity(k as usize);
    let mut next = 0u64;
    let mut remaining = k;
    while remaining > 0 {
        let with_next = binomial(n - next - 1, remaining - 1);
        if rank < with_next {
            out.push(next as u16);
            remaining -= 1;
        } else {
            rank -= with_next;
        }
        next += 1;
    }
    out
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// serde_json has no u128 support, so permutation state rides as strings
mod u128_str {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassState {
    #[serde(with = "u128_str")]
    pub perm_a: u128,
    #[serde(with = "u128_str")]
    pub perm_b: u128,
    /// next unused rank in this class's pattern permutation
    #[serde(with = "u128_str")]
    pub cursor: u128,
    pub active: Vec<Pattern>,
    /// one table per active pattern: projected tuple -> count
    #[serde(
        serialize_with = "serialize_tables",
        deserialize_with = "deserialize_tables"
    )]
    pub tables: Vec<HashMap<Vec<u64>, u64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NtnnModel {
    pub dim: usize,
    pub m: usize,
    pub p: usize,
    pub criterion: VoteCriterion,
    pub classes: Vec<ClassState>,
    pub train_counts: [usize; 2],
}

fn serialize_tables<S: serde::Serializer>(
    tables: &[HashMap<Vec<u64>, u64>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(tables.len()))?;
    for t in tables {
        let mut entries: Vec<(Vec<f64>, u64)> = t
            .iter()
            .map(|(k, v)| (k.iter().map(|b| f64::from_bits(*b)).collect(), *v))
            .collect();
        entries.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        seq.serialize_element(&entries)?;
    }
    seq.end()
}

fn deserialize_tables<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<HashMap<Vec<u64>, u64>>, D::Error> {
    let raw: Vec<Vec<(Vec<f64>, u64)>> = Deserialize::deserialize(d)?;
    Ok(raw
        .into_iter()
        .map(|t| {
            t.into_iter()
                .map(|(k, v)| (k.iter().map(|x| x.to_bits()).collect(), v))
                .collect()
        })
        .collect())
}

fn project(x: &[f64], pattern: &[u16]) -> Vec<u64> {
    pattern.iter().map(|&i| x[i as usize].to_bits()).collect()
}

fn train_table(
    x: &[Vec<f64>],
    y: &[u8],
    class: u8,
    pattern: &[u16],
) -> HashMap<Vec<u64>, u64> {
    let mut t = HashMap::new();
    for (xi, yi) in x.iter().zip(y.iter()) {
        if *yi == class {
            *t.entry(project(xi, pattern)).or_insert(0) += 1;
        }
    }
    t
}

impl NtnnModel {
    fn pattern_count(&self) -> u128 {
        binomial(self.dim as u64, self.p as u64)
    }

    /// Trains with explicit per-class pattern lists instead of randomly
    /// drawn ones.
    pub fn train_with_patterns(
        x: &[Vec<f64>],
        y: &[u8],
        patterns: [Vec<Pattern>; 2],
        criterion: VoteCriterion,
    ) -> Result<NtnnModel> {
        if x.is_empty() {
            return Err(Error::EmptyData);
        }
        let dim = x[0].len();
        let mut train_counts = [0usize; 2];
        for yi in y {
            train_counts[*yi as usize] += 1;
        }
        let m = patterns[0].len().max(patterns[1].len());
        let p = patterns[0]
            .first()
            .or(patterns[1].first())
            .map_or(0, |p| p.len());
        let classes = patterns
            .iter()
            .enumerate()
            .map(|(c, pats)| ClassState {
                perm_a: 1,
                perm_b: 0,
                cursor: 0,
                active: pats.clone(),
                tables: pats.iter().map(|pat| train_table(x, y, c as u8, pat)).collect(),
            })
            .collect();
        Ok(NtnnModel { dim, m, p, criterion, classes, train_counts })
    }

    pub fn train(
        x: &[Vec<f64>],
        y: &[u8],
        m: usize,
        p: usize,
        criterion: VoteCriterion,
        rng: &mut ChaCha8Rng,
    ) -> Result<NtnnModel> {
        if x.is_empty() {
            return Err(Error::EmptyData);
        }
        let dim = x[0].len();
        if p == 0 || p > dim {
            return Err(Error::PatternTooLarge { p, dim });
        }
        let total = binomial(dim as u64, p as u64);
        let m = m.min(total as usize);
        let mut train_counts = [0usize; 2];
        for yi in y {
            train_counts[*yi as usize] += 1;
        }
        let mut classes = Vec::with_capacity(2);
        for c in 0..2u8 {
            let perm_b = rng.gen_range(0..total as u64) as u128;
            let perm_a = loop {
                let a = rng.gen_range(1..total.max(2) as u64) as u128;
                if gcd(a, total) == 1 {
                    break a;
                }
            };
            let mut state = ClassState {
                perm_a,
                perm_b,
                cursor: 0,
                active: Vec::new(),
                tables: Vec::new(),
            };
            for i in 0..m as u128 {
                let pat = unrank((perm_a * i + perm_b) % total, dim as u64, p as u64);
                state.tables.push(train_table(x, y, c, &pat));
                state.active.push(pat);
            }
            state.cursor = m as u128;
            classes.push(state);
        }
        Ok(NtnnModel { dim, m, p, criterion, classes, train_counts })
    }

    pub fn scores(&self, x: &[f64]) -> [f64; 2] {
        let mut s = [0.0f64; 2];
        for (c, state) in self.classes.iter().enumerate() {
            for (pat, table) in state.active.iter().zip(state.tables.iter()) {
                let count = table.get(&project(x, pat)).copied().unwrap_or(0);
                s[c] += self.criterion.contribution(count);
            }
        }
        s
    }

    pub fn classify(&self, x: &[f64]) -> Prediction {
        let s = self.scores(x);
        if s[0] > s[1] {
            Prediction::Class(0)
        } else if s[1] > s[0] {
            Prediction::Class(1)
        } else {
            Prediction::Reserved
        }
    }

    pub fn accuracy(&self, x: &[Vec<f64>], y: &[u8]) -> f64 {
        if x.is_empty() {
            return 0.0;
        }
        let correct = x
            .iter()
            .zip(y.iter())
            .filter(|(xi, yi)| self.classify(xi) == Prediction::Class(**yi))
            .count();
        correct as f64 / x.len() as f64
    }
}

pub struct OptimizeParams {
    pub theta_omega: f64,
    /// candidate budget; None = one full pass over each class's list
    pub budget: Option<u128>,
}

pub struct OptimizeOutcome {
    pub accuracy: f64,
    pub swaps: usize,
    pub candidates_tried: u128,
    pub reached_goal: bool,
}

/// Greedy pattern-swap optimization, alternating between the class lists.
/// Each candidate pattern is trained on the training split, every possible
/// swap into the active set is scored on the optimization split, and the
/// best swap is kept when it strictly improves accuracy.
pub fn ntnn_optimize(
    model: &mut NtnnModel,
    si_x: &[Vec<f64>],
    si_y: &[u8],
    so_x: &[Vec<f64>],
    so_y: &[u8],
    params: &OptimizeParams,
) -> Result<OptimizeOutcome> {
    if so_x.is_empty() {
        return Err(Error::EmptyData);
    }
    let total = model.pattern_count();
    let n = so_x.len();
    // per class, per active pattern, per sample contribution
    let mut contrib: Vec<Vec<Vec<f64>>> = Vec::with_capacity(2);
    for state in &model.classes {
        let mut per_pat = Vec::with_capacity(state.active.len());
        for (pat, table) in state.active.iter().zip(state.tables.iter()) {
            per_pat.push(contributions(model.criterion, table, pat, so_x));
        }
        contrib.push(per_pat);
    }
    let totals = |contrib: &Vec<Vec<Vec<f64>>>| -> Vec<[f64; 2]> {
        (0..n)
            .map(|s| {
                let mut t = [0.0; 2];
                for c in 0..2 {
                    for pats in &contrib[c] {
                        t[c] += pats[s];
                    }
                }
                t
            })
            .collect()
    };
    let mut total_scores = totals(&contrib);
    let acc_of = |scores: &[[f64; 2]]| -> f64 {
        scores
            .iter()
            .zip(so_y.iter())
            .filter(|(s, yi)| {
                let pred = if s[0] > s[1] {
                    0u8
                } else if s[1] > s[0] {
                    1
                } else {
                    return false;
                };
                pred == **yi
            })
            .count() as f64
            / n as f64
    };
    let mut best_acc = acc_of(&total_scores);
    let budget = params.budget.unwrap_or(2 * total);
    let mut tried: u128 = 0;
    let mut swaps = 0usize;
    let mut exhausted = [false; 2];
    let mut c = 0usize;
    while best_acc < params.theta_omega && tried < budget && !(exhausted[0] && exhausted[1]) {
        if exhausted[c] {
            c = 1 - c;
            continue;
        }
        let state = &model.classes[c];
        if state.cursor >= total {
            exhausted[c] = true;
            c = 1 - c;
            continue;
        }
        let rank = (state.perm_a * state.cursor + state.perm_b) % total;
        let candidate = unrank(rank, model.dim as u64, model.p as u64);
        model.classes[c].cursor += 1;
        if model.classes[c].active.contains(&candidate) {
            c = 1 - c;
            continue;
        }
        tried += 1;
        let cand_table = train_table(si_x, si_y, c as u8, &candidate);
        let cand_contrib = contributions(model.criterion, &cand_table, &candidate, so_x);
        // best replacement position
        let mut best_swap: Option<(f64, usize)> = None;
        for m_idx in 0..model.classes[c].active.len() {
            let mut acc_count = 0usize;
            for s in 0..n {
                let mut sc = total_scores[s];
                sc[c] = sc[c] - contrib[c][m_idx][s] + cand_contrib[s];
                let pred = if sc[0] > sc[1] {
                    Some(0u8)
                } else if sc[1] > sc[0] {
                    Some(1)
                } else {
                    None
                };
                if pred == Some(so_y[s]) {
                    acc_count += 1;
                }
            }
            let acc = acc_count as f64 / n as f64;
            if best_swap.map_or(true, |(a, _)| acc > a) {
                best_swap = Some((acc, m_idx));
            }
        }
        if let Some((acc, m_idx)) = best_swap {
            if acc > best_acc {
                for s in 0..n {
                    total_scores[s][c] =
                        total_scores[s][c] - contrib[c][m_idx][s] + cand_contrib[s];
                }
                contrib[c][m_idx] = cand_contrib;
                model.classes[c].active[m_idx] = candidate;
                model.classes[c].tables[m_idx] = cand_table;
                best_acc = acc;
                swaps += 1;
                debug_assert!(
                    (acc_of(&total_scores) - best_acc).abs() < 1e-12,
                    "incremental accuracy drifted"
                );
            }
        }
        c = 1 - c;
    }
    Ok(OptimizeOutcome {
        accuracy: best_acc,
        swaps,
        candidates_tried: tried,
        reached_goal: best_acc >= params.theta_omega,
    })
}

fn contributions(
    criterion: VoteCriterion,
    table: &HashMap<Vec<u64>, u64>,
    pattern: &[u16],
    x: &[Vec<f64>],
) -> Vec<f64> {
    x.iter()
        .map(|xi| criterion.contribution(table.get(&project(xi, pattern)).copied().unwrap_or(0)))
        .collect()
}

/// Restart wrapper: retrains with fresh pattern permutations until the
/// optimization-split accuracy clears theta_alpha.
#[allow(clippy::too_many_arguments)]
pub fn ntnn_train_with_restarts(
    si_x: &[Vec<f64>],
    si_y: &[u8],
    so_x: &[Vec<f64>],
    so_y: &[u8],
    m: usize,
    p: usize,
    criterion: VoteCriterion,
    theta_alpha: f64,
    restarts: u64,
    seed: u64,
) -> Result<NtnnModel> {
    let mut best = f64::NEG_INFINITY;
    for r in 0..restarts {
        let mut rng = derive_rng(seed, &format!("ntnn/restart/{}", r));
        let model = NtnnModel::train(si_x, si_y, m, p, criterion, &mut rng)?;
        let acc = model.accuracy(so_x, so_y);
        if acc > theta_alpha {
            return Ok(model);
        }
        if acc > best {
            best = acc;
        }
    }
    Err(Error::RestartBudgetExceeded { threshold: theta_alpha, restarts, best })
}

pub const DEFAULT_THETA_ALPHA: f64 = 0.60;
pub const DEFAULT_THETA_OMEGA: f64 = 0.97;
pub const DEFAULT_RESTARTS: u64 = 20;

#[cfg(test)]
mod tests {
    use super::*;

    fn table1_samples() -> (Vec<Vec<f64>>, Vec<u8>) {
        (
            vec![
                vec![-4.0, -1.0, 5.0, 2.0, 3.0],
                vec![-4.0, -7.0, 5.0, 2.0, 3.0],
                vec![-2.0, -1.0, 6.0, 3.0, 1.0],
            ],
            vec![0, 0, 0],
        )
    }

    fn table1_model() -> NtnnModel {
        let (x, y) = table1_samples();
        NtnnModel::train_with_patterns(
            &x,
            &y,
            [vec![vec![0, 2, 4], vec![1, 2, 3]], vec![]],
            VoteCriterion::Voting,
        )
        .unwrap()
    }

    fn key(v: &[f64]) -> Vec<u64> {
        v.iter().map(|x| x.to_bits()).collect()
    }

    #[test]
    fn table1_entries_reproduce() {
        let m = table1_model();
        let t00 = &m.classes[0].tables[0];
        assert_eq!(t00.len(), 2);
        assert_eq!(t00.get(&key(&[-4.0, 5.0, 3.0])), Some(&2));
        assert_eq!(t00.get(&key(&[-2.0, 6.0, 1.0])), Some(&1));
        let t10 = &m.classes[0].tables[1];
        assert_eq!(t10.len(), 3);
        assert_eq!(t10.get(&key(&[-1.0, 5.0, 2.0])), Some(&1));
        assert_eq!(t10.get(&key(&[-7.0, 5.0, 2.0])), Some(&1));
        assert_eq!(t10.get(&key(&[-1.0, 6.0, 3.0])), Some(&1));
        assert!(m.classes[1].tables.is_empty());
    }

    #[test]
    fn table1_classification() {
        let m = table1_model();
        assert_eq!(
            m.classify(&[-4.0, -1.0, 5.0, 2.0, 3.0]),
            Prediction::Class(0)
        );
        // unseen everywhere: 0 vs 0 is reserved
        assert_eq!(
            m.classify(&[9.0, 9.0, 9.0, 9.0, 9.0]),
            Prediction::Reserved
        );
    }

    #[test]
    fn table_mass_conservation_and_order_independence() {
        let (x, y) = table1_samples();
        let m = table1_model();
        for t in &m.classes[0].tables {
            let total: u64 = t.values().sum();
            assert_eq!(total, 3);
        }
        let xr: Vec<Vec<f64>> = x.iter().rev().cloned().collect();
        let yr: Vec<u8> = y.iter().rev().cloned().collect();
        let m2 = NtnnModel::train_with_patterns(
            &xr,
            &yr,
            [vec![vec![0, 2, 4], vec![1, 2, 3]], vec![]],
            VoteCriterion::Voting,
        )
        .unwrap();
        assert_eq!(m.classes[0].tables, m2.classes[0].tables);
    }

    #[test]
    fn unrank_is_a_bijection() {
        let n = 6u64;
        let k = 3u64;
        let total = binomial(n, k);
        assert_eq!(total, 20);
        let mut seen = std::collections::HashSet::new();
        for i in 0..total {
            let pat = unrank(i, n, k);
            assert_eq!(pat.len(), 3);
            assert!(pat.windows(2).all(|w| w[0] < w[1]));
            assert!(seen.insert(pat));
        }
        assert_eq!(seen.len(), 20);
    }

    #[test]
    fn pattern_too_large_rejected() {
        let x = vec![vec![1.0, 2.0]];
        let y = vec![0];
        let mut rng = derive_rng(1, "p");
        assert!(matches!(
            NtnnModel::train(&x, &y, 2, 3, VoteCriterion::Voting, &mut rng),
            Err(Error::PatternTooLarge { .. })
        ));
    }

    fn toy_separable(n: usize) -> (Vec<Vec<f64>>, Vec<u8>) {
        // class determined by feature 0; features 1..3 are noise-ish
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let c = (i % 2) as u8;
            x.push(vec![
                c as f64,
                (i % 5) as f64,
                ((i * 3) % 7) as f64,
                ((i * 5) % 3) as f64,
            ]);
            y.push(c);
        }
        (x, y)
    }

    #[test]
    fn optimizer_never_decreases_accuracy() {
        let (x, y) = toy_separable(60);
        let mut rng = derive_rng(9, "opt");
        let mut model = NtnnModel::train(&x, &y, 2, 2, VoteCriterion::Voting, &mut rng).unwrap();
        let before = model.accuracy(&x, &y);
        let out = ntnn_optimize(
            &mut model,
            &x,
            &y,
            &x,
            &y,
            &OptimizeParams { theta_omega: 0.99, budget: None },
        )
        .unwrap();
        assert!(out.accuracy >= before - 1e-12);
        assert!((model.accuracy(&x, &y) - out.accuracy).abs() < 1e-12);
    }

    #[test]
    fn optimizer_finds_informative_pattern() {
        let (x, y) = toy_separable(60);
        // start from the noise pattern only
        let mut model = NtnnModel::train_with_patterns(
            &x,
            &y,
            [vec![vec![1, 2]], vec![vec![1, 2]]],
            VoteCriterion::Voting,
        )
        .unwrap();
        // give it a real permutation state so optimize can walk candidates
        for state in &mut model.classes {
            state.perm_a = 1;
            state.perm_b = 0;
            state.cursor = 0;
        }
        let out = ntnn_optimize(
            &mut model,
            &x,
            &y,
            &x,
            &y,
            &OptimizeParams { theta_omega: 1.0, budget: None },
        )
        .unwrap();
        assert!(out.accuracy >= 0.99, "accuracy {}", out.accuracy);
        // the winning active sets involve feature 0
        assert!(model
            .classes
            .iter()
            .any(|s| s.active.iter().any(|p| p.contains(&0))));
    }

    #[test]
    fn restart_budget_errors_when_unreachable() {
        // constant features: every sample projects identically, scores tie
        let x = vec![vec![1.0, 1.0]; 10];
        let y: Vec<u8> = (0..10).map(|i| (i % 2) as u8).collect();
        let err = ntnn_train_with_restarts(&x, &y, &x, &y, 1, 1, VoteCriterion::Voting, 0.6, 3, 5);
        assert!(matches!(err, Err(Error::RestartBudgetExceeded { .. })));
    }

    #[test]
    fn serialization_round_trip() {
        let (x, y) = toy_separable(30);
        let mut rng = derive_rng(2, "ser");
        let model = NtnnModel::train(&x, &y, 3, 2, VoteCriterion::LogVoting, &mut rng).unwrap();
        let js = serde_json::to_string(&model).unwrap();
        let back: NtnnModel = serde_json::from_str(&js).unwrap();
        for xi in &x {
            assert_eq!(model.classify(xi), back.classify(xi));
        }
        assert_eq!(back.classes[0].cursor, model.classes[0].cursor);
    }
}
