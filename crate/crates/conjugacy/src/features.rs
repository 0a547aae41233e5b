//! Feature extraction: exponent-vector features n0/n1, generator counts
//! f0/f1, counting-subgraph features f2..f7, SL(2,Z) matrix features fm, and
//! the pair vectors c0/c1/c2/c4/cm by concatenation.

use crate::error::{Error, Result};
use crate::group::{Engine, GroupHandle};
use crate::word::Word;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::HashMap;

pub type Letter = (usize, i8);

/// How counting-subgraph index entries are admitted and deduplicated. The
/// groups need different rules to land on the published dimensions; see the
/// unit tests pinning 24/48 and 20.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexStyle {
    /// Every freely reduced string is an entry (no group structure).
    FreeReduced,
    /// Entries are cyclically reduced strings whose element has geodesic
    /// length exactly l+2; group-equal strings stay separate entries.
    GeodesicStrings,
    /// Entries are group elements: reduced strings deduplicated by normal
    /// form, excluding elements that are a power of a single generator.
    ElementClasses,
}

pub fn default_style(g: &GroupHandle) -> IndexStyle {
    match g.engine {
        Engine::Sl2z(_) => IndexStyle::ElementClasses,
        _ => IndexStyle::GeodesicStrings,
    }
}

#[derive(Debug, Clone)]
pub struct IndexEntry {
    /// shortlex-least spelling, used as the canonical label
    pub label: Vec<Letter>,
    pub spellings: Vec<Vec<Letter>>,
}

#[derive(Debug, Clone)]
pub struct CountingSubgraphIndex {
    pub l: usize,
    pub style: IndexStyle,
    pub entries: Vec<IndexEntry>,
    lookup: HashMap<Vec<Letter>, usize>,
}

fn all_letters(n_gens: usize) -> Vec<Letter> {
    let mut v = Vec::with_capacity(2 * n_gens);
    for g in 0..n_gens {
        v.push((g, 1));
        v.push((g, -1));
    }
    v
}

fn reduced_strings(n_gens: usize, len: usize) -> Vec<Vec<Letter>> {
    let letters = all_letters(n_gens);
    let mut out = Vec::new();
    let mut cur: Vec<Letter> = Vec::new();
    fn rec(letters: &[Letter], len: usize, cur: &mut Vec<Letter>, out: &mut Vec<Vec<Letter>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for &l in letters {
            if let Some(&last) = cur.last() {
                if last.0 == l.0 && last.1 == -l.1 {
                    continue;
                }
            }
            cur.push(l);
            rec(letters, len, cur, out);
            cur.pop();
        }
    }
    rec(&letters, len, &mut cur, &mut out);
    out
}

fn cyclically_reduced(s: &[Letter]) -> bool {
    match (s.first(), s.last()) {
        (Some(&f), Some(&l)) => !(f.0 == l.0 && f.1 == -l.1),
        _ => true,
    }
}

/// True geodesic lengths of all elements in the radius-`r` ball, keyed by
/// normal form.
fn geodesic_ball(g: &GroupHandle, r: usize) -> Result<HashMap<Word, usize>> {
    let mut dist: HashMap<Word, usize> = HashMap::new();
    dist.insert(Word::empty(), 0);
    let mut frontier = vec![Word::empty()];
    for d in 1..=r {
        let mut next = Vec::new();
        for w in &frontier {
            for &(gen, sign) in &all_letters(g.alphabet.len()) {
                let step = Word::from_letters(&[(gen, sign)]);
                let nf = g.multiply(w, &step)?;
                if !dist.contains_key(&nf) {
                    dist.insert(nf.clone(), d);
                    next.push(nf);
                }
            }
        }
        frontier = next;
    }
    Ok(dist)
}

impl CountingSubgraphIndex {
    pub fn build(g: &GroupHandle, l: usize, style: IndexStyle) -> Result<Self> {
        assert!((1..=3).contains(&l), "middle-word length must be 1..3");
        let len = l + 2;
        let strings = reduced_strings(g.alphabet.len(), len);
        let mut entries: Vec<IndexEntry> = Vec::new();
        match style {
            IndexStyle::FreeReduced => {
                for s in strings {
                    entries.push(IndexEntry { label: s.clone(), spellings: vec![s] });
                }
            }
            IndexStyle::GeodesicStrings => {
                let ball = geodesic_ball(g, len)?;
                for s in strings {
                    if !cyclically_reduced(&s) {
                        continue;
                    }
                    let nf = g.normal_form(&Word::from_letters(&s))?;
                    if ball.get(&nf) == Some(&len) {
                        entries.push(IndexEntry { label: s.clone(), spellings: vec![s] });
                    }
                }
            }
            IndexStyle::ElementClasses => {
                // elements that are powers of one generator are excluded
                let mut excluded: HashMap<Word, ()> = HashMap::new();
                for gen in 0..g.alphabet.len() {
                    for k in -(len as i64)..=len as i64 {
                        let nf = g.normal_form(&Word::power(gen, BigInt::from(k)))?;
                        excluded.insert(nf, ());
                    }
                }
                let mut classes: HashMap<Word, Vec<Vec<Letter>>> = HashMap::new();
                let mut order: Vec<Word> = Vec::new();
                for s in strings {
                    let nf = g.normal_form(&Word::from_letters(&s))?;
                    if excluded.contains_key(&nf) {
                        continue;
                    }
                    let slot = classes.entry(nf.clone()).or_insert_with(|| {
                        order.push(nf);
                        Vec::new()
                    });
                    slot.push(s);
                }
                for key in order {
                    let spellings = classes.remove(&key).unwrap();
                    // enumeration was in shortlex-letter order already
                    entries.push(IndexEntry { label: spellings[0].clone(), spellings });
                }
            }
        }
        let mut lookup = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            for s in &e.spellings {
                lookup.insert(s.clone(), i);
            }
        }
        Ok(CountingSubgraphIndex { l, style, entries, lookup })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry_of(&self, s: &[Letter]) -> Option<usize> {
        self.lookup.get(s).copied()
    }
}

/// Occurrences of the letter pattern `p` in `w`, counting overlaps, without
/// expanding runs.
fn count_occurrences(w: &Word, p: &[Letter]) -> f64 {
    if p.is_empty() {
        return 0.0;
    }
    // pattern as runs of (gen, signed count)
    let mut pruns: Vec<(usize, i64)> = Vec::new();
    for &(g, s) in p {
        match pruns.last_mut() {
            Some((lg, le)) if *lg == g && (*le < 0) == (s < 0) => *le += s as i64,
            _ => pruns.push((g, s as i64)),
        }
    }
    let runs = w.runs();
    if pruns.len() == 1 {
        let (g, c) = pruns[0];
        let want_neg = c < 0;
        let need = BigInt::from(c.abs());
        let mut total = BigInt::zero();
        for r in runs {
            if r.gen == g && r.exp.is_negative() == want_neg && r.exp.abs() >= need {
                total += r.exp.abs() - &need + 1;
            }
        }
        return total.to_f64().unwrap_or(f64::MAX);
    }
    let m = pruns.len();
    if runs.len() < m {
        return 0.0;
    }
    let mut total = 0u64;
    'outer: for start in 0..=runs.len() - m {
        for (k, &(g, c)) in pruns.iter().enumerate() {
            let r = &runs[start + k];
            if r.gen != g || r.exp.is_negative() != (c < 0) {
                continue 'outer;
            }
            let need = BigInt::from(c.abs());
            let ok = if k == 0 || k == m - 1 {
                r.exp.abs() >= need
            } else {
                r.exp.abs() == need
            };
            if !ok {
                continue 'outer;
            }
        }
        total += 1;
    }
    total as f64
}

fn word_len_f64(w: &Word) -> f64 {
    w.len().to_f64().unwrap_or(f64::MAX)
}

/// f2/f4/f6 (unweighted) and f3/f5/f7 (weighted).
pub fn count_subwords(w: &Word, idx: &CountingSubgraphIndex, weighted: bool) -> Result<Vec<f64>> {
    let mut out = vec![0.0; idx.dim()];
    for (i, e) in idx.entries.iter().enumerate() {
        for s in &e.spellings {
            out[i] += count_occurrences(w, s);
        }
    }
    if weighted {
        let len = word_len_f64(w);
        if len == 0.0 {
            return Err(Error::ZeroLength);
        }
        for v in &mut out {
            *v /= len;
        }
    }
    Ok(out)
}

/// f0/f1: occurrences of each generator (inverses counted with it).
pub fn generator_count(w: &Word, g: &GroupHandle, weighted: bool) -> Result<Vec<f64>> {
    let mut out = vec![BigInt::zero(); g.alphabet.len()];
    for r in w.runs() {
        out[r.gen] += r.exp.abs();
    }
    let mut out: Vec<f64> = out.iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect();
    if weighted {
        let len = word_len_f64(w);
        if len == 0.0 {
            return Err(Error::ZeroLength);
        }
        for v in &mut out {
            *v /= len;
        }
    }
    Ok(out)
}

/// n0/n1: normal-form exponent slots, optionally divided by element length.
pub fn nf_features(g: &GroupHandle, w: &Word, weighted: bool) -> Result<Vec<f64>> {
    let e = g.exponent_vector(w)?;
    let mut out: Vec<f64> = e.iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect();
    if weighted {
        let len: BigInt = e.iter().map(|x| x.abs()).sum();
        let len = len.to_f64().unwrap_or(f64::MAX);
        if len == 0.0 {
            return Err(Error::ZeroLength);
        }
        for v in &mut out {
            *v /= len;
        }
    }
    Ok(out)
}

/// fm: flattened matrix divided by its Frobenius norm (SL(2,Z) only).
pub fn matrix_features(g: &GroupHandle, w: &Word) -> Result<Vec<f64>> {
    match &g.engine {
        Engine::Sl2z(e) => {
            let m = e.evaluate(w)?;
            let norm = m.frobenius_norm();
            Ok(m.entries_f64().iter().map(|x| x / norm).collect())
        }
        _ => Err(Error::UnsupportedRecipe { recipe: "fm".into(), group: g.name.clone() }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairRecipe {
    C0,
    C1,
    C2,
    C4,
    Cm,
}

impl PairRecipe {
    pub fn parse(s: &str) -> Result<PairRecipe> {
        match s {
            "c0" => Ok(PairRecipe::C0),
            "c1" => Ok(PairRecipe::C1),
            "c2" => Ok(PairRecipe::C2),
            "c4" => Ok(PairRecipe::C4),
            "cm" => Ok(PairRecipe::Cm),
            _ => Err(Error::Config(format!("unknown feature recipe '{}'", s))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PairRecipe::C0 => "c0",
            PairRecipe::C1 => "c1",
            PairRecipe::C2 => "c2",
            PairRecipe::C4 => "c4",
            PairRecipe::Cm => "cm",
        }
    }
}

/// Prebuilt extraction context for one (group, recipe).
pub struct Extractor {
    pub recipe: PairRecipe,
    index: Option<CountingSubgraphIndex>,
    word_dim: usize,
    group_name: String,
}

impl Extractor {
    pub fn new(g: &GroupHandle, recipe: PairRecipe) -> Result<Extractor> {
        let index = match recipe {
            PairRecipe::C2 => Some(CountingSubgraphIndex::build(g, 1, default_style(g))?),
            PairRecipe::C4 => Some(CountingSubgraphIndex::build(g, 2, default_style(g))?),
            _ => None,
        };
        let word_dim = match recipe {
            PairRecipe::C0 | PairRecipe::C1 => g
                .nf_slots()
                .ok_or_else(|| Error::UnsupportedRecipe {
                    recipe: recipe.name().into(),
                    group: g.name.clone(),
                })?,
            PairRecipe::C2 | PairRecipe::C4 => index.as_ref().unwrap().dim(),
            PairRecipe::Cm => match g.engine {
                Engine::Sl2z(_) => 4,
                _ => {
                    return Err(Error::UnsupportedRecipe {
                        recipe: "cm".into(),
                        group: g.name.clone(),
                    })
                }
            },
        };
        Ok(Extractor {
            recipe,
            index,
            word_dim,
            group_name: g.name.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.word_dim
    }

    pub fn group_name(&self) -> &str {
        &self.group_name
    }

    fn word_features(&self, g: &GroupHandle, w: &Word) -> Result<Vec<f64>> {
        let zero_on_identity = |r: Result<Vec<f64>>| match r {
            Err(Error::ZeroLength) => Ok(vec![0.0; self.word_dim]),
            other => other,
        };
        match self.recipe {
            PairRecipe::C0 => nf_features(g, w, false),
            PairRecipe::C1 => zero_on_identity(nf_features(g, w, true)),
            PairRecipe::C2 | PairRecipe::C4 => {
                count_subwords(w, self.index.as_ref().unwrap(), false)
            }
            PairRecipe::Cm => matrix_features(g, w),
        }
    }

    pub fn pair_features(&self, g: &GroupHandle, u: &Word, v: &Word) -> Result<Vec<f64>> {
        let mut x = self.word_features(g, u)?;
        x.extend(self.word_features(g, v)?);
        Ok(x)
    }

    pub fn labels(&self, g: &GroupHandle) -> Vec<String> {
        let word_labels: Vec<String> = match self.recipe {
            PairRecipe::C0 | PairRecipe::C1 => (0..self.word_dim)
                .map(|i| format!("e{}", i + 1))
                .collect(),
            PairRecipe::C2 | PairRecipe::C4 => self
                .index
                .as_ref()
                .unwrap()
                .entries
                .iter()
                .map(|e| {
                    Word::from_letters(&e.label).format(&g.alphabet).replace(' ', ".")
                })
                .collect(),
            PairRecipe::Cm => ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect(),
        };
        let mut out: Vec<String> = word_labels.iter().map(|l| format!("u:{}", l)).collect();
        out.extend(word_labels.iter().map(|l| format!("v:{}", l)));
        out
    }
}

/// CSV export of a feature matrix with labels as header.
pub fn to_csv(header: &[String], rows: &[Vec<f64>], labels: Option<&[u8]>) -> String {
    let mut s = String::new();
    s.push_str(&header.join(","));
    if labels.is_some() {
        s.push_str(",label");
    }
    s.push('\n');
    for (i, row) in rows.iter().enumerate() {
        let vals: Vec<String> = row.iter().map(|v| format!("{}", v)).collect();
        s.push_str(&vals.join(","));
        if let Some(l) = labels {
            s.push_str(&format!(",{}", l[i]));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupHandle;
    use crate::word::{Alphabet, Word};

    #[test]
    fn bs12_index_sizes_match_published_dims() {
        let g = GroupHandle::bs12();
        let idx = CountingSubgraphIndex::build(&g, 1, IndexStyle::GeodesicStrings).unwrap();
        assert_eq!(idx.dim(), 24);
        let idx = CountingSubgraphIndex::build(&g, 2, IndexStyle::GeodesicStrings).unwrap();
        assert_eq!(idx.dim(), 48);
    }

    #[test]
    fn sl2z_index_size_matches_published_dim() {
        let g = GroupHandle::sl2z().unwrap();
        let idx = CountingSubgraphIndex::build(&g, 1, IndexStyle::ElementClasses).unwrap();
        assert_eq!(idx.dim(), 20);
    }

    #[test]
    fn free_index_has_36_entries_and_window_invariant() {
        let g = GroupHandle::bs12();
        let idx = CountingSubgraphIndex::build(&g, 1, IndexStyle::FreeReduced).unwrap();
        assert_eq!(idx.dim(), 36);
        let w = Word::parse("a^3 b^-2 a b a^-4", &g.alphabet).unwrap();
        let counts = count_subwords(&w, &idx, false).unwrap();
        let total: f64 = counts.iter().sum();
        assert_eq!(total, 11.0 - 2.0); // |w| - 2 windows
    }

    #[test]
    fn occurrence_counting_overlaps() {
        let a = Alphabet::new(vec!["a", "b"]);
        let w = Word::parse("a b a b a", &a).unwrap();
        let p = vec![(0, 1i8), (1, 1), (0, 1)];
        assert_eq!(count_occurrences(&w, &p), 2.0);
        let w = Word::parse("a b a", &a).unwrap();
        assert_eq!(count_occurrences(&w, &p), 1.0);
        assert_eq!(count_occurrences(&Word::empty(), &p), 0.0);
    }

    #[test]
    fn occurrence_counting_within_runs() {
        let a = Alphabet::new(vec!["a", "b"]);
        let w = Word::parse("a^5", &a).unwrap();
        assert_eq!(count_occurrences(&w, &[(0, 1), (0, 1), (0, 1)]), 3.0);
        // sign matters
        assert_eq!(count_occurrences(&w, &[(0, -1), (0, -1), (0, -1)]), 0.0);
        let w = Word::parse("b a^3 b^2 a^3", &a).unwrap();
        // b a a: first run suffix b, middle none -> pattern runs (b,1)(a,2)
        assert_eq!(count_occurrences(&w, &[(1, 1), (0, 1), (0, 1)]), 2.0);
        // a b b a requires the middle b-run to be exactly b^2
        assert_eq!(count_occurrences(&w, &[(0, 1), (1, 1), (1, 1), (0, 1)]), 1.0);
    }

    #[test]
    fn generator_count_examples() {
        let g = GroupHandle::bs12();
        let w = Word::parse("a b a^-1 b", &g.alphabet).unwrap();
        assert_eq!(generator_count(&w, &g, false).unwrap(), vec![2.0, 2.0]);
        assert_eq!(generator_count(&w, &g, true).unwrap(), vec![0.5, 0.5]);
        assert_eq!(
            generator_count(&Word::empty(), &g, false).unwrap(),
            vec![0.0, 0.0]
        );
        let w = Word::parse("a^-1", &g.alphabet).unwrap();
        assert_eq!(generator_count(&w, &g, false).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn nf_feature_examples() {
        let g = GroupHandle::bs12();
        let w = Word::parse("b a", &g.alphabet).unwrap(); // nf a^2 b
        assert_eq!(nf_features(&g, &w, false).unwrap(), vec![0.0, 2.0, 1.0]);
        let n1 = nf_features(&g, &w, true).unwrap();
        assert!((n1[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!(nf_features(&g, &Word::empty(), true).is_err());

        let g = GroupHandle::gmbs23();
        let w = Word::parse("q1 b q1^-1", &g.alphabet).unwrap(); // b^2
        assert_eq!(
            nf_features(&g, &w, false).unwrap(),
            vec![0.0, 0.0, 2.0, 0.0, 0.0]
        );
    }

    #[test]
    fn pair_recipe_dims() {
        let bs = GroupHandle::bs12();
        let gm = GroupHandle::gmbs23();
        let sl = GroupHandle::sl2z().unwrap();
        assert_eq!(Extractor::new(&bs, PairRecipe::C0).unwrap().dim(), 6);
        assert_eq!(Extractor::new(&bs, PairRecipe::C1).unwrap().dim(), 6);
        assert_eq!(Extractor::new(&gm, PairRecipe::C0).unwrap().dim(), 10);
        assert_eq!(Extractor::new(&bs, PairRecipe::C2).unwrap().dim(), 48);
        assert_eq!(Extractor::new(&bs, PairRecipe::C4).unwrap().dim(), 96);
        assert_eq!(Extractor::new(&sl, PairRecipe::C2).unwrap().dim(), 40);
        assert_eq!(Extractor::new(&sl, PairRecipe::Cm).unwrap().dim(), 8);
        assert!(Extractor::new(&sl, PairRecipe::C0).is_err());
        assert!(Extractor::new(&bs, PairRecipe::Cm).is_err());
    }

    #[test]
    fn pair_features_concatenate() {
        let g = GroupHandle::bs12();
        let ex = Extractor::new(&g, PairRecipe::C0).unwrap();
        let u = Word::parse("a^2 b", &g.alphabet).unwrap();
        let x = ex.pair_features(&g, &u, &u).unwrap();
        assert_eq!(x, vec![0.0, 2.0, 1.0, 0.0, 2.0, 1.0]);
        let v = Word::parse("b", &g.alphabet).unwrap();
        let uv = ex.pair_features(&g, &u, &v).unwrap();
        let vu = ex.pair_features(&g, &v, &u).unwrap();
        assert_eq!(&uv[..3], &vu[3..]);
        assert_eq!(&uv[3..], &vu[..3]);
    }

    #[test]
    fn cm_of_s_pair() {
        let g = GroupHandle::sl2z().unwrap();
        let ex = Extractor::new(&g, PairRecipe::Cm).unwrap();
        let s = Word::parse("S", &g.alphabet).unwrap();
        let x = ex.pair_features(&g, &s, &s).unwrap();
        let r2 = 1.0 / 2f64.sqrt();
        let expect = [0.0, -r2, r2, 0.0, 0.0, -r2, r2, 0.0];
        for (a, b) in x.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_equals_unweighted_over_length() {
        let g = GroupHandle::gmbs23();
        let w = Word::parse("q1 b^3 q2^-2", &g.alphabet).unwrap();
        let f0 = generator_count(&w, &g, false).unwrap();
        let f1 = generator_count(&w, &g, true).unwrap();
        let len = 6.0;
        for (a, b) in f0.iter().zip(f1.iter()) {
            assert!((a / len - b).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_export_shape() {
        let header = vec!["x".to_string(), "y".to_string()];
        let rows = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let csv = to_csv(&header, &rows, Some(&[0, 1]));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "x,y,label");
        assert_eq!(lines[1], "1,2,0");
    }
}
