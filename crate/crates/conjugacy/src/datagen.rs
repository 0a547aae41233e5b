//! Random words at exact normal-form length, conjugate / non-conjugate pair
//! construction with the abelianization filter, word pools, and the D0..D3
//! collections split into S_i / S_o / S_v.

use crate::error::{Error, Result};
use crate::group::GroupHandle;
use crate::word::Word;
use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashSet;
use std::io::{BufRead, Write};

pub const DEFAULT_MAX_RESTARTS: u64 = 1000;
pub const DEFAULT_FILTER_RETRIES: u64 = 10_000;

/// One ChaCha8 stream per (master seed, label); parallel cells each derive
/// their own stream so parallel and serial runs agree.
pub fn derive_rng(master: u64, label: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(seed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPair {
    pub u: Word,
    pub v: Word,
    /// 1 = conjugate, 0 = non-conjugate
    pub label: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CollectionId {
    D0,
    D1,
    D2,
    D3,
}

impl CollectionId {
    pub fn parse(s: &str) -> Result<CollectionId> {
        match s {
            "D0" | "d0" => Ok(CollectionId::D0),
            "D1" | "d1" => Ok(CollectionId::D1),
            "D2" | "d2" => Ok(CollectionId::D2),
            "D3" | "d3" => Ok(CollectionId::D3),
            _ => Err(Error::Config(format!("unknown collection '{}'", s))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CollectionId::D0 => "D0",
            CollectionId::D1 => "D1",
            CollectionId::D2 => "D2",
            CollectionId::D3 => "D3",
        }
    }
}

pub const SPLITS: [&str; 3] = ["si", "so", "sv"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub group: String,
    pub collection: String,
    pub split: String,
    pub seed: u64,
    pub pairs_per_class: usize,
    pub len_min: u64,
    pub len_max: u64,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub meta: DatasetMeta,
    pub pairs: Vec<LabeledPair>,
}

#[derive(Debug, Clone)]
pub struct WordPool {
    pub words: Vec<Word>,
}

/// Random word with normal-form length exactly `n`: right-multiply uniform
/// random letters; overshooting the target restarts the word.
pub fn random_word(g: &GroupHandle, n: u64, rng: &mut ChaCha8Rng) -> Result<Word> {
    random_word_capped(g, n, rng, DEFAULT_MAX_RESTARTS)
}

pub fn random_word_capped(
    g: &GroupHandle,
    n: u64,
    rng: &mut ChaCha8Rng,
    max_restarts: u64,
) -> Result<Word> {
    assert!(n >= 1);
    let n_letters = 2 * g.alphabet.len();
    let target = BigInt::from(n);
    for _ in 0..=max_restarts {
        let mut w = Word::empty();
        // enough room that only genuine overshoots force a restart
        let max_iters = 50 * n + 100;
        for _ in 0..max_iters {
            let pick = rng.gen_range(0..n_letters);
            let letter = Word::from_letters(&[(pick / 2, if pick % 2 == 1 { -1 } else { 1 })]);
            w = g.multiply(&w, &letter)?;
            let len = w.len();
            if len == target {
                return Ok(w);
            }
            if len > target {
                break;
            }
        }
    }
    Err(Error::TargetUnreachable { target: n, restarts: max_restarts })
}

/// psi-filter: both words have nonzero abelianization images and the images
/// differ, which certifies non-conjugacy.
pub fn psi_filter_passes(g: &GroupHandle, u: &Word, v: &Word) -> bool {
    let iu = g.abelian_image(u);
    let iv = g.abelian_image(v);
    !iu.is_zero() && !iv.is_zero() && iu != iv
}

pub fn conjugate_pair(
    g: &GroupHandle,
    len_u: u64,
    len_t: u64,
    rng: &mut ChaCha8Rng,
) -> Result<LabeledPair> {
    let u = random_word(g, len_u, rng)?;
    let t = random_word(g, len_t, rng)?;
    let v = g.conjugate(&u, &t)?;
    Ok(LabeledPair { u, v, label: 1 })
}

pub fn nonconjugate_pair(
    g: &GroupHandle,
    len_u: u64,
    len_v: u64,
    rng: &mut ChaCha8Rng,
) -> Result<LabeledPair> {
    for _ in 0..DEFAULT_FILTER_RETRIES {
        let u = random_word(g, len_u, rng)?;
        let v = random_word(g, len_v, rng)?;
        if psi_filter_passes(g, &u, &v) {
            return Ok(LabeledPair { u, v, label: 0 });
        }
    }
    Err(Error::FilterExhausted(DEFAULT_FILTER_RETRIES))
}

/// Unique normal-form words with lengths uniform over the range.
pub fn build_pool(
    g: &GroupHandle,
    size: usize,
    range: (u64, u64),
    master: u64,
    label: &str,
) -> Result<WordPool> {
    let candidates: Vec<Result<Word>> = (0..size)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(master, &format!("{}/word/{}", label, i));
            let n = rng.gen_range(range.0..=range.1);
            random_word(g, n, &mut rng)
        })
        .collect();
    let mut seen: HashSet<Word> = HashSet::new();
    let mut words = Vec::with_capacity(size);
    for c in candidates {
        let w = c?;
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    // top up duplicates sequentially
    let mut rng = derive_rng(master, &format!("{}/topup", label));
    let mut attempts = 0u64;
    while words.len() < size {
        attempts += 1;
        if attempts > 50 * size as u64 + 1000 {
            return Err(Error::PoolExhausted(format!(
                "could not reach {} unique words in range [{},{}]",
                size, range.0, range.1
            )));
        }
        let n = rng.gen_range(range.0..=range.1);
        let w = random_word(g, n, &mut rng)?;
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    Ok(WordPool { words })
}

impl WordPool {
    /// Draw one word uniformly; words with trivial abelianization image are
    /// skipped when `filtered`.
    fn draw(&self, g: &GroupHandle, rng: &mut ChaCha8Rng, filtered: bool) -> Result<&Word> {
        for _ in 0..DEFAULT_FILTER_RETRIES {
            let w = &self.words[rng.gen_range(0..self.words.len())];
            if !filtered || !g.abelian_image(w).is_zero() {
                return Ok(w);
            }
        }
        Err(Error::PoolExhausted("no pool word passes the filter".into()))
    }
}

pub struct SplitSet {
    pub si: Dataset,
    pub so: Dataset,
    pub sv: Dataset,
}

impl SplitSet {
    pub fn iter(&self) -> impl Iterator<Item = &Dataset> {
        [&self.si, &self.so, &self.sv].into_iter()
    }
}

/// Builds the three splits of a collection. Pool-based collections (D1..D3)
/// build one shared pool sized `pool_size` (default 6x pairs per class).
pub fn build_collection(
    g: &GroupHandle,
    id: CollectionId,
    pairs_per_class: usize,
    range: (u64, u64),
    master: u64,
    pool_size: Option<usize>,
) -> Result<SplitSet> {
    assert!(range.0 >= 1 && range.0 <= range.1);
    let pool = match id {
        CollectionId::D0 => None,
        _ => {
            let size = pool_size.unwrap_or(6 * pairs_per_class);
            Some(build_pool(g, size, range, master, &format!("{}/pool", id.name()))?)
        }
    };
    let mut seen: HashSet<(Word, Word)> = HashSet::new();
    let mut out = Vec::new();
    for split in SPLITS {
        out.push(build_split(
            g,
            id,
            split,
            pairs_per_class,
            range,
            master,
            pool.as_ref(),
            &mut seen,
        )?);
    }
    let mut it = out.into_iter();
    Ok(SplitSet {
        si: it.next().unwrap(),
        so: it.next().unwrap(),
        sv: it.next().unwrap(),
    })
}

#[allow(clippy::too_many_arguments)]
fn build_split(
    g: &GroupHandle,
    id: CollectionId,
    split: &str,
    pairs_per_class: usize,
    range: (u64, u64),
    master: u64,
    pool: Option<&WordPool>,
    seen: &mut HashSet<(Word, Word)>,
) -> Result<Dataset> {
    let tag = |kind: &str, i: usize| format!("{}/{}/{}/{}", id.name(), split, kind, i);
    // conjugate class
    let conj: Vec<LabeledPair> = match id {
        CollectionId::D0 | CollectionId::D1 => (0..pairs_per_class)
            .into_par_iter()
            .map(|i| {
                let mut rng = derive_rng(master, &tag("conj", i));
                let l = rng.gen_range(range.0..=range.1);
                conjugate_pair(g, l, l, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?,
        CollectionId::D2 | CollectionId::D3 => {
            let pool = pool.unwrap();
            let mut rng = derive_rng(master, &tag("conj", 0));
            let mut v = Vec::with_capacity(pairs_per_class);
            for _ in 0..pairs_per_class {
                let u = pool.draw(g, &mut rng, false)?.clone();
                let t = pool.draw(g, &mut rng, false)?.clone();
                let vw = g.conjugate(&u, &t)?;
                v.push(LabeledPair { u, v: vw, label: 1 });
            }
            v
        }
    };
    // non-conjugate class
    let nonconj: Vec<LabeledPair> = match id {
        CollectionId::D0 => (0..pairs_per_class)
            .into_par_iter()
            .map(|i| {
                let mut rng = derive_rng(master, &tag("nonconj", i));
                let m = rng.gen_range(range.0..=range.1);
                nonconjugate_pair(g, m, m, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?,
        CollectionId::D1 | CollectionId::D2 => {
            let pool = pool.unwrap();
            let mut rng = derive_rng(master, &tag("nonconj", 0));
            let mut v = Vec::with_capacity(pairs_per_class);
            for _ in 0..pairs_per_class {
                let mut found = false;
                for _ in 0..DEFAULT_FILTER_RETRIES {
                    let u = pool.draw(g, &mut rng, true)?;
                    let w = pool.draw(g, &mut rng, true)?;
                    if psi_filter_passes(g, u, w) {
                        v.push(LabeledPair { u: u.clone(), v: w.clone(), label: 0 });
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Err(Error::FilterExhausted(DEFAULT_FILTER_RETRIES));
                }
            }
            v
        }
        CollectionId::D3 => {
            // |v| ranges over the observed conjugate-word lengths of this
            // split; v is built by conjugation so those lengths are reachable
            let mut min2k: Option<BigInt> = None;
            let mut max2k: Option<BigInt> = None;
            for p in &conj {
                for w in [&p.u, &p.v] {
                    let l = w.len();
                    if min2k.as_ref().map_or(true, |m| l < *m) {
                        min2k = Some(l.clone());
                    }
                    if max2k.as_ref().map_or(true, |m| l > *m) {
                        max2k = Some(l);
                    }
                }
            }
            let (min2k, max2k) = (min2k.unwrap(), max2k.unwrap());
            let pool = pool.unwrap();
            let mut rng = derive_rng(master, &tag("nonconj", 0));
            let mut v = Vec::with_capacity(pairs_per_class);
            for _ in 0..pairs_per_class {
                let mut found = false;
                for _ in 0..DEFAULT_FILTER_RETRIES {
                    let u = pool.draw(g, &mut rng, true)?.clone();
                    let base = random_word(g, rng.gen_range(range.0..=range.1), &mut rng)?;
                    let t = random_word(g, rng.gen_range(range.0..=range.1), &mut rng)?;
                    let w = g.conjugate(&base, &t)?;
                    let l = w.len();
                    if l < min2k || l > max2k {
                        continue;
                    }
                    if psi_filter_passes(g, &u, &w) {
                        v.push(LabeledPair { u, v: w, label: 0 });
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Err(Error::FilterExhausted(DEFAULT_FILTER_RETRIES));
                }
            }
            v
        }
    };
    // interleave classes, then enforce cross-split uniqueness
    let mut pairs = Vec::with_capacity(2 * pairs_per_class);
    for (c, n) in conj.into_iter().zip(nonconj.into_iter()) {
        pairs.push(c);
        pairs.push(n);
    }
    for (i, p) in pairs.iter_mut().enumerate() {
        let mut attempt = 0;
        while !seen.insert((p.u.clone(), p.v.clone())) {
            attempt += 1;
            if attempt > DEFAULT_FILTER_RETRIES {
                return Err(Error::FilterExhausted(DEFAULT_FILTER_RETRIES));
            }
            let mut rng = derive_rng(master, &format!("{}/{}/dedup/{}/{}", id.name(), split, i, attempt));
            let replacement = regenerate(g, id, range, pool, p.label, &mut rng)?;
            *p = replacement;
        }
    }
    Ok(Dataset {
        meta: DatasetMeta {
            group: g.name.clone(),
            collection: id.name().into(),
            split: split.into(),
            seed: master,
            pairs_per_class,
            len_min: range.0,
            len_max: range.1,
        },
        pairs,
    })
}

fn regenerate(
    g: &GroupHandle,
    id: CollectionId,
    range: (u64, u64),
    pool: Option<&WordPool>,
    label: u8,
    rng: &mut ChaCha8Rng,
) -> Result<LabeledPair> {
    // duplicates across splits are rare; a fresh D0-style pair respecting
    // the same-length rules is a valid member of every collection row except
    // pool-drawn ones, where a fresh pool draw is used instead
    if label == 1 {
        match id {
            CollectionId::D0 | CollectionId::D1 => {
                let l = rng.gen_range(range.0..=range.1);
                conjugate_pair(g, l, l, rng)
            }
            _ => {
                let pool = pool.unwrap();
                let u = pool.draw(g, rng, false)?.clone();
                let t = pool.draw(g, rng, false)?.clone();
                let v = g.conjugate(&u, &t)?;
                Ok(LabeledPair { u, v, label: 1 })
            }
        }
    } else {
        match id {
            CollectionId::D0 => {
                let m = rng.gen_range(range.0..=range.1);
                nonconjugate_pair(g, m, m, rng)
            }
            _ => {
                let pool = pool.unwrap();
                for _ in 0..DEFAULT_FILTER_RETRIES {
                    let u = pool.draw(g, rng, true)?;
                    let w = pool.draw(g, rng, true)?;
                    if psi_filter_passes(g, u, w) {
                        return Ok(LabeledPair { u: u.clone(), v: w.clone(), label: 0 });
                    }
                }
                Err(Error::FilterExhausted(DEFAULT_FILTER_RETRIES))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PairRecord {
    u: String,
    v: String,
    label: u8,
}

pub fn write_jsonl(ds: &Dataset, g: &GroupHandle, path: &std::path::Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for p in &ds.pairs {
        let rec = PairRecord {
            u: p.u.format(&g.alphabet),
            v: p.v.format(&g.alphabet),
            label: p.label,
        };
        serde_json::to_writer(&mut f, &rec)?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    let meta_path = path.with_extension("meta.json");
    let mut mf = std::fs::File::create(meta_path)?;
    serde_json::to_writer_pretty(&mut mf, &ds.meta)?;
    mf.write_all(b"\n")?;
    Ok(())
}

pub fn read_jsonl(path: &std::path::Path, g: &GroupHandle) -> Result<Dataset> {
    let meta_path = path.with_extension("meta.json");
    let meta: DatasetMeta = serde_json::from_reader(std::fs::File::open(meta_path)?)?;
    if meta.group != g.name {
        return Err(Error::Refusal(format!(
            "dataset was generated for group '{}', not '{}'",
            meta.group, g.name
        )));
    }
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut pairs = Vec::new();
    for line in f.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PairRecord = serde_json::from_str(&line)?;
        pairs.push(LabeledPair {
            u: Word::parse(&rec.u, &g.alphabet)?,
            v: Word::parse(&rec.v, &g.alphabet)?,
            label: rec.label,
        });
    }
    Ok(Dataset { meta, pairs })
}
