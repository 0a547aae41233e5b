//! Words over a finite generating set, stored run-length encoded.
//!
//! A run is a generator index with a nonzero signed exponent. Exponents are
//! arbitrary-precision: normal forms in the Baumslag-Solitar style groups
//! reach exponents around 2^l for inputs of length l, so fixed-width
//! integers are not an option.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Self {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        Alphabet { names, index }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, gen: usize) -> &str {
        &self.names[gen]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Run {
    pub gen: usize,
    pub exp: BigInt,
}

/// A freely reduced word: adjacent runs always have distinct generators and
/// every exponent is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    runs: Vec<Run>,
}

impl Word {
    pub fn empty() -> Self {
        Word { runs: Vec::new() }
    }

    pub fn generator(gen: usize) -> Self {
        Word {
            runs: vec![Run { gen, exp: BigInt::one() }],
        }
    }

    pub fn power(gen: usize, exp: BigInt) -> Self {
        if exp.is_zero() {
            Word::empty()
        } else {
            Word { runs: vec![Run { gen, exp }] }
        }
    }

    /// Builds a word from (generator, exponent) pairs, merging and dropping
    /// as needed so the result is freely reduced.
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (usize, BigInt)>,
    {
        let mut w = Word::empty();
        for (gen, exp) in pairs {
            w.push_run(gen, exp);
        }
        w
    }

    pub fn from_letters(letters: &[(usize, i8)]) -> Self {
        Word::from_pairs(letters.iter().map(|&(g, s)| (g, BigInt::from(s))))
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Letter length: the sum of absolute exponents.
    pub fn len(&self) -> BigInt {
        self.runs.iter().map(|r| r.exp.abs()).sum()
    }

    /// Appends one run on the right, keeping the word freely reduced.
    pub fn push_run(&mut self, gen: usize, exp: BigInt) {
        if exp.is_zero() {
            return;
        }
        if let Some(last) = self.runs.last_mut() {
            if last.gen == gen {
                last.exp += exp;
                if last.exp.is_zero() {
                    self.runs.pop();
                }
                return;
            }
        }
        self.runs.push(Run { gen, exp });
    }

    /// Free product concatenation with reduction at the seam.
    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for r in &other.runs {
            w.push_run(r.gen, r.exp.clone());
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word {
            runs: self
                .runs
                .iter()
                .rev()
                .map(|r| Run { gen: r.gen, exp: -r.exp.clone() })
                .collect(),
        }
    }

    /// Expands to individual letters `(gen, sign)`. Errors when the letter
    /// length exceeds `max_letters`; callers that feed engine output back in
    /// must bound this.
    pub fn letters(&self, max_letters: usize) -> Result<Vec<(usize, i8)>> {
        let mut out = Vec::new();
        for r in &self.runs {
            let n = r.exp.abs().to_usize().ok_or_else(|| {
                Error::CollectionOverflow(format!("run exponent {} too large to expand", r.exp))
            })?;
            if out.len() + n > max_letters {
                return Err(Error::CollectionOverflow(format!(
                    "word expansion exceeds {} letters",
                    max_letters
                )));
            }
            let sign: i8 = if r.exp.is_negative() { -1 } else { 1 };
            out.extend(std::iter::repeat((r.gen, sign)).take(n));
        }
        Ok(out)
    }

    pub fn format(&self, alph: &Alphabet) -> String {
        let mut s = String::new();
        for (i, r) in self.runs.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            if r.exp == BigInt::one() {
                s.push_str(alph.name(r.gen));
            } else {
                let _ = write!(s, "{}^{}", alph.name(r.gen), r.exp);
            }
        }
        s
    }

    /// Parses whitespace separated tokens `g`, `g^-1`, `g^k`. The empty
    /// string is the empty word.
    pub fn parse(text: &str, alph: &Alphabet) -> Result<Word> {
        parse_at(text, alph, 1, 1)
    }
}

/// Parse with an explicit starting position, so file readers can report
/// accurate coordinates.
pub fn parse_at(text: &str, alph: &Alphabet, line: usize, start_col: usize) -> Result<Word> {
    let mut w = Word::empty();
    let mut col = start_col;
    for chunk in text.split_inclusive(char::is_whitespace) {
        let token = chunk.trim_end_matches(char::is_whitespace);
        if !token.is_empty() {
            let (name, exp) = match token.split_once('^') {
                None => (token, BigInt::one()),
                Some((name, e)) => {
                    let exp: BigInt = e.parse().map_err(|_| Error::Parse {
                        line,
                        col: col + name.len() + 1,
                        msg: format!("invalid exponent '{}'", e),
                    })?;
                    (name, exp)
                }
            };
            let gen = alph.lookup(name).ok_or_else(|| Error::Parse {
                line,
                col,
                msg: format!("unknown generator '{}'", name),
            })?;
            w.push_run(gen, exp);
        }
        col += chunk.chars().count();
    }
    Ok(w)
}
