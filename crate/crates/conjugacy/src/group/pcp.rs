//! Generic polycyclic presentations with collection.
//!
//! File format, strict line/column errors:
//!
//! ```text
//! generators
//! x y z
//!
//! orders
//! inf inf inf
//!
//! relations
//! x^-1 y x = y z^-1
//! x y x^-1 = y z
//! ```
//!
//! A relation left-hand side is either `g^r` (power relation, r the relative
//! order) or a three-token conjugation `gi^-1 gj gi` / `gi gj gi^-1` with
//! i < j. Right-hand sides are normal-form words over generators of higher
//! index (and `gj` itself for conjugation). Omitted relations are trivial.

use crate::error::{Error, Result};
use crate::word::{parse_at, Alphabet, Word};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct PcPresentation {
    pub alphabet: Alphabet,
    /// relative orders; None means infinite
    pub orders: Vec<Option<BigInt>>,
    /// g_i^{r_i} = word over higher-index generators (identity if absent)
    pub powers: Vec<Option<Word>>,
    /// (i, j, sign) -> g_j conjugated by g_i^sign, as (gen, exp) pairs
    pub conj: HashMap<(usize, usize, i8), Word>,
}

impl PcPresentation {
    pub fn n(&self) -> usize {
        self.alphabet.len()
    }

    pub fn hirsch_length(&self) -> usize {
        self.orders.iter().filter(|o| o.is_none()).count()
    }

    pub fn parse(text: &str) -> Result<PcPresentation> {
        #[derive(PartialEq, Clone, Copy)]
        enum Section {
            None,
            Generators,
            Orders,
            Relations,
        }
        let mut section = Section::None;
        let mut names: Vec<String> = Vec::new();
        let mut order_tokens: Vec<(String, usize, usize)> = Vec::new();
        let mut relation_lines: Vec<(usize, String)> = Vec::new();
        for (li, raw) in text.lines().enumerate() {
            let line_no = li + 1;
            let line = raw.split('#').next().unwrap_or("");
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            match trimmed {
                "generators" => section = Section::Generators,
                "orders" => section = Section::Orders,
                "relations" => section = Section::Relations,
                _ => match section {
                    Section::None => {
                        return Err(Error::Parse {
                            line: line_no,
                            col: 1,
                            msg: "expected a section header (generators, orders, relations)"
                                .into(),
                        })
                    }
                    Section::Generators => {
                        for name in trimmed.split_whitespace() {
                            if names.iter().any(|n| n == name) {
                                return Err(Error::Parse {
                                    line: line_no,
                                    col: 1,
                                    msg: format!("duplicate generator '{}'", name),
                                });
                            }
                            names.push(name.to_string());
                        }
                    }
                    Section::Orders => {
                        let mut col = 1;
                        for chunk in line.split_inclusive(char::is_whitespace) {
                            let tok = chunk.trim_end_matches(char::is_whitespace);
                            if !tok.is_empty() {
                                order_tokens.push((tok.to_string(), line_no, col));
                            }
                            col += chunk.chars().count();
                        }
                    }
                    Section::Relations => relation_lines.push((line_no, line.to_string())),
                },
            }
        }
        if names.is_empty() {
            return Err(Error::InvalidPresentation("no generators declared".into()));
        }
        let alphabet = Alphabet::new(names);
        if order_tokens.len() != alphabet.len() {
            return Err(Error::InvalidPresentation(format!(
                "{} orders for {} generators",
                order_tokens.len(),
                alphabet.len()
            )));
        }
        let mut orders = Vec::new();
        for (tok, line, col) in &order_tokens {
            if tok == "inf" {
                orders.push(None);
            } else {
                let r: BigInt = tok.parse().map_err(|_| Error::Parse {
                    line: *line,
                    col: *col,
                    msg: format!("order must be a positive integer or 'inf', got '{}'", tok),
                })?;
                if r < BigInt::from(2) {
                    return Err(Error::Parse {
                        line: *line,
                        col: *col,
                        msg: format!("relative order must be at least 2, got '{}'", tok),
                    });
                }
                orders.push(Some(r));
            }
        }
        let mut p = PcPresentation {
            alphabet,
            orders,
            powers: vec![None; order_tokens.len()],
            conj: HashMap::new(),
        };
        for (line_no, line) in relation_lines {
            p.add_relation(&line, line_no)?;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn parse_file(path: &std::path::Path) -> Result<PcPresentation> {
        PcPresentation::parse(&std::fs::read_to_string(path)?)
    }

    fn add_relation(&mut self, line: &str, line_no: usize) -> Result<()> {
        let eq = line.find('=').ok_or(Error::Parse {
            line: line_no,
            col: line.chars().count() + 1,
            msg: "relation must contain '='".into(),
        })?;
        let lhs_text = &line[..eq];
        let rhs_text = &line[eq + 1..];
        let lhs = parse_at(lhs_text, &self.alphabet, line_no, 1)?;
        let rhs = parse_at(
            rhs_text,
            &self.alphabet,
            line_no,
            lhs_text.chars().count() + 2,
        )?;
        let runs = lhs.runs();
        // power relation: single run g_i^{r_i}
        if runs.len() == 1 && runs[0].exp.is_positive() && runs[0].exp > BigInt::one() {
            let i = runs[0].gen;
            match &self.orders[i] {
                Some(r) if *r == runs[0].exp => {}
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        col: 1,
                        msg: format!(
                            "power relation exponent must equal the relative order of '{}'",
                            self.alphabet.name(i)
                        ),
                    })
                }
            }
            self.check_rhs(&rhs, i, i + 1, line_no)?;
            self.powers[i] = Some(rhs);
            return Ok(());
        }
        // conjugation relation: gi^-1 gj gi or gi gj gi^-1
        if runs.len() == 3
            && runs[0].gen == runs[2].gen
            && runs[0].exp.abs().is_one()
            && runs[2].exp.abs().is_one()
            && runs[0].exp == -runs[2].exp.clone()
            && runs[1].exp.abs().is_one()
        {
            let i = runs[0].gen;
            let j = runs[1].gen;
            if runs[1].exp.is_negative() || j <= i {
                return Err(Error::Parse {
                    line: line_no,
                    col: 1,
                    msg: "conjugation relation must conjugate a higher-index generator".into(),
                });
            }
            // gi^-1 gj gi = rhs defines g_j^{g_i}; the mirrored shape defines
            // the inverse conjugation
            let sign: i8 = if runs[2].exp.is_positive() { 1 } else { -1 };
            self.check_rhs(&rhs, i, j, line_no)?;
            self.conj.insert((i, j, sign), rhs);
            return Ok(());
        }
        Err(Error::Parse {
            line: line_no,
            col: 1,
            msg: "relation left-hand side must be g^r or gi^-1 gj gi".into(),
        })
    }

    fn check_rhs(&self, rhs: &Word, i: usize, min_gen: usize, line_no: usize) -> Result<()> {
        for r in rhs.runs() {
            if r.gen <= i || r.gen < min_gen {
                return Err(Error::Parse {
                    line: line_no,
                    col: 1,
                    msg: format!(
                        "right-hand side must use generators of index above '{}'",
                        self.alphabet.name(i)
                    ),
                });
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        for (_, j, _) in self.conj.keys() {
            if *j >= self.n() {
                return Err(Error::InvalidPresentation("generator index out of range".into()));
            }
        }
        Ok(())
    }

    /// Conjugation word for g_j^{g_i^sign}; trivial when nothing is declared
    /// for the pair, an error when only the opposite direction is known.
    fn conj_word(&self, i: usize, j: usize, sign: i8) -> Result<Option<&Word>> {
        match self.conj.get(&(i, j, sign)) {
            Some(w) => Ok(Some(w)),
            None => {
                if let Some(w) = self.conj.get(&(i, j, -sign)) {
                    if !is_single_gen(w, j) {
                        return Err(Error::InvalidPresentation(format!(
                            "missing conjugation relation for {}^{}{}",
                            self.alphabet.name(j),
                            self.alphabet.name(i),
                            if sign < 0 { "^-1" } else { "" },
                        )));
                    }
                }
                Ok(None)
            }
        }
    }

    /// Collection from the left: right-multiplies letters into a normal-form
    /// exponent vector.
    pub fn collect(&self, w: &Word, max_steps: u64) -> Result<Vec<BigInt>> {
        let mut a = vec![BigInt::zero(); self.n()];
        let mut budget = max_steps;
        for r in w.runs() {
            let e = r.exp.to_i64().ok_or_else(|| {
                Error::CollectionOverflow("input exponent too large".into())
            })?;
            let sign: i8 = if e < 0 { -1 } else { 1 };
            for _ in 0..e.unsigned_abs() {
                self.mult_gen(&mut a, r.gen, sign, &mut budget)?;
            }
        }
        Ok(a)
    }

    fn mult_gen(&self, a: &mut [BigInt], i: usize, sign: i8, budget: &mut u64) -> Result<()> {
        if *budget == 0 {
            return Err(Error::CollectionOverflow("collection step budget exceeded".into()));
        }
        *budget -= 1;
        let mut tail: Vec<(usize, BigInt)> = Vec::new();
        let mut all_trivial = true;
        for j in i + 1..self.n() {
            if a[j].is_zero() {
                continue;
            }
            let w = self.conj_word(i, j, sign)?;
            let trivial = match w {
                None => true,
                Some(w) => is_single_gen(w, j),
            };
            if !trivial {
                all_trivial = false;
            }
            tail.push((j, a[j].clone()));
        }
        if all_trivial {
            self.bump(a, i, sign, budget)?;
            return Ok(());
        }
        for (j, _) in &tail {
            a[*j] = BigInt::zero();
        }
        self.bump(a, i, sign, budget)?;
        for (j, c) in tail {
            let w = self.conj_word(i, j, sign)?;
            match w {
                None => self.mult_power(a, &Word::generator(j), &c, budget)?,
                Some(w) => {
                    let w = w.clone();
                    self.mult_power(a, &w, &c, budget)?;
                }
            }
        }
        Ok(())
    }

    /// multiplies word^count on the right
    fn mult_power(&self, a: &mut [BigInt], w: &Word, count: &BigInt, budget: &mut u64) -> Result<()> {
        let n = count.to_i64().ok_or_else(|| {
            Error::CollectionOverflow("conjugation repetition count too large".into())
        })?;
        let word = if n < 0 { w.inverse() } else { w.clone() };
        for _ in 0..n.unsigned_abs() {
            self.mult_word(a, &word, budget)?;
        }
        Ok(())
    }

    fn mult_word(&self, a: &mut [BigInt], w: &Word, budget: &mut u64) -> Result<()> {
        for r in w.runs() {
            let e = r.exp.to_i64().ok_or_else(|| {
                Error::CollectionOverflow("relation exponent too large".into())
            })?;
            let sign: i8 = if e < 0 { -1 } else { 1 };
            for _ in 0..e.unsigned_abs() {
                self.mult_gen(a, r.gen, sign, budget)?;
            }
        }
        Ok(())
    }

    fn bump(&self, a: &mut [BigInt], i: usize, sign: i8, budget: &mut u64) -> Result<()> {
        a[i] += BigInt::from(sign);
        if let Some(r) = &self.orders[i] {
            if a[i] >= *r || a[i].is_negative() {
                let q = a[i].div_floor(r);
                a[i] = a[i].mod_floor(r);
                // g_i^{r} = w_i, so fold in w_i^q
                if let Some(w) = self.powers[i].clone() {
                    self.mult_power(a, &w, &q, budget)?;
                }
            }
        }
        Ok(())
    }

    pub fn to_word(&self, a: &[BigInt]) -> Word {
        Word::from_pairs(a.iter().cloned().enumerate())
    }

    pub fn length(&self, a: &[BigInt]) -> BigInt {
        a.iter().map(|x| x.abs()).sum()
    }
}

fn is_single_gen(w: &Word, j: usize) -> bool {
    let runs = w.runs();
    runs.len() == 1 && runs[0].gen == j && runs[0].exp.is_one()
}

pub const HEISENBERG: &str = "\
generators
x y z

orders
inf inf inf

relations
x^-1 y x = y z^-1
x y x^-1 = y z
";
