//! SL(2,Z) = < S, R | S^4 = 1, S^2 = R^3 > with S = [[0,-1],[1,0]] and
//! R = [[0,-1],[1,1]]. Normal forms come from a confluent rewriting system;
//! the matrix image is kept alongside for features and oracle checks.

use crate::error::{Error, Result};
use crate::rewriting::{kb_complete, RewritingSystem, Sym, SymWord};
use crate::word::Word;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

pub const S: usize = 0;
pub const R: usize = 1;

/// Cap on letter expansion when feeding words through the rewriter. Normal
/// forms here are short (torsion keeps them thin), so anything beyond this
/// indicates runaway input.
const MAX_LETTERS: usize = 1 << 20;

#[derive(Debug, Clone)]
pub struct Sl2Engine {
    pub rws: RewritingSystem,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn identity() -> Self {
        Mat2 {
            a: BigInt::from(1),
            b: BigInt::from(0),
            c: BigInt::from(0),
            d: BigInt::from(1),
        }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn inverse_unimodular(&self) -> Mat2 {
        // det = 1 throughout
        Mat2 {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        let sq = |x: &BigInt| {
            let f = x.to_f64().unwrap_or(f64::MAX);
            f * f
        };
        (sq(&self.a) + sq(&self.b) + sq(&self.c) + sq(&self.d)).sqrt()
    }

    pub fn entries_f64(&self) -> [f64; 4] {
        [
            self.a.to_f64().unwrap_or(f64::MAX),
            self.b.to_f64().unwrap_or(f64::MAX),
            self.c.to_f64().unwrap_or(f64::MAX),
            self.d.to_f64().unwrap_or(f64::MAX),
        ]
    }
}

pub fn gen_matrix(gen: usize, sign: i8) -> Mat2 {
    let m = match gen {
        S => Mat2 {
            a: BigInt::from(0),
            b: BigInt::from(-1),
            c: BigInt::from(1),
            d: BigInt::from(0),
        },
        R => Mat2 {
            a: BigInt::from(0),
            b: BigInt::from(-1),
            c: BigInt::from(1),
            d: BigInt::from(1),
        },
        _ => panic!("generator index out of range for SL(2,Z)"),
    };
    if sign < 0 {
        m.inverse_unimodular()
    } else {
        m
    }
}

impl Sl2Engine {
    pub fn new(max_rules: usize) -> Result<Self> {
        // relators S^4 and S^2 R^-3
        let relators: Vec<SymWord> = vec![vec![0, 0, 0, 0], vec![0, 0, 3, 3, 3]];
        let rws = kb_complete(2, &relators, max_rules);
        if !rws.confluent {
            return Err(Error::CompletionBudgetExceeded(rws.rules.len()));
        }
        Ok(Sl2Engine { rws })
    }

    pub fn word_to_syms(&self, w: &Word) -> Result<SymWord> {
        let letters = w.letters(MAX_LETTERS)?;
        Ok(letters
            .iter()
            .map(|&(g, s)| (2 * g as Sym) + if s < 0 { 1 } else { 0 })
            .collect())
    }

    pub fn syms_to_word(&self, syms: &[Sym]) -> Word {
        Word::from_letters(
            &syms
                .iter()
                .map(|&s| ((s / 2) as usize, if s % 2 == 1 { -1i8 } else { 1 }))
                .collect::<Vec<_>>(),
        )
    }

    pub fn normal_form(&self, w: &Word) -> Result<Word> {
        let syms = self.word_to_syms(w)?;
        let nf = self.rws.normal_form(&syms)?;
        Ok(self.syms_to_word(&nf))
    }

    /// Evaluates the word to its matrix image.
    pub fn evaluate(&self, w: &Word) -> Result<Mat2> {
        let mut m = Mat2::identity();
        for r in w.runs() {
            let e = r.exp.to_i64().ok_or_else(|| {
                Error::CollectionOverflow("matrix exponent too large".into())
            })?;
            let sign: i8 = if e < 0 { -1 } else { 1 };
            let g = gen_matrix(r.gen, sign);
            for _ in 0..e.unsigned_abs().min(MAX_LETTERS as u64) {
                m = m.mul(&g);
            }
            if e.unsigned_abs() > MAX_LETTERS as u64 {
                return Err(Error::CollectionOverflow("matrix exponent too large".into()));
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{Alphabet, Word};

    fn alph() -> Alphabet {
        Alphabet::new(vec!["S", "R"])
    }

    fn eng() -> Sl2Engine {
        Sl2Engine::new(10_000).unwrap()
    }

    #[test]
    fn relators_are_trivial() {
        let e = eng();
        for t in ["S^4", "S^2 R^-3", "S S S S", "R^3 S^-2"] {
            let w = Word::parse(t, &alph()).unwrap();
            assert!(e.normal_form(&w).unwrap().is_empty(), "{}", t);
            let m = e.evaluate(&w).unwrap();
            assert_eq!(m, Mat2::identity(), "{}", t);
        }
    }

    #[test]
    fn normal_form_matches_matrix_image() {
        let e = eng();
        let w = Word::parse("R^5 S^3 R^-2 S", &alph()).unwrap();
        let nf = e.normal_form(&w).unwrap();
        assert_eq!(e.evaluate(&w).unwrap(), e.evaluate(&nf).unwrap());
    }

    #[test]
    fn central_element() {
        let e = eng();
        let z = Word::parse("S^2", &alph()).unwrap();
        let w = Word::parse("R S R^-1 S", &alph()).unwrap();
        let zw = e.normal_form(&z.concat(&w)).unwrap();
        let wz = e.normal_form(&w.concat(&z)).unwrap();
        assert_eq!(zw, wz);
    }

    #[test]
    fn frobenius_of_generators() {
        let m = gen_matrix(S, 1);
        assert!((m.frobenius_norm() - 2f64.sqrt()).abs() < 1e-12);
        let m = gen_matrix(R, 1);
        assert!((m.frobenius_norm() - 3f64.sqrt()).abs() < 1e-12);
    }
}
