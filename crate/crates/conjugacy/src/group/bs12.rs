//! BS(1,2) = < a, b | b a b^-1 = a^2 >, normal form b^-e1 a^e2 b^e3 with
//! e1, e3 >= 0 and e2 odd whenever e1 > 0 and e3 > 0.

use crate::error::{Error, Result};
use crate::word::Word;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub const A: usize = 0;
pub const B: usize = 1;

/// Collects a word into the exponent triple (e1, e2, e3).
pub fn collect(w: &Word, max_steps: u64) -> Result<[BigInt; 3]> {
    // running state represents b^-e1 a^e2 b^e3 with e1 >= 0, e3 unconstrained
    let mut e1 = BigInt::zero();
    let mut e2 = BigInt::zero();
    let mut e3 = BigInt::zero();
    let mut steps: u64 = 0;
    let charge = |steps: &mut u64, cost: u64| -> Result<()> {
        *steps = steps.saturating_add(cost);
        if *steps > max_steps {
            Err(Error::CollectionOverflow(format!(
                "step budget {} exceeded",
                max_steps
            )))
        } else {
            Ok(())
        }
    };
    for r in w.runs() {
        match r.gen {
            B => {
                e3 += &r.exp;
                charge(&mut steps, 1)?;
            }
            A => {
                if e3.is_negative() {
                    // b^e3 a = a' b^e3 requires pushing a past b^-1:
                    // absorb into e1 and scale e2
                    let k = (-&e3).to_u64().ok_or_else(|| {
                        Error::CollectionOverflow("shift exponent too large".into())
                    })?;
                    charge(&mut steps, k)?;
                    e1 += -&e3;
                    e2 <<= k;
                    e3 = BigInt::zero();
                }
                let s = e3.to_u64().ok_or_else(|| {
                    Error::CollectionOverflow("shift exponent too large".into())
                })?;
                charge(&mut steps, s + 1)?;
                e2 += &r.exp << s;
            }
            g => {
                return Err(Error::InvalidPresentation(format!(
                    "generator index {} out of range for BS(1,2)",
                    g
                )))
            }
        }
    }
    if e3.is_negative() {
        let k = (-&e3)
            .to_u64()
            .ok_or_else(|| Error::CollectionOverflow("shift exponent too large".into()))?;
        charge(&mut steps, k)?;
        e1 += -&e3;
        e2 <<= k;
        e3 = BigInt::zero();
    }
    if e2.is_zero() {
        // pure power of b
        let n = &e3 - &e1;
        if n.is_negative() {
            e1 = -n;
            e3 = BigInt::zero();
        } else {
            e1 = BigInt::zero();
            e3 = n;
        }
    } else {
        // cancel matching b^-1 ... b while the middle exponent is even
        let k = e1
            .clone()
            .min(e3.clone())
            .min(BigInt::from(twos(&e2)))
            .max(BigInt::zero());
        let k = k.to_u64().unwrap();
        if k > 0 {
            e1 -= k;
            e3 -= k;
            e2 >>= k;
        }
    }
    Ok([e1, e2, e3])
}

/// 2-adic valuation, saturated at u64::MAX for zero.
fn twos(x: &BigInt) -> u64 {
    if x.is_zero() {
        return u64::MAX;
    }
    x.trailing_zeros().unwrap_or(0)
}

pub fn to_word(e: &[BigInt; 3]) -> Word {
    Word::from_pairs([
        (B, -e[0].clone()),
        (A, e[1].clone()),
        (B, e[2].clone()),
    ])
}

pub fn length(e: &[BigInt; 3]) -> BigInt {
    e[0].abs() + e[1].abs() + e[2].abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{Alphabet, Word};

    fn alph() -> Alphabet {
        Alphabet::new(vec!["a", "b"])
    }

    fn nf(text: &str) -> [BigInt; 3] {
        collect(&Word::parse(text, &alph()).unwrap(), 10_000_000).unwrap()
    }

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn relator_normalizes_to_identity() {
        assert_eq!(nf("b a b^-1 a^-2"), [b(0), b(0), b(0)]);
    }

    #[test]
    fn worked_examples() {
        assert_eq!(nf("b a b^-1"), [b(0), b(2), b(0)]);
        assert_eq!(nf("b a"), [b(0), b(2), b(1)]);
        assert_eq!(nf("b^-1 a b"), [b(1), b(1), b(1)]);
    }

    #[test]
    fn pure_b_powers_collapse() {
        assert_eq!(nf("b^-1 a a^-1 b"), [b(0), b(0), b(0)]);
        assert_eq!(nf("b^3 b^-5"), [b(2), b(0), b(0)]);
    }

    #[test]
    fn middle_exponent_odd_when_flanked() {
        let e = nf("b^-2 a^4 b^2");
        assert_eq!(e, [b(0), b(1), b(0)]);
        let e = nf("b^-2 a^6 b^3");
        assert_eq!(e, [b(1), b(3), b(2)]);
    }

    #[test]
    fn conjugate_blowup_uses_bigints() {
        let w = Word::parse("b^-40 a b^40", &alph()).unwrap();
        let e = collect(&w, 10_000_000).unwrap();
        assert_eq!(e[0], b(40));
        assert_eq!(e[1], b(1));
        assert_eq!(e[2], b(40));
        let w2 = Word::parse("b^40 a b^-40", &alph()).unwrap();
        let e2 = collect(&w2, 10_000_000).unwrap();
        assert_eq!(e2[1], BigInt::from(2u64).pow(40));
    }

    #[test]
    fn budget_is_enforced() {
        let w = Word::parse("b^-1000 a b^1000", &alph()).unwrap();
        assert!(collect(&w, 10).is_err());
    }
}
