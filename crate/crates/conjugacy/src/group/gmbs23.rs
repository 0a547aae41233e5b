//! Generalized metabelian Baumslag-Solitar group
//! GMBS(2,3) = < q1, q2, b | q1 b q1^-1 = b^2, q2 b q2^-1 = b^3, [q1,q2] = 1 >,
//! normal form q1^-e1 q2^-e2 b^e3 q1^e4 q2^e5 with e1, e2, e4, e5 >= 0,
//! e3 not divisible by 2 when e1, e4 > 0 and not by 3 when e2, e5 > 0.

use crate::error::{Error, Result};
use crate::word::Word;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub const Q1: usize = 0;
pub const Q2: usize = 1;
pub const B: usize = 2;

pub fn collect(w: &Word, max_steps: u64) -> Result<[BigInt; 5]> {
    let mut e = [
        BigInt::zero(),
        BigInt::zero(),
        BigInt::zero(),
        BigInt::zero(),
        BigInt::zero(),
    ];
    let mut steps: u64 = 0;
    let mut charge = |steps: &mut u64, cost: u64| -> Result<()> {
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
    let shift = |e: &mut [BigInt; 5], steps: &mut u64, charge_fn: &mut dyn FnMut(&mut u64, u64) -> Result<()>| -> Result<()> {
        // make the trailing q-exponents nonnegative by widening the sandwich
        if e[3].is_negative() {
            let k = (-&e[3])
                .to_u64()
                .ok_or_else(|| Error::CollectionOverflow("shift exponent too large".into()))?;
            charge_fn(steps, k)?;
            e[0] += -&e[3];
            e[2] = &e[2] << k;
            e[3] = BigInt::zero();
        }
        if e[4].is_negative() {
            let k = (-&e[4])
                .to_u64()
                .ok_or_else(|| Error::CollectionOverflow("shift exponent too large".into()))?;
            charge_fn(steps, k)?;
            e[1] += -&e[4];
            e[2] = &e[2] * BigInt::from(3u32).pow(k as u32);
            e[4] = BigInt::zero();
        }
        Ok(())
    };
    for r in w.runs() {
        match r.gen {
            Q1 => {
                e[3] += &r.exp;
                charge(&mut steps, 1)?;
            }
            Q2 => {
                e[4] += &r.exp;
                charge(&mut steps, 1)?;
            }
            B => {
                shift(&mut e, &mut steps, &mut charge)?;
                let s2 = e[3]
                    .to_u64()
                    .ok_or_else(|| Error::CollectionOverflow("shift exponent too large".into()))?;
                let s3 = e[4]
                    .to_u64()
                    .ok_or_else(|| Error::CollectionOverflow("shift exponent too large".into()))?;
                if s3 > u32::MAX as u64 {
                    return Err(Error::CollectionOverflow("shift exponent too large".into()));
                }
                charge(&mut steps, s2 + s3 + 1)?;
                e[2] += &r.exp * (BigInt::from(1) << s2) * BigInt::from(3u32).pow(s3 as u32);
            }
            g => {
                return Err(Error::InvalidPresentation(format!(
                    "generator index {} out of range for GMBS(2,3)",
                    g
                )))
            }
        }
    }
    shift(&mut e, &mut steps, &mut charge)?;
    if e[2].is_zero() {
        // commuting q-powers recombine
        for (lo, hi) in [(0usize, 3usize), (1, 4)] {
            let n = &e[hi] - &e[lo];
            if n.is_negative() {
                e[lo] = -n;
                e[hi] = BigInt::zero();
            } else {
                e[lo] = BigInt::zero();
                e[hi] = n;
            }
        }
    } else {
        let k2 = e[0]
            .clone()
            .min(e[3].clone())
            .min(BigInt::from(padic(&e[2], 2)))
            .to_u64()
            .unwrap();
        if k2 > 0 {
            e[0] -= k2;
            e[3] -= k2;
            e[2] = &e[2] >> k2;
        }
        let k3 = e[1]
            .clone()
            .min(e[4].clone())
            .min(BigInt::from(padic(&e[2], 3)))
            .to_u64()
            .unwrap();
        if k3 > 0 {
            e[1] -= k3;
            e[4] -= k3;
            e[2] = &e[2] / BigInt::from(3u32).pow(k3 as u32);
        }
    }
    Ok(e)
}

fn padic(x: &BigInt, p: u32) -> u64 {
    if x.is_zero() {
        return 0;
    }
    if p == 2 {
        return x.trailing_zeros().unwrap_or(0);
    }
    let p = BigInt::from(p);
    let mut v = 0u64;
    let mut y = x.clone();
    while (&y % &p).is_zero() {
        y /= &p;
        v += 1;
    }
    v
}

pub fn to_word(e: &[BigInt; 5]) -> Word {
    Word::from_pairs([
        (Q1, -e[0].clone()),
        (Q2, -e[1].clone()),
        (B, e[2].clone()),
        (Q1, e[3].clone()),
        (Q2, e[4].clone()),
    ])
}

pub fn length(e: &[BigInt; 5]) -> BigInt {
    e.iter().map(|x| x.abs()).sum()
}
