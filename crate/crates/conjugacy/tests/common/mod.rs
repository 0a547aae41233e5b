//! Independent oracles for the group engines. Each one evaluates words in a
//! faithful concrete representation without touching the engines' collection
//! or rewriting code, so engine bugs cannot hide in shared helpers.

#![allow(dead_code)]

use conjugacy::group::GroupHandle;
use conjugacy::word::Word;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Affine map x -> 2^k x + t with t in Z[1/2]; BS(1,2) embeds faithfully as
/// a |-> x + 1, b |-> 2x (so that b a b^-1 = a^2 under left-to-right
/// composition with leftmost letter outermost).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub scale: BigRational,
    pub offset: BigRational,
}

impl Affine {
    pub fn identity() -> Affine {
        Affine {
            scale: BigRational::one(),
            offset: BigRational::zero(),
        }
    }

    /// self applied after other: (self . other)(x) = self(other(x))
    pub fn compose(&self, other: &Affine) -> Affine {
        Affine {
            scale: &self.scale * &other.scale,
            offset: &self.scale * &other.offset + &self.offset,
        }
    }

    fn scaling(num: i64, den: i64) -> Affine {
        Affine {
            scale: BigRational::new(BigInt::from(num), BigInt::from(den)),
            offset: BigRational::zero(),
        }
    }

    fn translation() -> Affine {
        Affine {
            scale: BigRational::one(),
            offset: BigRational::one(),
        }
    }

    fn pow(&self, e: &BigInt) -> Affine {
        let (base, mut n) = if e.is_negative() {
            (self.inverse(), -e.clone())
        } else {
            (self.clone(), e.clone())
        };
        let mut acc = Affine::identity();
        let mut sq = base;
        while n.is_positive() {
            if (&n % 2u8).is_one() {
                acc = acc.compose(&sq);
            }
            sq = sq.compose(&sq.clone());
            n >>= 1;
        }
        acc
    }

    fn inverse(&self) -> Affine {
        let inv_scale = self.scale.recip();
        Affine {
            offset: -(&inv_scale * &self.offset),
            scale: inv_scale,
        }
    }
}

/// alphabet order (a, b), per GroupHandle::bs12
pub fn bs12_oracle(w: &Word) -> Affine {
    eval_affine(w, &[Affine::translation(), Affine::scaling(2, 1)])
}

/// alphabet order (q1, q2, b), per GroupHandle::gmbs23; q1 scales by 2 and
/// q2 by 3 so that q1 b q1^-1 = b^2 and q2 b q2^-1 = b^3
pub fn gmbs23_oracle(w: &Word) -> Affine {
    eval_affine(
        w,
        &[
            Affine::scaling(2, 1),
            Affine::scaling(3, 1),
            Affine::translation(),
        ],
    )
}

fn eval_affine(w: &Word, gens: &[Affine]) -> Affine {
    let mut acc = Affine::identity();
    for run in w.runs() {
        acc = acc.compose(&gens[run.gen].pow(&run.exp));
    }
    acc
}

/// Plain 2x2 integer matrix product over the letters of a word, written
/// directly against the generator matrices; alphabet order (S, R).
pub fn sl2z_oracle(w: &Word) -> [BigInt; 4] {
    let s = [0i64, -1, 1, 0];
    let r = [0i64, -1, 1, 1];
    let mut acc = [
        BigInt::one(),
        BigInt::zero(),
        BigInt::zero(),
        BigInt::one(),
    ];
    for run in w.runs() {
        let base = if run.gen == 0 { s } else { r };
        let m: [BigInt; 4] = if run.exp.is_negative() {
            // adjugate of a determinant-1 matrix
            [
                BigInt::from(base[3]),
                BigInt::from(-base[1]),
                BigInt::from(-base[2]),
                BigInt::from(base[0]),
            ]
        } else {
            [
                BigInt::from(base[0]),
                BigInt::from(base[1]),
                BigInt::from(base[2]),
                BigInt::from(base[3]),
            ]
        };
        let n = run.exp.abs().to_u64().expect("test words stay small");
        for _ in 0..n {
            acc = mat_mul(&acc, &m);
        }
    }
    acc
}

fn mat_mul(a: &[BigInt; 4], b: &[BigInt; 4]) -> [BigInt; 4] {
    [
        &a[0] * &b[0] + &a[1] * &b[2],
        &a[0] * &b[1] + &a[1] * &b[3],
        &a[2] * &b[0] + &a[3] * &b[2],
        &a[2] * &b[1] + &a[3] * &b[3],
    ]
}

/// Heisenberg triple (a, b, c) standing for the unitriangular matrix with
/// superdiagonal (a, b) and corner c; product rule
/// (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b').
/// Alphabet order (x, y, z) with x = (1,0,0), y = (0,1,0), z = (0,0,1).
pub fn heisenberg_oracle(w: &Word) -> [BigInt; 3] {
    let mut acc = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
    for run in w.runs() {
        let e = run.exp.clone();
        let g: [BigInt; 3] = match run.gen {
            0 => [e, BigInt::zero(), BigInt::zero()],
            1 => [BigInt::zero(), e, BigInt::zero()],
            _ => [BigInt::zero(), BigInt::zero(), e],
        };
        // powers of a single generator stay on one axis, so the run
        // collapses to one triple multiplication
        acc = [
            &acc[0] + &g[0],
            &acc[1] + &g[1],
            &acc[2] + &g[2] + &acc[0] * &g[1],
        ];
    }
    acc
}

/// Uniform random freely-reduced-ish word: random letters with random small
/// exponents, exercising both long runs and alternations.
pub fn random_test_word(g: &GroupHandle, max_runs: usize, rng: &mut ChaCha8Rng) -> Word {
    let n_gens = g.alphabet.len();
    let runs = rng.gen_range(0..=max_runs);
    let mut w = Word::empty();
    for _ in 0..runs {
        let gen = rng.gen_range(0..n_gens);
        let mut exp: i64 = rng.gen_range(-6..=6);
        if exp == 0 {
            exp = 1;
        }
        w = w.concat(&Word::power(gen, BigInt::from(exp)));
    }
    w
}
