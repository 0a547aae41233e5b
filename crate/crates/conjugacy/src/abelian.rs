//! Abelianization G -> G/[G,G] computed from a relator exponent matrix via
//! Smith normal form. Distinct images certify non-conjugacy, since conjugate
//! elements agree in any abelian quotient.

use crate::snf::{smith_normal_form, Mat};
use crate::word::Word;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

#[derive(Debug, Clone)]
pub struct AbelianStructure {
    n_gens: usize,
    v: Mat,
    /// Invariant factors per coordinate of x*V: d=1 coordinates are trivial,
    /// d=0 coordinates are free, d>1 coordinates are Z/d.
    moduli: Vec<BigInt>,
}

/// An element of the abelianization in reduced coordinates. Coordinates with
/// modulus 1 are dropped; a coordinate with modulus 0 is free, otherwise it
/// lies in [0, modulus).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianElement {
    pub coords: Vec<BigInt>,
}

impl AbelianStructure {
    /// `relators` are exponent-sum rows, one per defining relator.
    pub fn new(n_gens: usize, relator_rows: Vec<Vec<BigInt>>) -> Self {
        if relator_rows.is_empty() {
            return AbelianStructure {
                n_gens,
                v: Mat::identity(n_gens),
                moduli: vec![BigInt::zero(); n_gens],
            };
        }
        let m = Mat::from_rows(relator_rows);
        assert_eq!(m.cols, n_gens);
        let snf = smith_normal_form(&m);
        let mut moduli = vec![BigInt::zero(); n_gens];
        for (i, d) in snf.diag.iter().enumerate() {
            moduli[i] = d.clone();
        }
        AbelianStructure { n_gens, v: snf.v, moduli }
    }

    /// Invariant factors of the torsion part plus the free rank, as
    /// (torsion moduli > 1, free rank).
    pub fn structure(&self) -> (Vec<BigInt>, usize) {
        let torsion = self
            .moduli
            .iter()
            .filter(|d| **d > BigInt::from(1))
            .cloned()
            .collect();
        let free = self.moduli.iter().filter(|d| d.is_zero()).count();
        (torsion, free)
    }

    pub fn exponent_sums(&self, w: &Word) -> Vec<BigInt> {
        let mut x = vec![BigInt::zero(); self.n_gens];
        for r in w.runs() {
            x[r.gen] += &r.exp;
        }
        x
    }

    pub fn image(&self, w: &Word) -> AbelianElement {
        let x = self.exponent_sums(w);
        let mut coords = Vec::new();
        for j in 0..self.n_gens {
            if self.moduli[j] == BigInt::from(1) {
                continue;
            }
            let mut z = BigInt::zero();
            for (i, xi) in x.iter().enumerate() {
                z += xi * &self.v[(i, j)];
            }
            if self.moduli[j] > BigInt::from(1) {
                z = z.mod_floor(&self.moduli[j]);
            }
            coords.push(z);
        }
        AbelianElement { coords }
    }
}

impl AbelianElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Word;

    fn rows(r: Vec<Vec<i64>>) -> Vec<Vec<BigInt>> {
        r.into_iter()
            .map(|x| x.into_iter().map(BigInt::from).collect())
            .collect()
    }

    #[test]
    fn bs12_abelianization_is_z() {
        // gens a,b; relator b a b^-1 a^-2 has exponent row (-1, 0)
        let s = AbelianStructure::new(2, rows(vec![vec![-1, 0]]));
        assert_eq!(s.structure(), (vec![], 1));
        let a = Word::generator(0);
        let b = Word::generator(1);
        assert!(s.image(&a).is_zero());
        assert!(!s.image(&b).is_zero());
        assert_eq!(s.image(&b), s.image(&a.concat(&b)));
    }

    #[test]
    fn sl2z_abelianization_is_z12() {
        // gens S,R; relators S^4 and S^2 R^-3
        let s = AbelianStructure::new(2, rows(vec![vec![4, 0], vec![2, -3]]));
        let (torsion, free) = s.structure();
        assert_eq!(torsion, vec![BigInt::from(12)]);
        assert_eq!(free, 0);
        let img_s = s.image(&Word::generator(0));
        let img_r = s.image(&Word::generator(1));
        // ord(S)=4 and ord(R)=6 in Z/12, and 2S = 3R
        let ord = |e: &AbelianElement| {
            let mut k = 1u32;
            let mut acc = e.coords[0].clone();
            while !(&acc % BigInt::from(12)).is_zero() {
                acc += &e.coords[0];
                k += 1;
            }
            k
        };
        assert_eq!(ord(&img_s), 4);
        assert_eq!(ord(&img_r), 6);
        let two_s = (&img_s.coords[0] * 2) % BigInt::from(12);
        let three_r = (&img_r.coords[0] * 3) % BigInt::from(12);
        assert_eq!(two_s, three_r);
    }

    #[test]
    fn relator_rows_map_to_zero() {
        let s = AbelianStructure::new(2, rows(vec![vec![4, 0], vec![2, -3]]));
        let w = Word::parse("a^4", &crate::word::Alphabet::new(vec!["a", "b"])).unwrap();
        assert!(s.image(&w).is_zero());
        let w2 = Word::parse("a^2 b^-3", &crate::word::Alphabet::new(vec!["a", "b"])).unwrap();
        assert!(s.image(&w2).is_zero());
    }
}
