//! Group engines behind one handle: normal forms, products, conjugation
//! (u^t = t^-1 u t throughout), element length and abelianization.

pub mod bs12;
pub mod gmbs23;
pub mod pcp;
pub mod sl2z;

use crate::abelian::{AbelianElement, AbelianStructure};
use crate::error::{Error, Result};
use crate::word::{Alphabet, Word};
use num_bigint::BigInt;

pub const DEFAULT_COLLECTION_BUDGET: u64 = 10_000_000;
pub const DEFAULT_KB_MAX_RULES: usize = 10_000;

#[derive(Debug, Clone)]
pub enum Engine {
    Bs12,
    Gmbs23,
    Sl2z(sl2z::Sl2Engine),
    Pcp(pcp::PcPresentation),
}

#[derive(Debug, Clone)]
pub struct GroupHandle {
    pub name: String,
    pub alphabet: Alphabet,
    pub engine: Engine,
    pub abelianization: AbelianStructure,
    pub collection_budget: u64,
}

impl GroupHandle {
    pub fn bs12() -> GroupHandle {
        let alphabet = Alphabet::new(vec!["a", "b"]);
        // relator b a b^-1 a^-2
        let abelianization = AbelianStructure::new(2, vec![row(2, &[(0, -1)])]);
        GroupHandle {
            name: "bs12".into(),
            alphabet,
            engine: Engine::Bs12,
            abelianization,
            collection_budget: DEFAULT_COLLECTION_BUDGET,
        }
    }

    pub fn gmbs23() -> GroupHandle {
        let alphabet = Alphabet::new(vec!["q1", "q2", "b"]);
        // relators q1 b q1^-1 b^-2, q2 b q2^-1 b^-3, [q1,q2]
        let abelianization = AbelianStructure::new(
            3,
            vec![row(3, &[(2, -1)]), row(3, &[(2, -2)]), row(3, &[])],
        );
        GroupHandle {
            name: "gmbs23".into(),
            alphabet,
            engine: Engine::Gmbs23,
            abelianization,
            collection_budget: DEFAULT_COLLECTION_BUDGET,
        }
    }

    pub fn sl2z() -> Result<GroupHandle> {
        let alphabet = Alphabet::new(vec!["S", "R"]);
        // relators S^4, S^2 R^-3
        let abelianization =
            AbelianStructure::new(2, vec![row(2, &[(0, 4)]), row(2, &[(0, 2), (1, -3)])]);
        Ok(GroupHandle {
            name: "sl2z".into(),
            alphabet,
            engine: Engine::Sl2z(sl2z::Sl2Engine::new(DEFAULT_KB_MAX_RULES)?),
            abelianization,
            collection_budget: DEFAULT_COLLECTION_BUDGET,
        })
    }

    pub fn from_pcp(name: &str, p: pcp::PcPresentation) -> GroupHandle {
        let n = p.n();
        let mut rows = Vec::new();
        for (i, order) in p.orders.iter().enumerate() {
            if let Some(r) = order {
                // g_i^r w^-1
                let mut x = vec![BigInt::from(0); n];
                x[i] = r.clone();
                if let Some(w) = &p.powers[i] {
                    for run in w.runs() {
                        x[run.gen] -= &run.exp;
                    }
                }
                rows.push(x);
            }
        }
        for ((_, j, _), w) in &p.conj {
            // g_j^{g_i^s} w^-1 abelianizes to g_j - w
            let mut x = vec![BigInt::from(0); n];
            x[*j] += 1;
            for run in w.runs() {
                x[run.gen] -= &run.exp;
            }
            rows.push(x);
        }
        let abelianization = AbelianStructure::new(n, rows);
        GroupHandle {
            name: name.into(),
            alphabet: p.alphabet.clone(),
            engine: Engine::Pcp(p),
            abelianization,
            collection_budget: DEFAULT_COLLECTION_BUDGET,
        }
    }

    pub fn pcp_file(path: &std::path::Path) -> Result<GroupHandle> {
        let p = pcp::PcPresentation::parse_file(path)?;
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("pcp")
            .to_string();
        Ok(GroupHandle::from_pcp(&name, p))
    }

    pub fn heisenberg() -> GroupHandle {
        GroupHandle::from_pcp(
            "heisenberg",
            pcp::PcPresentation::parse(pcp::HEISENBERG).unwrap(),
        )
    }

    /// Number of exponent-vector slots, None for SL(2,Z) which has no
    /// exponent normal form.
    pub fn nf_slots(&self) -> Option<usize> {
        match &self.engine {
            Engine::Bs12 => Some(3),
            Engine::Gmbs23 => Some(5),
            Engine::Sl2z(_) => None,
            Engine::Pcp(p) => Some(p.n()),
        }
    }

    pub fn hirsch_length(&self) -> Option<usize> {
        match &self.engine {
            Engine::Pcp(p) => Some(p.hirsch_length()),
            _ => None,
        }
    }

    pub fn normal_form(&self, w: &Word) -> Result<Word> {
        match &self.engine {
            Engine::Bs12 => Ok(bs12::to_word(&bs12::collect(w, self.collection_budget)?)),
            Engine::Gmbs23 => Ok(gmbs23::to_word(&gmbs23::collect(w, self.collection_budget)?)),
            Engine::Sl2z(e) => e.normal_form(w),
            Engine::Pcp(p) => Ok(p.to_word(&p.collect(w, self.collection_budget)?)),
        }
    }

    pub fn exponent_vector(&self, w: &Word) -> Result<Vec<BigInt>> {
        match &self.engine {
            Engine::Bs12 => Ok(bs12::collect(w, self.collection_budget)?.to_vec()),
            Engine::Gmbs23 => Ok(gmbs23::collect(w, self.collection_budget)?.to_vec()),
            Engine::Sl2z(_) => Err(Error::UnsupportedRecipe {
                recipe: "exponent vector".into(),
                group: self.name.clone(),
            }),
            Engine::Pcp(p) => p.collect(w, self.collection_budget),
        }
    }

    pub fn multiply(&self, u: &Word, v: &Word) -> Result<Word> {
        self.normal_form(&u.concat(v))
    }

    pub fn invert(&self, u: &Word) -> Result<Word> {
        self.normal_form(&u.inverse())
    }

    /// u^t = t^-1 u t, returned in normal form.
    pub fn conjugate(&self, u: &Word, t: &Word) -> Result<Word> {
        self.normal_form(&t.inverse().concat(u).concat(t))
    }

    /// Length of the normal form of w (sum of absolute exponents).
    pub fn element_length(&self, w: &Word) -> Result<BigInt> {
        Ok(self.normal_form(w)?.len())
    }

    pub fn is_identity(&self, w: &Word) -> Result<bool> {
        Ok(self.normal_form(w)?.is_empty())
    }

    pub fn abelian_image(&self, w: &Word) -> AbelianElement {
        self.abelianization.image(w)
    }

    /// Defining relators as words, each normalizing to the identity.
    pub fn relators(&self) -> Vec<Word> {
        let parse = |texts: &[&str]| -> Vec<Word> {
            texts
                .iter()
                .map(|t| Word::parse(t, &self.alphabet).unwrap())
                .collect()
        };
        match &self.engine {
            Engine::Bs12 => parse(&["b a b^-1 a^-2"]),
            Engine::Gmbs23 => parse(&[
                "q1 b q1^-1 b^-2",
                "q2 b q2^-1 b^-3",
                "q1 q2 q1^-1 q2^-1",
            ]),
            Engine::Sl2z(_) => parse(&["S^4", "S^2 R^-3"]),
            Engine::Pcp(p) => {
                let mut out = Vec::new();
                for (i, order) in p.orders.iter().enumerate() {
                    if let Some(r) = order {
                        let mut w = Word::power(i, r.clone());
                        if let Some(rhs) = &p.powers[i] {
                            w = w.concat(&rhs.inverse());
                        }
                        out.push(w);
                    }
                }
                for ((i, j, sign), rhs) in &p.conj {
                    let t = Word::power(*i, BigInt::from(*sign));
                    let w = t
                        .inverse()
                        .concat(&Word::generator(*j))
                        .concat(&t)
                        .concat(&rhs.inverse());
                    out.push(w);
                }
                out
            }
        }
    }
}

fn row(n: usize, entries: &[(usize, i64)]) -> Vec<BigInt> {
    let mut x = vec![BigInt::from(0); n];
    for (i, v) in entries {
        x[*i] = BigInt::from(*v);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn groups() -> Vec<GroupHandle> {
        vec![
            GroupHandle::bs12(),
            GroupHandle::gmbs23(),
            GroupHandle::sl2z().unwrap(),
            GroupHandle::heisenberg(),
        ]
    }

    #[test]
    fn relators_normalize_to_identity() {
        for g in groups() {
            for r in g.relators() {
                assert!(g.is_identity(&r).unwrap(), "{} relator {:?}", g.name, r);
                assert!(g.abelian_image(&r).is_zero(), "{} abelian", g.name);
            }
        }
    }

    #[test]
    fn shipped_presentation_files_load() {
        let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
        let h = GroupHandle::pcp_file(&root.join("heisenberg.pcp")).unwrap();
        assert_eq!(h.nf_slots(), Some(3));
        assert_eq!(h.hirsch_length(), Some(3));
        let ch = GroupHandle::pcp_file(&root.join("c2xheis.pcp")).unwrap();
        assert_eq!(ch.name, "c2xheis");
        assert_eq!(ch.nf_slots(), Some(4));
        assert_eq!(ch.hirsch_length(), Some(3));
        // t is order 2 and central
        let t2 = Word::parse("t^2", &ch.alphabet).unwrap();
        assert!(ch.is_identity(&t2).unwrap());
        let w = Word::parse("x t y t^-1", &ch.alphabet).unwrap();
        let nf = ch.exponent_vector(&w).unwrap();
        assert_eq!(nf, vec![BigInt::from(0), BigInt::from(1), BigInt::from(1), BigInt::from(0)]);
        // commutator of x and y still lands on z
        let c = Word::parse("x^-1 y^-1 x y", &ch.alphabet).unwrap();
        let nf = ch.exponent_vector(&c).unwrap();
        assert_eq!(nf, vec![BigInt::from(0), BigInt::from(0), BigInt::from(0), BigInt::from(1)]);
        assert_eq!(ch.abelianization.structure(), (vec![BigInt::from(2)], 2));
    }

    #[test]
    fn conjugation_convention() {
        let g = GroupHandle::bs12();
        let a = Word::parse("a", &g.alphabet).unwrap();
        let binv = Word::parse("b^-1", &g.alphabet).unwrap();
        // a^(b^-1) = b a b^-1 = a^2
        let c = g.conjugate(&a, &binv).unwrap();
        assert_eq!(c, Word::parse("a^2", &g.alphabet).unwrap());
    }

    #[test]
    fn normal_form_is_idempotent() {
        for g in groups() {
            let w = Word::parse(
                match g.name.as_str() {
                    "bs12" => "b^-2 a^3 b a^-1",
                    "gmbs23" => "q1 b^2 q2^-1 b q1^-1",
                    "sl2z" => "S R^2 S^-1 R^4",
                    _ => "x y^2 x^-1 z",
                },
                &g.alphabet,
            )
            .unwrap();
            let nf = g.normal_form(&w).unwrap();
            assert_eq!(nf, g.normal_form(&nf).unwrap(), "{}", g.name);
        }
    }

    #[test]
    fn element_length_uses_normal_form() {
        let g = GroupHandle::bs12();
        // |ba| = 3 because its normal form is a^2 b
        let w = Word::parse("b a", &g.alphabet).unwrap();
        assert_eq!(g.element_length(&w).unwrap(), BigInt::from(3));
    }

    #[test]
    fn inverse_multiplies_to_identity() {
        for g in groups() {
            let w = Word::parse(
                match g.name.as_str() {
                    "bs12" => "a b^-1 a^2 b",
                    "gmbs23" => "b q1^-1 b q2",
                    "sl2z" => "R S R R S^-1",
                    _ => "z x y^-3",
                },
                &g.alphabet,
            )
            .unwrap();
            let inv = g.invert(&w).unwrap();
            assert!(g.is_identity(&w.concat(&inv)).unwrap(), "{}", g.name);
            assert!(g.multiply(&inv, &w).unwrap().is_empty(), "{}", g.name);
        }
    }

    #[test]
    fn abelianization_structures() {
        assert_eq!(GroupHandle::bs12().abelianization.structure(), (vec![], 1));
        assert_eq!(GroupHandle::gmbs23().abelianization.structure(), (vec![], 2));
        assert_eq!(
            GroupHandle::sl2z().unwrap().abelianization.structure(),
            (vec![BigInt::from(12)], 0)
        );
        assert_eq!(
            GroupHandle::heisenberg().abelianization.structure(),
            (vec![], 2)
        );
    }
}
