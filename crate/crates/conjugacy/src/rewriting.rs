//! String rewriting with Knuth-Bendix completion over shortlex.
//!
//! Symbols are letters of the doubled alphabet: generator g contributes
//! symbol 2g (g itself) and 2g+1 (its inverse), and that index order is the
//! shortlex ranking. Free reduction rules x x^-1 -> eps are always seeded.

use crate::error::{Error, Result};
use std::collections::VecDeque;
use std::fmt::Write as _;

pub type Sym = u8;
pub type SymWord = Vec<Sym>;

pub fn inverse_sym(s: Sym) -> Sym {
    s ^ 1
}

pub fn invert_symword(w: &[Sym]) -> SymWord {
    w.iter().rev().map(|&s| inverse_sym(s)).collect()
}

/// Shortlex: shorter first, then lexicographic by symbol index.
pub fn shortlex_less(a: &[Sym], b: &[Sym]) -> bool {
    (a.len(), a) < (b.len(), b)
}

#[derive(Debug, Clone)]
pub struct Rule {
    pub lhs: SymWord,
    pub rhs: SymWord,
}

#[derive(Debug, Clone)]
pub struct RewritingSystem {
    pub n_symbols: usize,
    pub rules: Vec<Rule>,
    pub confluent: bool,
    /// rule indices grouped by first symbol of the lhs
    by_first: Vec<Vec<usize>>,
}

impl RewritingSystem {
    fn rebuild_index(&mut self) {
        self.by_first = vec![Vec::new(); self.n_symbols];
        for (i, r) in self.rules.iter().enumerate() {
            self.by_first[r.lhs[0] as usize].push(i);
        }
    }

    /// Reduces `w` to an irreducible word under the current rules.
    pub fn reduce(&self, w: &[Sym]) -> SymWord {
        let mut out: SymWord = Vec::with_capacity(w.len());
        let mut pending: VecDeque<Sym> = w.iter().copied().collect();
        'outer: while let Some(s) = pending.pop_front() {
            out.push(s);
            // check every suffix of `out` against rules starting with its
            // first symbol
            let max_lhs = self.rules.iter().map(|r| r.lhs.len()).max().unwrap_or(0);
            let lo = out.len().saturating_sub(max_lhs);
            for start in lo..out.len() {
                let first = out[start] as usize;
                for &ri in &self.by_first[first] {
                    let r = &self.rules[ri];
                    if out.len() - start == r.lhs.len() && out[start..] == r.lhs[..] {
                        out.truncate(start);
                        for &x in r.rhs.iter().rev() {
                            pending.push_front(x);
                        }
                        continue 'outer;
                    }
                }
            }
        }
        out
    }

    /// Normal form of a word; requires confluence.
    pub fn normal_form(&self, w: &[Sym]) -> Result<SymWord> {
        if !self.confluent {
            return Err(Error::NotConfluent);
        }
        Ok(self.reduce(w))
    }

    /// All irreducible words of exactly length `len` (backtracking search).
    pub fn irreducible_words(&self, len: usize) -> Vec<SymWord> {
        let mut out = Vec::new();
        let mut cur: SymWord = Vec::new();
        self.enumerate(len, &mut cur, &mut out);
        out
    }

    fn enumerate(&self, len: usize, cur: &mut SymWord, out: &mut Vec<SymWord>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for s in 0..self.n_symbols as Sym {
            cur.push(s);
            if !self.tail_reducible(cur) {
                self.enumerate(len, cur, out);
            }
            cur.pop();
        }
    }

    fn tail_reducible(&self, w: &[Sym]) -> bool {
        let max_lhs = self.rules.iter().map(|r| r.lhs.len()).max().unwrap_or(0);
        let lo = w.len().saturating_sub(max_lhs);
        for start in lo..w.len() {
            for &ri in &self.by_first[w[start] as usize] {
                let r = &self.rules[ri];
                if w.len() - start == r.lhs.len() && w[start..] == r.lhs[..] {
                    return true;
                }
            }
        }
        false
    }

    pub fn dump_rules(&self, names: &[String]) -> String {
        let fmt = |w: &[Sym]| -> String {
            if w.is_empty() {
                return "1".to_string();
            }
            w.iter()
                .map(|&s| names[s as usize].clone())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = String::new();
        for r in &self.rules {
            let _ = writeln!(s, "{} -> {}", fmt(&r.lhs), fmt(&r.rhs));
        }
        s
    }

    /// Checks that every overlap between rule left-hand sides resolves to a
    /// common reduct.
    pub fn is_confluent(&self) -> bool {
        for r1 in &self.rules {
            for r2 in &self.rules {
                for (a, b) in critical_pairs(r1, r2) {
                    if self.reduce(&a) != self.reduce(&b) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Critical pairs from overlaps where a proper suffix of r1.lhs equals a
/// proper prefix of r2.lhs, plus containment overlaps.
fn critical_pairs(r1: &Rule, r2: &Rule) -> Vec<(SymWord, SymWord)> {
    let mut pairs = Vec::new();
    let l1 = &r1.lhs;
    let l2 = &r2.lhs;
    // suffix of l1 = prefix of l2, overlap length k in 1..min(len)-? (proper)
    for k in 1..l1.len().min(l2.len()) {
        if l1[l1.len() - k..] == l2[..k] {
            // superposition: l1 + l2[k..]
            let mut a = r1.rhs.clone();
            a.extend_from_slice(&l2[k..]);
            let mut b = l1[..l1.len() - k].to_vec();
            b.extend_from_slice(&r2.rhs);
            pairs.push((a, b));
        }
    }
    // l2 occurs inside l1
    if l2.len() < l1.len() {
        for start in 0..=l1.len() - l2.len() {
            if &l1[start..start + l2.len()] == l2.as_slice() {
                let a = r1.rhs.clone();
                let mut b = l1[..start].to_vec();
                b.extend_from_slice(&r2.rhs);
                b.extend_from_slice(&l1[start + l2.len()..]);
                pairs.push((a, b));
            }
        }
    }
    pairs
}

/// Knuth-Bendix completion from a list of relators (words equal to the
/// identity) over `n_gens` generators. Returns a flagged non-confluent
/// partial system when the rule budget runs out.
pub fn kb_complete(n_gens: usize, relators: &[SymWord], max_rules: usize) -> RewritingSystem {
    let n_symbols = 2 * n_gens;
    let mut sys = RewritingSystem {
        n_symbols,
        rules: Vec::new(),
        confluent: false,
        by_first: vec![Vec::new(); n_symbols],
    };
    let mut agenda: VecDeque<(SymWord, SymWord)> = VecDeque::new();
    for g in 0..n_gens as Sym {
        agenda.push_back((vec![2 * g, 2 * g + 1], vec![]));
        agenda.push_back((vec![2 * g + 1, 2 * g], vec![]));
    }
    for r in relators {
        agenda.push_back((r.clone(), vec![]));
    }
    loop {
        while let Some((a, b)) = agenda.pop_front() {
            let a = sys.reduce(&a);
            let b = sys.reduce(&b);
            if a == b {
                continue;
            }
            let (lhs, rhs) = if shortlex_less(&a, &b) { (b, a) } else { (a, b) };
            if sys.rules.len() >= max_rules {
                return sys; // flagged: confluent stays false
            }
            let new_rule = Rule { lhs, rhs };
            // existing rules reducible by the new one go back on the agenda
            let mut keep = Vec::new();
            for r in sys.rules.drain(..) {
                let contains = r.lhs.len() >= new_rule.lhs.len()
                    && r.lhs
                        .windows(new_rule.lhs.len())
                        .any(|w| w == new_rule.lhs.as_slice());
                if contains && r.lhs != new_rule.lhs {
                    agenda.push_back((r.lhs, r.rhs));
                } else {
                    keep.push(r);
                }
            }
            sys.rules = keep;
            sys.rules.push(new_rule);
            sys.rebuild_index();
        }
        // derive critical pairs; if any fail to resolve, queue and repeat
        let mut fresh = Vec::new();
        for r1 in &sys.rules {
            for r2 in &sys.rules {
                for (a, b) in critical_pairs(r1, r2) {
                    if sys.reduce(&a) != sys.reduce(&b) {
                        fresh.push((a, b));
                    }
                }
            }
        }
        if fresh.is_empty() {
            sys.confluent = true;
            // normalize right-hand sides
            let reduced: Vec<Rule> = sys
                .rules
                .iter()
                .map(|r| Rule { lhs: r.lhs.clone(), rhs: sys.reduce(&r.rhs) })
                .collect();
            sys.rules = reduced;
            sys.rules.sort_by(|x, y| {
                (x.lhs.len(), &x.lhs).cmp(&(y.lhs.len(), &y.lhs))
            });
            sys.rebuild_index();
            return sys;
        }
        fresh.sort_by(|x, y| (x.0.len(), &x.0).cmp(&(y.0.len(), &y.0)));
        agenda.extend(fresh);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // SL(2,Z) symbols: 0=S, 1=S^-1, 2=R, 3=R^-1
    fn sl2z_system() -> RewritingSystem {
        // relators S^4 and S^2 R^-3
        kb_complete(2, &[vec![0, 0, 0, 0], vec![0, 0, 3, 3, 3]], 10_000)
    }

    #[test]
    fn sl2z_completion_is_confluent() {
        let sys = sl2z_system();
        assert!(sys.confluent);
        assert!(sys.is_confluent());
    }

    #[test]
    fn sl2z_relators_reduce_to_identity() {
        let sys = sl2z_system();
        assert!(sys.normal_form(&[0, 0, 0, 0]).unwrap().is_empty());
        assert!(sys.normal_form(&[0, 0, 3, 3, 3]).unwrap().is_empty());
        // S^2 = R^3 central: S^2 R = R S^2
        assert_eq!(
            sys.normal_form(&[0, 0, 2]).unwrap(),
            sys.normal_form(&[2, 0, 0]).unwrap()
        );
    }

    #[test]
    fn sl2z_irreducible_counts() {
        let sys = sl2z_system();
        assert_eq!(sys.irreducible_words(1).len(), 4);
        // torsion keeps the language thin: 11 at length 2, 12 at length 3
        assert_eq!(sys.irreducible_words(2).len(), 11);
        assert_eq!(sys.irreducible_words(3).len(), 12);
    }

    #[test]
    fn shortlex_is_total_on_samples() {
        let words: Vec<SymWord> = vec![vec![], vec![0], vec![1], vec![0, 0], vec![3, 2]];
        for a in &words {
            for b in &words {
                let less = shortlex_less(a, b);
                let greater = shortlex_less(b, a);
                assert_eq!(a == b, !less && !greater);
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let sys = kb_complete(2, &[vec![0, 0, 0, 0], vec![0, 0, 3, 3, 3]], 3);
        assert!(!sys.confluent);
        assert!(sys.normal_form(&[0]).is_err());
    }

    #[test]
    fn free_group_reduction() {
        let sys = kb_complete(2, &[], 100);
        assert!(sys.confluent);
        assert_eq!(sys.normal_form(&[0, 2, 3, 1]).unwrap(), Vec::<Sym>::new());
    }

    #[test]
    fn dump_has_one_line_per_rule() {
        let sys = sl2z_system();
        let names: Vec<String> = ["S", "S^-1", "R", "R^-1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let dump = sys.dump_rules(&names);
        assert_eq!(dump.lines().count(), sys.rules.len());
        assert!(dump.contains("->"));
    }
}
