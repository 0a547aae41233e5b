//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::from(1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c));
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row a += q * row b
    fn add_row(&mut self, a: usize, b: usize, q: &BigInt) {
        for j in 0..self.cols {
            let add = q * &self[(b, j)];
            self[(a, j)] += add;
        }
    }

    /// col a += q * col b
    fn add_col(&mut self, a: usize, b: usize, q: &BigInt) {
        for i in 0..self.rows {
            let add = q * &self[(i, b)];
            self[(i, a)] += add;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self[(a, j)].clone();
            self[(a, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Debug, Clone)]
pub struct Snf {
    /// Diagonal of D, length min(rows, cols); nonzero entries first, each
    /// dividing the next, then zeros.
    pub diag: Vec<BigInt>,
    pub u: Mat,
    pub v: Mat,
}

/// Computes U, V unimodular with U * M * V = D diagonal, d_i | d_{i+1}.
pub fn smith_normal_form(m: &Mat) -> Snf {
    let mut a = m.clone();
    let mut u = Mat::identity(m.rows);
    let mut v = Mat::identity(m.cols);
    let n = m.rows.min(m.cols);
    let mut t = 0;
    while t < n {
        // find the smallest nonzero entry in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..a.rows {
            for j in t..a.cols {
                if !a[(i, j)].is_zero()
                    && pivot.map_or(true, |(pi, pj)| a[(i, j)].abs() < a[(pi, pj)].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..a.rows {
                if !a[(i, t)].is_zero() {
                    let q = -a[(i, t)].div_floor(&a[(t, t)]);
                    a.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                    if !a[(i, t)].is_zero() {
                        a.swap_rows(i, t);
                        u.swap_rows(i, t);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..a.cols {
                if !a[(t, j)].is_zero() {
                    let q = -a[(t, j)].div_floor(&a[(t, t)]);
                    a.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    if !a[(t, j)].is_zero() {
                        a.swap_cols(j, t);
                        v.swap_cols(j, t);
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }

        // divisibility: if some entry below/right is not a multiple of the
        // pivot, fold its row in and redo this pivot
        let mut redo = false;
        'scan: for i in t + 1..a.rows {
            for j in t + 1..a.cols {
                if !(&a[(i, j)] % &a[(t, t)]).is_zero() {
                    let one = BigInt::from(1);
                    a.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                    redo = true;
                    break 'scan;
                }
            }
        }
        if redo {
            continue;
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let diag = (0..n).map(|i| a[(i, i)].clone()).collect();
    Snf { diag, u, v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: Vec<Vec<i64>>) -> Mat {
        Mat::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
        )
    }

    fn check(m: &Mat) -> Snf {
        let snf = smith_normal_form(m);
        let d = snf.u.mul(m).mul(&snf.v);
        for i in 0..m.rows {
            for j in 0..m.cols {
                if i == j && i < snf.diag.len() {
                    assert_eq!(d[(i, j)], snf.diag[i]);
                } else {
                    assert!(d[(i, j)].is_zero(), "off-diagonal at {},{}", i, j);
                }
            }
        }
        for w in snf.diag.windows(2) {
            if !w[0].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "divisibility {} | {}", w[0], w[1]);
            } else {
                assert!(w[1].is_zero());
            }
        }
        snf
    }

    #[test]
    fn sl2z_relation_matrix() {
        let snf = check(&big(vec![vec![4, 0], vec![2, -3]]));
        assert_eq!(snf.diag, vec![BigInt::from(1), BigInt::from(12)]);
    }

    #[test]
    fn rank_deficient() {
        let snf = check(&big(vec![vec![2, 4], vec![1, 2]]));
        assert_eq!(snf.diag, vec![BigInt::from(1), BigInt::from(0)]);
    }

    #[test]
    fn rectangular() {
        check(&big(vec![vec![6, 4, 2]]));
        check(&big(vec![vec![2], vec![3], vec![5]]));
        let snf = check(&big(vec![vec![2, 0], vec![0, 2], vec![2, 2]]));
        assert_eq!(snf.diag, vec![BigInt::from(2), BigInt::from(2)]);
    }

    #[test]
    fn zero_matrix() {
        let snf = check(&big(vec![vec![0, 0], vec![0, 0]]));
        assert_eq!(snf.diag, vec![BigInt::from(0), BigInt::from(0)]);
    }
}
