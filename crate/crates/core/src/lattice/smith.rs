//! Smith and Hermite normal forms over the integers.
//!
//! Both reductions only use elementary operations (swaps, negations, adding an
//! integer multiple of one row/column to another), so the change-of-basis
//! matrices and their inverses are tracked exactly alongside the reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// `U * M * V = S` with `U`, `V` unimodular and `S` diagonal with `s_1 | s_2 | ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SnfDecomposition {
    /// Diagonal of `S`, including trailing zeros.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

struct Reducer {
    s: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.s.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.s.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    /// `row[dst] += c * row[src]`
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.s.add_row_multiple(dst, src, c);
        self.u.add_row_multiple(dst, src, c);
        self.u_inv.add_col_multiple(src, dst, &-c);
    }

    /// `col[dst] += c * col[src]`
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.s.add_col_multiple(dst, src, c);
        self.v.add_col_multiple(dst, src, c);
        self.v_inv.add_row_multiple(src, dst, &-c);
    }

    fn negate_row(&mut self, i: usize) {
        self.s.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    /// Position of the smallest nonzero |entry| in the block `t.., t..`, first in row-major order.
    fn smallest_in_block(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.s.rows() {
            for j in t..self.s.cols() {
                let x = &self.s[(i, j)];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.s[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    /// Smallest nonzero |entry| among row `t` and column `t` (pivot included).
    fn smallest_in_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t);
        let mut consider = |pos: (usize, usize), s: &IntMatrix| {
            let x = &s[pos];
            if !x.is_zero() && (s[best].is_zero() || x.abs() < s[best].abs()) {
                best = pos;
            }
        };
        for i in t..self.s.rows() {
            consider((i, t), &self.s);
        }
        for j in t..self.s.cols() {
            consider((t, j), &self.s);
        }
        best
    }

    fn run(&mut self) {
        let limit = self.s.rows().min(self.s.cols());
        for t in 0..limit {
            let Some((pi, pj)) = self.smallest_in_block(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..self.s.rows() {
                    if self.s[(i, t)].is_zero() {
                        continue;
                    }
                    let q = self.s[(i, t)].div_floor(&self.s[(t, t)]);
                    self.add_row(i, t, &-q);
                    if !self.s[(i, t)].is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..self.s.cols() {
                    if self.s[(t, j)].is_zero() {
                        continue;
                    }
                    let q = self.s[(t, j)].div_floor(&self.s[(t, t)]);
                    self.add_col(j, t, &-q);
                    if !self.s[(t, j)].is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    let (pi, pj) = self.smallest_in_cross(t);
                    self.swap_rows(t, pi);
                    self.swap_cols(t, pj);
                    continue;
                }
                // Row and column are clear; the pivot must divide the rest of the block.
                let offender = (t + 1..self.s.rows()).find(|&i| {
                    (t + 1..self.s.cols()).any(|j| !self.s[(i, j)].is_multiple_of(&self.s[(t, t)]))
                });
                match offender {
                    Some(i) => self.add_row(t, i, &BigInt::from(1)),
                    None => break,
                }
            }
            if self.s[(t, t)].is_negative() {
                self.negate_row(t);
            }
        }
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let mut r = Reducer {
        s: m.clone(),
        u: IntMatrix::identity(m.rows()),
        u_inv: IntMatrix::identity(m.rows()),
        v: IntMatrix::identity(m.cols()),
        v_inv: IntMatrix::identity(m.cols()),
    };
    r.run();
    SnfDecomposition { u: r.u, s: r.s, v: r.v, u_inv: r.u_inv, v_inv: r.v_inv }
}

/// Row-style Hermite normal form of the row span of `rows`.
///
/// Returns the nonzero rows in echelon form: pivots positive and strictly moving
/// right, entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_rows(rows: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    debug_assert!(a.iter().all(|r| r.len() == n));
    let mut r = 0;
    for col in 0..n {
        if r == a.len() {
            break;
        }
        loop {
            let pivot = (r..a.len())
                .filter(|&i| !a[i][col].is_zero())
                .min_by(|&x, &y| a[x][col].abs().cmp(&a[y][col].abs()));
            let Some(p) = pivot else { break };
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..a.len() {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = a[i][col].div_floor(&a[r][col]);
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                if !a[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[r][col].is_zero() {
            continue;
        }
        if a[r][col].is_negative() {
            for x in a[r].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        let pivot_row = a[r].clone();
        for row in a.iter_mut().take(r) {
            let q = row[col].div_floor(&pivot_row[col]);
            if q.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &q * y;
            }
        }
        r += 1;
    }
    a.truncate(r);
    a.retain(|row| row.iter().any(|x| !x.is_zero()));
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix::to_bigints;

    fn check(m: &IntMatrix, expected_diag: &[i64]) {
        let snf = smith_normal_form(m);
        let prod = snf.u.mul(m).unwrap().mul(&snf.v).unwrap();
        assert_eq!(prod, snf.s);
        assert!(snf.s.is_diagonal());
        assert_eq!(snf.diagonal(), to_bigints(expected_diag));
        assert!(snf.u.mul(&snf.u_inv).unwrap().is_identity());
        assert!(snf.v.mul(&snf.v_inv).unwrap().is_identity());
    }

    #[test]
    fn identity_is_its_own_normal_form() {
        check(&IntMatrix::identity(3), &[1, 1, 1]);
    }

    #[test]
    fn two_by_two_example() {
        // gcd of entries 2, |det| = 8
        check(&IntMatrix::from_rows([[2, 4], [6, 8]]).unwrap(), &[2, 4]);
    }

    #[test]
    fn coprime_diagonal_merges() {
        check(&IntMatrix::diagonal(&[6, 4]), &[2, 12]);
    }

    #[test]
    fn rectangular_and_rank_deficient() {
        let m = IntMatrix::from_rows([[1, 2, 3], [2, 4, 6]]).unwrap();
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diagonal(), to_bigints(&[1, 0]));
        assert_eq!(snf.rank(), 1);
        check(&IntMatrix::from_rows([[0, 0], [0, 0]]).unwrap(), &[0, 0]);
        check(&IntMatrix::from_rows([[4], [6]]).unwrap(), &[2]);
    }

    #[test]
    fn hermite_basis_of_simple_lattice() {
        let rows = vec![to_bigints(&[2, 0]), to_bigints(&[0, 2]), to_bigints(&[1, 1])];
        let h = hermite_rows(&rows, 2);
        assert_eq!(h, vec![to_bigints(&[1, 1]), to_bigints(&[0, 2])]);
        assert!(hermite_rows(&[to_bigints(&[0, 0])], 2).is_empty());
    }
}
