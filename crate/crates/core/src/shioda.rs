//! Invariants of an exponent matrix: the scaled inverse `B = dA^{-1}`, the
//! weights `q = Be`, the dual weights `q' = e^T B`, their gcd reductions, and
//! the Calabi-Yau degree condition. Also builds the polynomials `F_A` and
//! `F_{A,t} = F_A - t x_1...x_n`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result, WeightKind};
use crate::lattice::{gcd_all, IntMatrix};

/// Square, invertible matrix of non-negative integers; row `i` is the exponent
/// vector of the `i`-th monomial of `F_A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentMatrix(IntMatrix);

impl ExponentMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m[(i, j)].is_negative() {
                    return Err(Error::NegativeEntry { row: i + 1, col: j + 1 });
                }
            }
        }
        if m.det()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(Self(m))
    }

    pub fn from_rows<R, T>(rows: R) -> Result<Self>
    where
        R: IntoIterator,
        R::Item: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::new(IntMatrix::from_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn transpose(&self) -> ExponentMatrix {
        ExponentMatrix(self.0.transpose())
    }
}

impl fmt::Display for ExponentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Everything derived from `A` by exact arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiodaData {
    pub matrix: ExponentMatrix,
    pub d: BigInt,
    pub b: IntMatrix,
    /// Row sums of `B`.
    pub q: Vec<BigInt>,
    pub m: BigInt,
    pub q_reduced: Vec<BigInt>,
    /// Column sums of `B`.
    pub q_prime: Vec<BigInt>,
    pub m_prime: BigInt,
    pub a_prime: BigInt,
    pub a_prime_vec: Vec<BigInt>,
    pub is_cy: bool,
}

impl ShiodaData {
    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn require_cy(&self) -> Result<()> {
        if self.is_cy {
            Ok(())
        } else {
            Err(Error::NotCalabiYau {
                sum: self.q.iter().sum::<BigInt>().to_string(),
                d: self.d.to_string(),
            })
        }
    }

    /// Checks `Aq = de`, `Be = q`, `e^T B = q'`, the gcd reductions and the CY sums.
    pub fn check_consistency(&self) -> Result<()> {
        let a = self.matrix.matrix();
        let n = self.n();
        let de = vec![self.d.clone(); n];
        let fail = |what: &str| Err(Error::Internal(format!("derived data inconsistent: {what}")));
        if a.mul_vec(&self.q)? != de {
            return fail("A q != d e");
        }
        if self.b.row_sums() != self.q || self.b.col_sums() != self.q_prime {
            return fail("row/column sums of B");
        }
        if a.mul(&self.b)? != IntMatrix::identity(n).scale(&self.d) {
            return fail("A B != d I");
        }
        if &self.a_prime * &self.m_prime != self.d
            || self.a_prime_vec.iter().zip(&self.q_prime).any(|(a, q)| a * &self.m_prime != *q)
        {
            return fail("d = m' a'");
        }
        let q_sum: BigInt = self.q.iter().sum();
        if self.is_cy != (q_sum == self.d) {
            return fail("is_cy flag");
        }
        if self.is_cy && self.q_prime.iter().sum::<BigInt>() != self.d {
            return fail("sum of q' differs from d");
        }
        Ok(())
    }
}

/// Derives `d, B, q, q', m, m', a', a'_vec` from `A`, rejecting non-positive weights.
pub fn analyze(a: &ExponentMatrix) -> Result<ShiodaData> {
    let (d, b) = a.matrix().scaled_inverse()?;
    let q = b.row_sums();
    let q_prime = b.col_sums();
    for (kind, v) in [(WeightKind::Q, &q), (WeightKind::QPrime, &q_prime)] {
        if let Some((i, x)) = v.iter().enumerate().find(|(_, x)| !x.is_positive()) {
            return Err(Error::NonPositiveWeight { kind, index: i + 1, value: x.to_string() });
        }
    }
    let m = gcd_all(&q);
    let q_reduced = q.iter().map(|x| x / &m).collect();
    let m_prime = gcd_all(q_prime.iter().chain(std::iter::once(&d)));
    let a_prime = &d / &m_prime;
    let a_prime_vec = q_prime.iter().map(|x| x / &m_prime).collect();
    let is_cy = q.iter().sum::<BigInt>() == d;
    let data = ShiodaData {
        matrix: a.clone(),
        d,
        b,
        q,
        m,
        q_reduced,
        q_prime,
        m_prime,
        a_prime,
        a_prime_vec,
        is_cy,
    };
    data.check_consistency()?;
    Ok(data)
}

/// Calabi-Yau degree condition `sum q_i = d`, cross-checked against `e^T A^{-1} e = 1`.
pub fn check_cy(a: &ExponentMatrix) -> Result<bool> {
    let (d, b) = a.matrix().scaled_inverse()?;
    let by_weights = b.row_sums().iter().sum::<BigInt>() == d;
    let inv = a.matrix().rational_inverse()?;
    let total: BigRational = inv.iter().flatten().sum();
    let by_inverse = total.is_one();
    if by_weights != by_inverse {
        return Err(Error::Internal("CY condition disagrees between weight sum and e^T A^-1 e".into()));
    }
    Ok(by_weights)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coefficient: BigRational,
    pub exponents: Vec<BigInt>,
}

/// A polynomial given as a list of monomial terms in `x_1..x_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialPolynomial {
    pub variables: usize,
    pub terms: Vec<Term>,
}

impl MonomialPolynomial {
    pub fn weighted_degrees(&self, weights: &[BigInt]) -> Vec<BigInt> {
        self.terms
            .iter()
            .map(|t| t.exponents.iter().zip(weights).map(|(e, w)| e * w).sum())
            .collect()
    }

    pub fn exponent_vectors(&self) -> Vec<Vec<BigInt>> {
        self.terms.iter().map(|t| t.exponents.clone()).collect()
    }

    /// Terms sorted lexicographically by exponent vector, for stable comparisons.
    pub fn sorted_terms(&self) -> Vec<Term> {
        let mut t = self.terms.clone();
        t.sort_by(|a, b| a.exponents.cmp(&b.exponents));
        t
    }
}

impl fmt::Display for MonomialPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            let c = &t.coefficient;
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let mag = c.abs();
            let mono = monomial_text(&t.exponents, "x");
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

/// `x1^5*x3` style rendering; empty string for the constant monomial.
pub fn monomial_text(exponents: &[BigInt], var: &str) -> String {
    exponents
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_zero())
        .map(|(i, e)| if e.is_one() { format!("{var}{}", i + 1) } else { format!("{var}{}^{e}", i + 1) })
        .collect::<Vec<_>>()
        .join("*")
}

/// `F_A`: one monomial per row of `A`, coefficient 1.
pub fn build_f(a: &ExponentMatrix) -> MonomialPolynomial {
    let m = a.matrix();
    MonomialPolynomial {
        variables: a.n(),
        terms: (0..m.rows())
            .map(|i| Term { coefficient: BigRational::one(), exponents: m.row(i).to_vec() })
            .collect(),
    }
}

/// `F_{A,t} = F_A - t x_1 x_2 ... x_n`; equal to `F_A` when `t = 0`.
pub fn build_f_t(a: &ExponentMatrix, t: &BigRational) -> MonomialPolynomial {
    let mut f = build_f(a);
    if !t.is_zero() {
        f.terms.push(Term { coefficient: -t.clone(), exponents: vec![BigInt::one(); a.n()] });
    }
    f
}

/// Inverse of [`build_f`]: `n` exponent vectors of length `n` become the rows of `A`.
pub fn matrix_from_polynomial(terms: &[Vec<BigInt>]) -> Result<ExponentMatrix> {
    let n = terms.len();
    if n == 0 || terms.iter().any(|t| t.len() != n) {
        let width = terms.first().map_or(0, Vec::len);
        return Err(Error::WrongCount { expected: width, got: n });
    }
    ExponentMatrix::from_rows(terms.iter().cloned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::to_bigints;

    fn example_b() -> ExponentMatrix {
        ExponentMatrix::from_rows([
            [15, 0, 0, 0, 1],
            [0, 5, 0, 0, 0],
            [0, 0, 5, 0, 0],
            [0, 0, 1, 5, 0],
            [0, 1, 0, 0, 2],
        ])
        .unwrap()
    }

    #[test]
    fn example_b_invariants() {
        let data = analyze(&example_b()).unwrap();
        assert_eq!(data.d, BigInt::from(150));
        assert_eq!(data.q, to_bigints(&[6, 30, 30, 24, 60]));
        assert_eq!(data.q_reduced, to_bigints(&[1, 5, 5, 4, 10]));
        assert_eq!(data.m, BigInt::from(6));
        assert_eq!(data.q_prime, to_bigints(&[10, 16, 24, 30, 70]));
        assert_eq!(data.m_prime, BigInt::from(2));
        assert_eq!(data.a_prime, BigInt::from(75));
        assert_eq!(data.a_prime_vec, to_bigints(&[5, 8, 12, 15, 35]));
        assert!(data.is_cy);
        let printed_b = IntMatrix::from_rows([
            [10, 1, 0, 0, -5],
            [0, 30, 0, 0, 0],
            [0, 0, 30, 0, 0],
            [0, 0, -6, 30, 0],
            [0, -15, 0, 0, 75],
        ])
        .unwrap();
        assert_eq!(data.b, printed_b);
    }

    #[test]
    fn quintic_is_trivial() {
        let a = ExponentMatrix::new(IntMatrix::diagonal(&[5, 5, 5, 5, 5])).unwrap();
        let data = analyze(&a).unwrap();
        assert_eq!(data.d, BigInt::from(5));
        assert_eq!(data.q, to_bigints(&[1; 5]));
        assert_eq!(data.q_prime, to_bigints(&[1; 5]));
        assert!(data.m_prime.is_one());
        assert_eq!(data.a_prime, BigInt::from(5));
    }

    #[test]
    fn rejects_invalid_matrices() {
        assert_eq!(
            ExponentMatrix::from_rows([[1, -1], [0, 1]]).unwrap_err(),
            Error::NegativeEntry { row: 1, col: 2 }
        );
        assert_eq!(ExponentMatrix::from_rows([[1, 2], [2, 4]]).unwrap_err(), Error::Singular);
        assert!(matches!(
            ExponentMatrix::from_rows([[1, 2, 3], [4, 5, 6]]),
            Err(Error::NonSquare { .. })
        ));
    }

    #[test]
    fn negative_weight_names_the_coordinate() {
        // B = A^{-1} = [[1, -3], [0, 1]], row sums (-2, 1)
        let a = ExponentMatrix::from_rows([[1, 3], [0, 1]]).unwrap();
        match analyze(&a) {
            Err(Error::NonPositiveWeight { kind: WeightKind::Q, index: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        // B = [[1, 0], [-2, 3]]: q = (1, 1) but q' = (-1, 3)
        let b = ExponentMatrix::from_rows([[3, 0], [2, 1]]).unwrap();
        match analyze(&b) {
            Err(Error::NonPositiveWeight { kind: WeightKind::QPrime, index: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_is_not_cy() {
        let a = ExponentMatrix::new(IntMatrix::identity(2)).unwrap();
        assert!(!check_cy(&a).unwrap());
        assert!(matches!(analyze(&a).unwrap().require_cy(), Err(Error::NotCalabiYau { .. })));
    }

    #[test]
    fn polynomial_rendering_and_round_trip() {
        let a = ExponentMatrix::new(IntMatrix::diagonal(&[5, 10, 10, 10, 2])).unwrap();
        assert_eq!(build_f(&a).to_string(), "x1^5 + x2^10 + x3^10 + x4^10 + x5^2");
        let ft = build_f_t(&a, &BigRational::from_integer(3.into()));
        assert_eq!(ft.to_string(), "x1^5 + x2^10 + x3^10 + x4^10 + x5^2 - 3*x1*x2*x3*x4*x5");
        assert_eq!(build_f_t(&a, &BigRational::zero()), build_f(&a));
        let back = matrix_from_polynomial(&build_f(&a).exponent_vectors()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn wrong_term_count() {
        let terms = vec![to_bigints(&[1, 0, 0]), to_bigints(&[0, 1, 0])];
        assert!(matches!(matrix_from_polynomial(&terms), Err(Error::WrongCount { .. })));
    }
}
