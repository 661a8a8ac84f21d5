//! Monomial maps between (weighted) projective spaces as integer exponent tables.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::IntMatrix;
use crate::shioda::{monomial_text, ExponentMatrix, ShiodaData};
use crate::wps::WeightSystem;

/// `x_j = prod_k y_k^{E_{jk}}`. Negative exponents are allowed: the map is rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    pub source_weights: WeightSystem,
    pub target_weights: WeightSystem,
    pub exponents: IntMatrix,
}

impl MonomialMap {
    pub fn new(source_weights: WeightSystem, target_weights: WeightSystem, exponents: IntMatrix) -> Result<Self> {
        if exponents.cols() != source_weights.len() || exponents.rows() != target_weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} exponent table between spaces with {} and {} coordinates",
                exponents.rows(),
                exponents.cols(),
                source_weights.len(),
                target_weights.len()
            )));
        }
        Ok(Self { source_weights, target_weights, exponents })
    }

    pub fn source_dim(&self) -> usize {
        self.exponents.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.exponents.rows()
    }

    /// Weighted degree of each target coordinate in the source variables.
    pub fn degrees(&self) -> Vec<BigInt> {
        self.exponents.mul_vec(self.source_weights.weights()).expect("dimensions checked on construction")
    }

    /// Degrees are `lambda * target_weights` for a single positive rational `lambda`,
    /// so the map descends to the weighted projective spaces.
    pub fn is_weighted_homogeneous(&self) -> bool {
        let deg = self.degrees();
        let w = self.target_weights.weights();
        if !deg[0].is_positive() {
            return false;
        }
        deg.iter().zip(w).all(|(a, b)| a * &w[0] == b * &deg[0])
    }

    /// `(y1^2 : y2 : ...)`-style rendering with the given source variable name.
    pub fn render(&self, var: &str) -> String {
        let coords: Vec<String> = (0..self.target_dim()).map(|j| monomial_text(self.exponents.row(j), var)).collect();
        format!("({})", coords.join(" : "))
    }
}

impl fmt::Display for MonomialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("y"))
    }
}

/// The Shioda map `phi_A : P^{n-1} -> WP(q)`, `x_j = prod_k y_k^{b_jk}`.
pub fn phi_map(data: &ShiodaData) -> Result<MonomialMap> {
    let target = WeightSystem::new(data.q.clone())?;
    MonomialMap::new(WeightSystem::ones(data.n()), target, data.b.clone())
}

/// `q_A : WP(q) -> P^n`, `u_0 = x_1...x_n`, `u_k = x^{A_k}`.
pub fn q_map(a: &ExponentMatrix, q: &[BigInt]) -> Result<MonomialMap> {
    let n = a.n();
    let mut rows = vec![vec![BigInt::one(); n]];
    rows.extend(a.matrix().to_rows());
    let exponents = IntMatrix::from_rows(rows)?;
    MonomialMap::new(WeightSystem::new(q.to_vec())?, WeightSystem::ones(n + 1), exponents)
}

/// `outer . inner`: exponent table `outer.exponents * inner.exponents`.
pub fn compose(outer: &MonomialMap, inner: &MonomialMap) -> Result<MonomialMap> {
    if outer.source_dim() != inner.target_dim() {
        return Err(Error::DimensionMismatch(format!(
            "outer map expects {} coordinates, inner map produces {}",
            outer.source_dim(),
            inner.target_dim()
        )));
    }
    let exponents = outer.exponents.mul(&inner.exponents)?;
    MonomialMap::new(inner.source_weights.clone(), outer.target_weights.clone(), exponents)
}

/// `q_A . phi_A`, which should be `(prod y^{q'} : y_1^d : ... : y_n^d)`.
pub fn fermat_quotient_map(data: &ShiodaData) -> Result<MonomialMap> {
    compose(&q_map(&data.matrix, &data.q)?, &phi_map(data)?)
}

/// Checks that the composite has row 0 equal to `q'` and the remaining rows `d * I`.
pub fn composition_law_holds(data: &ShiodaData) -> Result<bool> {
    let m = fermat_quotient_map(data)?;
    let n = data.n();
    if m.exponents.row(0) != data.q_prime.as_slice() {
        return Ok(false);
    }
    Ok((0..n).all(|j| {
        m.exponents.row(j + 1).iter().enumerate().all(|(k, x)| if j == k { x == &data.d } else { x.is_zero() })
    }))
}

/// `x_j^d = prod_k u_k^{B_jk}` after substituting `u_k = x^{A_k}`, for every `j`.
pub fn root_identity_check(data: &ShiodaData) -> bool {
    let n = data.n();
    let a = data.matrix.matrix();
    (0..n).all(|j| {
        (0..n).all(|i| {
            let exponent: BigInt = (0..n).map(|k| &data.b[(j, k)] * &a[(k, i)]).sum();
            if i == j {
                exponent == data.d
            } else {
                exponent.is_zero()
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::to_bigints;
    use crate::shioda::analyze;

    fn data(m: IntMatrix) -> ShiodaData {
        analyze(&ExponentMatrix::new(m).unwrap()).unwrap()
    }

    fn example_d() -> ShiodaData {
        data(IntMatrix::from_rows([
            [5, 0, 0, 0, 0],
            [0, 9, 1, 0, 0],
            [0, 0, 9, 1, 0],
            [0, 0, 0, 10, 0],
            [0, 0, 0, 0, 2],
        ])
        .unwrap())
    }

    #[test]
    fn phi_of_example_a_is_diagonal() {
        let a = data(IntMatrix::diagonal(&[5, 10, 10, 10, 2]));
        let phi = phi_map(&a).unwrap();
        assert_eq!(phi.exponents, IntMatrix::diagonal(&[2, 1, 1, 1, 5]));
        assert_eq!(phi.degrees(), a.q);
        assert!(phi.is_weighted_homogeneous());
        assert_eq!(phi.to_string(), "(y1^2 : y2 : y3 : y4 : y5^5)");
    }

    #[test]
    fn q_map_of_example_d() {
        let d = example_d();
        let q = q_map(&d.matrix, &d.q).unwrap();
        assert_eq!(q.render("x"), "(x1*x2*x3*x4*x5 : x1^5 : x2^9*x3 : x3^9*x4 : x4^10 : x5^2)");
        assert_eq!(q.degrees(), vec![d.d.clone(); 6]);
        assert!(q.is_weighted_homogeneous());
    }

    #[test]
    fn composite_of_example_d() {
        let d = example_d();
        let m = fermat_quotient_map(&d).unwrap();
        assert_eq!(m.exponents.row(0), to_bigints(&[162, 90, 80, 73, 405]).as_slice());
        assert!(composition_law_holds(&d).unwrap());
        assert!(root_identity_check(&d));
    }

    #[test]
    fn compose_with_identity() {
        let d = example_d();
        let phi = phi_map(&d).unwrap();
        let id = MonomialMap::new(WeightSystem::ones(5), WeightSystem::ones(5), IntMatrix::identity(5)).unwrap();
        assert_eq!(compose(&phi, &id).unwrap(), phi);
        assert!(matches!(compose(&phi, &phi_map(&data(IntMatrix::diagonal(&[2, 2]))).unwrap()), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn quintic_identities() {
        let d = data(IntMatrix::diagonal(&[5; 5]));
        assert_eq!(phi_map(&d).unwrap().exponents, IntMatrix::identity(5));
        assert_eq!(fermat_quotient_map(&d).unwrap().to_string(), "(y1*y2*y3*y4*y5 : y1^5 : y2^5 : y3^5 : y4^5 : y5^5)");
        assert!(root_identity_check(&data(IntMatrix::identity(3))));
    }
}
