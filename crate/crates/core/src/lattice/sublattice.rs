use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use super::smith::{hermite_rows, smith_normal_form};
use crate::error::{Error, Result};

/// A sublattice of `Z^n`, kept as a Hermite-reduced row basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    basis: Vec<Vec<BigInt>>,
}

/// A finite quotient `L / N` written as `Z/s_1 x ... x Z/s_r` with `s_i | s_{i+1}`, `s_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientStructure {
    pub invariant_factors: Vec<BigInt>,
    /// One lift in `Z^n` per invariant factor; the images generate the quotient.
    pub generators: Vec<Vec<BigInt>>,
}

impl QuotientStructure {
    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }
}

impl Lattice {
    pub fn from_generators(dim: usize, generators: &[Vec<BigInt>]) -> Self {
        Self { dim, basis: hermite_rows(generators, dim) }
    }

    /// `d Z^n`
    pub fn scaled(dim: usize, d: &BigInt) -> Self {
        let gens: Vec<Vec<BigInt>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { d.clone() } else { BigInt::zero() }).collect())
            .collect();
        Self::from_generators(dim, &gens)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim, "lattices live in different ambient spaces");
        let gens: Vec<Vec<BigInt>> = self.basis.iter().chain(&other.basis).cloned().collect();
        Self::from_generators(self.dim, &gens)
    }

    pub fn with_vectors(&self, extra: &[Vec<BigInt>]) -> Lattice {
        let gens: Vec<Vec<BigInt>> = self.basis.iter().chain(extra).cloned().collect();
        Self::from_generators(self.dim, &gens)
    }

    /// Integer coordinates of `v` in the stored basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        if v.len() != self.dim {
            return None;
        }
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let p = row.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
            let (q, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            for (x, b) in rest.iter_mut().zip(row) {
                *x -= &q * b;
            }
            coords.push(q);
        }
        rest.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// `[Z^n : L]` for a full-rank lattice.
    pub fn index(&self) -> Option<BigInt> {
        if self.rank() != self.dim {
            return None;
        }
        // Echelon basis of full rank is upper triangular.
        Some((0..self.dim).map(|i| self.basis[i][i].abs()).product())
    }

    /// Structure of `self / sub`; `sub` must be a sublattice of the same rank.
    pub fn quotient(&self, sub: &Lattice) -> Result<QuotientStructure> {
        if sub.rank() != self.rank() {
            return Err(Error::Internal(format!(
                "quotient of a rank-{} lattice by a rank-{} sublattice is infinite",
                self.rank(),
                sub.rank()
            )));
        }
        if self.rank() == 0 {
            return Ok(QuotientStructure { invariant_factors: vec![], generators: vec![] });
        }
        let rel_rows = sub
            .basis
            .iter()
            .map(|b| {
                self.coordinates(b)
                    .ok_or_else(|| Error::Internal("quotient by a non-sublattice".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let rel = IntMatrix::from_rows(rel_rows)?;
        let snf = smith_normal_form(&rel);
        let mut invariant_factors = Vec::new();
        let mut generators = Vec::new();
        for (i, s) in snf.diagonal().into_iter().enumerate() {
            if s.is_one() {
                continue;
            }
            let coords = snf.v_inv.row(i);
            let mut lift = vec![BigInt::zero(); self.dim];
            for (c, b) in coords.iter().zip(&self.basis) {
                for (x, y) in lift.iter_mut().zip(b) {
                    *x += c * y;
                }
            }
            invariant_factors.push(s);
            generators.push(lift);
        }
        Ok(QuotientStructure { invariant_factors, generators })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix::to_bigints;

    #[test]
    fn index_and_membership() {
        let l = Lattice::from_generators(2, &[to_bigints(&[1, 1]), to_bigints(&[0, 2])]);
        assert_eq!(l.index(), Some(BigInt::from(2)));
        assert!(l.contains(&to_bigints(&[3, 5])));
        assert!(!l.contains(&to_bigints(&[1, 2])));
    }

    #[test]
    fn quotient_of_z2_by_2z_plus_diag() {
        let full = Lattice::scaled(2, &BigInt::one());
        let sub = Lattice::scaled(2, &BigInt::from(6)).with_vectors(&[to_bigints(&[1, 1])]);
        let q = full.quotient(&sub).unwrap();
        assert_eq!(q.invariant_factors, to_bigints(&[6]));
        assert_eq!(q.order(), BigInt::from(6));
        // the generator must have order exactly 6 modulo sub
        let g = &q.generators[0];
        for k in 1..6 {
            let kg: Vec<BigInt> = g.iter().map(|x| x * k).collect();
            assert!(!sub.contains(&kg));
        }
        let six: Vec<BigInt> = g.iter().map(|x| x * 6).collect();
        assert!(sub.contains(&six));
    }

    #[test]
    fn rank_mismatch_is_reported() {
        let full = Lattice::scaled(2, &BigInt::one());
        let line = Lattice::from_generators(2, &[to_bigints(&[1, 0])]);
        assert!(full.quotient(&line).is_err());
    }
}
