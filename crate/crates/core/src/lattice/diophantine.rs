use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::matrix::IntMatrix;
use super::smith::smith_normal_form;
use crate::error::{Error, Result};

/// All integer solutions of `M x = b`: `particular + span_Z(kernel_basis)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiophantineSolution {
    pub particular: Vec<BigInt>,
    pub kernel_basis: Vec<Vec<BigInt>>,
}

/// Solves `M x = b` over the integers, `None` when no integer solution exists.
pub fn solve_diophantine(m: &IntMatrix, b: &[BigInt]) -> Result<Option<DiophantineSolution>> {
    if b.len() != m.rows() {
        return Err(Error::LengthMismatch { expected: m.rows(), got: b.len() });
    }
    let snf = smith_normal_form(m);
    let c = snf.u.mul_vec(b)?;
    let diag = snf.diagonal();
    let rank = snf.rank();
    let mut y = vec![BigInt::zero(); m.cols()];
    for i in 0..rank {
        let (quot, rem) = c[i].div_rem(&diag[i]);
        if !rem.is_zero() {
            return Ok(None);
        }
        y[i] = quot;
    }
    if c[rank..].iter().any(|x| !x.is_zero()) {
        return Ok(None);
    }
    let particular = snf.v.mul_vec(&y)?;
    let kernel_basis = (rank..m.cols()).map(|j| snf.v.col(j)).collect();
    Ok(Some(DiophantineSolution { particular, kernel_basis }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix::to_bigints;

    #[test]
    fn scalar_cases() {
        let m = IntMatrix::from_rows([[2]]).unwrap();
        let sol = solve_diophantine(&m, &to_bigints(&[4])).unwrap().unwrap();
        assert_eq!(sol.particular, to_bigints(&[2]));
        assert!(sol.kernel_basis.is_empty());
        assert_eq!(solve_diophantine(&m, &to_bigints(&[3])).unwrap(), None);
    }

    #[test]
    fn inconsistent_overdetermined() {
        let m = IntMatrix::from_rows([[1], [1]]).unwrap();
        assert_eq!(solve_diophantine(&m, &to_bigints(&[1, 2])).unwrap(), None);
        let sol = solve_diophantine(&m, &to_bigints(&[3, 3])).unwrap().unwrap();
        assert_eq!(sol.particular, to_bigints(&[3]));
    }

    #[test]
    fn length_mismatch() {
        let m = IntMatrix::from_rows([[1, 2]]).unwrap();
        assert!(matches!(
            solve_diophantine(&m, &to_bigints(&[1, 2])),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
