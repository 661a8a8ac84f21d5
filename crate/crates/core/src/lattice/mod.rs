//! Exact integer linear algebra: determinants, scaled inverses, Smith and
//! Hermite normal forms, Diophantine systems and sublattices of `Z^n`.

mod diophantine;
mod matrix;
mod smith;
mod sublattice;

pub use diophantine::{solve_diophantine, DiophantineSolution};
pub use matrix::{format_vec, gcd_all, lcm_all, to_bigints, IntMatrix};
pub use smith::{hermite_rows, smith_normal_form, SnfDecomposition};
pub use sublattice::{Lattice, QuotientStructure};
