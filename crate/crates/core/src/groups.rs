//! Diagonal root-of-unity groups acting on the Fermat variety and on `X_A`.
//!
//! With `L = {k : q'.k = 0 mod d}`, `N = dZ^n + Ze` and `K = AZ^n + Ze`:
//!
//! * `Gamma(q') = L / N`
//! * `Gamma_A   = K / N` (kernel of `g_k -> g_{Bk}`; `Bk = 0 mod d` iff `k` lies in `AZ^n`)
//! * `H_A       = L / K`, realised on `X_A` by the image vectors `Bk mod (dZ^n + Z q_red)`,
//!   since weighted rescaling by `lambda` acts as `lambda^{q_red}`
//!
//! All three are computed as lattice quotients through Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{format_vec, solve_diophantine, IntMatrix, Lattice, QuotientStructure};
use crate::shioda::ShiodaData;

/// `k` in `(Z/d)^n`, standing for `g_k : y_i -> zeta^{k_i} y_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicVector {
    pub modulus: BigInt,
    pub k: Vec<BigInt>,
}

impl CyclotomicVector {
    pub fn new(modulus: BigInt, k: &[BigInt]) -> Self {
        let k = k.iter().map(|x| x.mod_floor(&modulus)).collect();
        Self { modulus, k }
    }

    pub fn from_i64(modulus: i64, k: &[i64]) -> Self {
        let k: Vec<BigInt> = k.iter().map(|&x| BigInt::from(x)).collect();
        Self::new(BigInt::from(modulus), &k)
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }
}

impl fmt::Display for CyclotomicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", format_vec(&self.k), self.modulus)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroupStructure {
    /// `d_1 | d_2 | ... | d_r`, each at least 2; empty for the trivial group.
    pub invariant_factors: Vec<BigInt>,
    pub order: BigInt,
    pub generator_lifts: Vec<CyclotomicVector>,
}

impl AbelianGroupStructure {
    fn from_quotient(q: QuotientStructure, modulus: &BigInt) -> Self {
        let order = q.order();
        let generator_lifts = q.generators.iter().map(|g| CyclotomicVector::new(modulus.clone(), g)).collect();
        Self { invariant_factors: q.invariant_factors, order, generator_lifts }
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// `Z/2 x (Z/150)^3` style rendering.
    pub fn describe(&self) -> String {
        if self.is_trivial() {
            return "trivial".into();
        }
        let mut parts: Vec<(BigInt, usize)> = Vec::new();
        for f in &self.invariant_factors {
            match parts.last_mut() {
                Some((g, c)) if g == f => *c += 1,
                _ => parts.push((f.clone(), 1)),
            }
        }
        parts
            .iter()
            .map(|(f, c)| if *c == 1 { format!("Z/{f}") } else { format!("(Z/{f})^{c}") })
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

/// `Gamma_d = mu_d^n / <(1,...,1)>`, isomorphic to `mu_d^{n-1}`.
pub fn gamma_d(n: usize, d: &BigInt) -> AbelianGroupStructure {
    assert!(n >= 1, "need at least one coordinate");
    if d.is_one() {
        return AbelianGroupStructure { invariant_factors: vec![], order: BigInt::one(), generator_lifts: vec![] };
    }
    let generator_lifts = (0..n - 1)
        .map(|i| {
            let k: Vec<BigInt> = (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect();
            CyclotomicVector::new(d.clone(), &k)
        })
        .collect();
    AbelianGroupStructure {
        invariant_factors: vec![d.clone(); n - 1],
        order: num_traits::pow(d.clone(), n - 1),
        generator_lifts,
    }
}

/// The lattices `L`, `N`, `K` behind the three groups, plus their images in
/// the `x`-coordinates of `X_A`.
#[derive(Clone, Debug)]
pub struct GroupLattices {
    pub d: BigInt,
    pub b: IntMatrix,
    /// `{k : q'.k = 0 mod d}`
    pub invariant: Lattice,
    /// `dZ^n + Ze`
    pub scalars: Lattice,
    /// `AZ^n + Ze`
    pub kernel: Lattice,
    /// `B L + dZ^n + Z q_red`, the lattice of image vectors acting on `X_A`.
    pub image: Lattice,
    /// `dZ^n + Z q_red`, image vectors acting trivially on weighted projective space.
    pub weighted_scalars: Lattice,
}

impl GroupLattices {
    pub fn new(data: &ShiodaData) -> Result<Self> {
        data.require_cy()?;
        let n = data.n();
        let d = data.d.clone();
        let e = vec![BigInt::one(); n];

        // k with q'.k + d j = 0, projected to k
        let mut row = data.q_prime.clone();
        row.push(d.clone());
        let constraint = IntMatrix::from_rows([row])?;
        let sol = solve_diophantine(&constraint, &[BigInt::zero()])?
            .ok_or_else(|| Error::Internal("homogeneous system without solution".into()))?;
        let mut gens: Vec<Vec<BigInt>> = sol.kernel_basis.into_iter().map(|mut v| {
            v.truncate(n);
            v
        }).collect();
        let dz = Lattice::scaled(n, &d);
        gens.extend(dz.basis().iter().cloned());
        let invariant = Lattice::from_generators(n, &gens);

        let scalars = dz.with_vectors(std::slice::from_ref(&e));
        let a = data.matrix.matrix();
        let mut kernel_gens: Vec<Vec<BigInt>> = (0..n).map(|j| a.col(j)).collect();
        kernel_gens.push(e.clone());
        let kernel = Lattice::from_generators(n, &kernel_gens).sum(&dz);

        if !invariant.contains(&e) {
            return Err(Error::Internal("e does not satisfy q'.e = 0 mod d".into()));
        }
        if !invariant.contains_lattice(&kernel) || !kernel.contains_lattice(&scalars) {
            return Err(Error::Internal("expected dZ^n + Ze in AZ^n + Ze in L".into()));
        }

        let weighted_scalars = dz.with_vectors(std::slice::from_ref(&data.q_reduced));
        let mut image_gens: Vec<Vec<BigInt>> =
            invariant.basis().iter().map(|k| data.b.mul_vec(k)).collect::<Result<_>>()?;
        image_gens.extend(weighted_scalars.basis().iter().cloned());
        let image = Lattice::from_generators(n, &image_gens);

        Ok(Self { d, b: data.b.clone(), invariant, scalars, kernel, image, weighted_scalars })
    }

    pub fn gamma_q_prime(&self) -> Result<AbelianGroupStructure> {
        Ok(AbelianGroupStructure::from_quotient(self.invariant.quotient(&self.scalars)?, &self.d))
    }

    pub fn gamma_a(&self) -> Result<AbelianGroupStructure> {
        Ok(AbelianGroupStructure::from_quotient(self.kernel.quotient(&self.scalars)?, &self.d))
    }

    /// `L / K`; generator lifts are the image vectors `B k mod d`.
    pub fn h_a(&self) -> Result<AbelianGroupStructure> {
        let q = self.invariant.quotient(&self.kernel)?;
        let order = q.order();
        let generator_lifts = q
            .generators
            .iter()
            .map(|k| Ok(CyclotomicVector::new(self.d.clone(), &self.b.mul_vec(k)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(AbelianGroupStructure { invariant_factors: q.invariant_factors, order, generator_lifts })
    }

    pub fn in_gamma_q_prime(&self, k: &[BigInt]) -> bool {
        self.invariant.contains(k)
    }

    pub fn in_gamma_a(&self, k: &[BigInt]) -> bool {
        self.kernel.contains(k)
    }

    /// Image vector `w` in the `x`-coordinates comes from some `g_k`, `k` in `Gamma(q')`.
    pub fn in_h_a(&self, w: &[BigInt]) -> bool {
        self.image.contains(w)
    }

    /// `w = c q_red mod d`: acts trivially on the weighted projective space.
    pub fn acts_trivially(&self, w: &[BigInt]) -> bool {
        self.weighted_scalars.contains(w)
    }

    /// Order of the subgroup of `Gamma_d` generated by `ks`, modulo `dZ^n + Ze`.
    pub fn generated_order_source(&self, ks: &[Vec<BigInt>]) -> Result<BigInt> {
        let sub = self.scalars.with_vectors(ks);
        Ok(sub.quotient(&self.scalars)?.order())
    }

    /// Order of the subgroup generated by image vectors `ws`, modulo `dZ^n + Z q_red`.
    pub fn generated_order_image(&self, ws: &[Vec<BigInt>]) -> Result<BigInt> {
        let sub = self.weighted_scalars.with_vectors(ws);
        Ok(sub.quotient(&self.weighted_scalars)?.order())
    }
}

/// Structures of `Gamma(q')`, `Gamma_A` and `H_A` for a Calabi-Yau matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiodaGroups {
    pub gamma_q_prime: AbelianGroupStructure,
    pub gamma_a: AbelianGroupStructure,
    pub h_a: AbelianGroupStructure,
}

pub fn shioda_groups(data: &ShiodaData) -> Result<ShiodaGroups> {
    let lat = GroupLattices::new(data)?;
    let groups = ShiodaGroups { gamma_q_prime: lat.gamma_q_prime()?, gamma_a: lat.gamma_a()?, h_a: lat.h_a()? };
    if &groups.gamma_a.order * &groups.h_a.order != groups.gamma_q_prime.order {
        return Err(Error::Internal("|Gamma_A| |H_A| != |Gamma(q')|".into()));
    }
    Ok(groups)
}

pub fn gamma_q_prime(data: &ShiodaData) -> Result<AbelianGroupStructure> {
    GroupLattices::new(data)?.gamma_q_prime()
}

pub fn gamma_a(data: &ShiodaData) -> Result<AbelianGroupStructure> {
    GroupLattices::new(data)?.gamma_a()
}

pub fn h_a(data: &ShiodaData) -> Result<AbelianGroupStructure> {
    GroupLattices::new(data)?.h_a()
}

fn check_modulus(w: &CyclotomicVector, data: &ShiodaData) -> Result<()> {
    if w.modulus != data.d {
        return Err(Error::ModulusMismatch { expected: data.d.to_string(), got: w.modulus.to_string() });
    }
    if w.len() != data.n() {
        return Err(Error::LengthMismatch { expected: data.n(), got: w.len() });
    }
    Ok(())
}

/// `A w = c e mod d` for some `c`: every monomial of `F_A` picks up the same
/// root of unity, so the diagonal action preserves `Z(F_A)`.
pub fn is_automorphism_vector(w: &CyclotomicVector, data: &ShiodaData) -> Result<bool> {
    check_modulus(w, data)?;
    let aw = data.matrix.matrix().mul_vec(&w.k)?;
    let first = aw[0].mod_floor(&data.d);
    Ok(aw.iter().all(|x| x.mod_floor(&data.d) == first))
}

/// Character `sum_i (b_i + 1) k_i mod d` by which `g_k` scales the residue form `omega_b`.
pub fn form_character(k: &CyclotomicVector, b: &[BigInt]) -> Result<BigInt> {
    if b.len() != k.len() {
        return Err(Error::LengthMismatch { expected: k.len(), got: b.len() });
    }
    let s: BigInt = k.k.iter().zip(b).map(|(ki, bi)| ki * (bi + 1)).sum();
    Ok(s.mod_floor(&k.modulus))
}

/// `b = q' - e`, the exponent vector of the unique `Gamma(q')`-invariant form.
pub fn invariant_form_exponents(data: &ShiodaData) -> Result<Vec<BigInt>> {
    data.require_cy()?;
    let b: Vec<BigInt> = data.q_prime.iter().map(|x| x - 1).collect();
    if let Some((i, x)) = b.iter().enumerate().find(|(_, x)| x < &&BigInt::zero()) {
        return Err(Error::NegativeExponent { index: i + 1, value: x.to_string() });
    }
    let total: BigInt = b.iter().sum();
    if total != &data.d - data.n() {
        return Err(Error::Internal("sum of invariant form exponents differs from d - n".into()));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::to_bigints;
    use crate::shioda::{analyze, ExponentMatrix};

    fn data(rows: &[&[i64]]) -> ShiodaData {
        analyze(&ExponentMatrix::from_rows(rows.iter().map(|r| r.to_vec())).unwrap()).unwrap()
    }

    fn example_a() -> ShiodaData {
        analyze(&ExponentMatrix::new(IntMatrix::diagonal(&[5, 10, 10, 10, 2])).unwrap()).unwrap()
    }

    #[test]
    fn gamma_d_formula() {
        let g = gamma_d(5, &BigInt::from(10));
        assert_eq!(g.invariant_factors, to_bigints(&[10, 10, 10, 10]));
        assert_eq!(g.order, BigInt::from(10_000));
        assert!(gamma_d(2, &BigInt::one()).is_trivial());
        assert_eq!(gamma_d(3, &BigInt::from(4)).order, BigInt::from(16));
    }

    #[test]
    fn gamma_d_matches_lattice_quotient() {
        for (n, d) in [(2usize, 3i64), (3, 4), (5, 10), (4, 1)] {
            let d = BigInt::from(d);
            let full = Lattice::scaled(n, &BigInt::one());
            let scalars = Lattice::scaled(n, &d).with_vectors(&[vec![BigInt::one(); n]]);
            let q = full.quotient(&scalars).unwrap();
            assert_eq!(q.invariant_factors, gamma_d(n, &d).invariant_factors);
        }
    }

    #[test]
    fn example_a_groups() {
        let g = shioda_groups(&example_a()).unwrap();
        assert_eq!(g.gamma_q_prime.invariant_factors, to_bigints(&[10, 10, 10]));
        assert_eq!(g.gamma_a.invariant_factors, to_bigints(&[10]));
        assert_eq!(g.h_a.invariant_factors, to_bigints(&[10, 10]));
        let lat = GroupLattices::new(&example_a()).unwrap();
        assert!(lat.in_gamma_a(&to_bigints(&[5, 0, 0, 0, 6])));
        assert!(!lat.in_gamma_a(&to_bigints(&[0, 0, 0, 5, 1])));
    }

    #[test]
    fn groups_require_cy() {
        let id = data(&[&[1, 0], &[0, 1]]);
        assert!(matches!(shioda_groups(&id), Err(Error::NotCalabiYau { .. })));
        assert!(matches!(invariant_form_exponents(&id), Err(Error::NotCalabiYau { .. })));
    }

    #[test]
    fn automorphism_vectors() {
        let a = example_a();
        assert!(is_automorphism_vector(&CyclotomicVector::from_i64(10, &[0, 0, 1, 4, 5]), &a).unwrap());
        assert!(!is_automorphism_vector(&CyclotomicVector::from_i64(10, &[1, 0, 0, 0, 0]), &a).unwrap());
        let q = CyclotomicVector::new(a.d.clone(), &a.q);
        assert!(is_automorphism_vector(&q, &a).unwrap());
        assert!(matches!(
            is_automorphism_vector(&CyclotomicVector::from_i64(5, &[0, 0, 0, 0, 0]), &a),
            Err(Error::ModulusMismatch { .. })
        ));
    }

    #[test]
    fn characters() {
        let k = CyclotomicVector::from_i64(10, &[5, 0, 0, 0, 6]);
        assert_eq!(form_character(&k, &to_bigints(&[0; 5])).unwrap(), BigInt::one());
        let zero = CyclotomicVector::from_i64(10, &[0; 5]);
        assert!(form_character(&zero, &to_bigints(&[3, 1, 4, 1, 5])).unwrap().is_zero());
        assert!(matches!(form_character(&k, &to_bigints(&[0; 4])), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn invariant_form() {
        assert_eq!(invariant_form_exponents(&example_a()).unwrap(), to_bigints(&[1, 0, 0, 0, 4]));
        let quintic = data(&[&[5, 0, 0, 0, 0], &[0, 5, 0, 0, 0], &[0, 0, 5, 0, 0], &[0, 0, 0, 5, 0], &[0, 0, 0, 0, 5]]);
        assert_eq!(invariant_form_exponents(&quintic).unwrap(), to_bigints(&[0; 5]));
    }

    #[test]
    fn describe_groups() {
        let g = shioda_groups(&example_a()).unwrap();
        assert_eq!(g.gamma_q_prime.describe(), "(Z/10)^3");
        assert_eq!(gamma_d(2, &BigInt::one()).describe(), "trivial");
    }
}
