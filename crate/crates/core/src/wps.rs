//! Weighted projective space combinatorics.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{gcd_all, lcm_all};
use crate::shioda::ExponentMatrix;

/// Positive weights `(q_1, ..., q_n)` of a weighted projective space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightSystem(Vec<BigInt>);

impl WeightSystem {
    pub fn new(weights: Vec<BigInt>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !w.is_positive()) {
            return Err(Error::InvalidWeights(format!("weight {} is {w}, must be >= 1", i + 1)));
        }
        Ok(Self(weights))
    }

    pub fn from_u64(weights: &[u64]) -> Result<Self> {
        Self::new(weights.iter().map(|&w| BigInt::from(w)).collect())
    }

    /// All weights equal to one: ordinary projective space.
    pub fn ones(n: usize) -> Self {
        Self(vec![BigInt::one(); n])
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Q = sum q_i`
    pub fn total(&self) -> BigInt {
        self.0.iter().sum()
    }

    /// `d_i = gcd(q_j : j != i)`
    fn complementary_gcds(&self) -> Vec<BigInt> {
        (0..self.len())
            .map(|i| gcd_all(self.0.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, w)| w)))
            .collect()
    }

    /// Every `n - 1` of the weights are coprime as a set.
    pub fn is_well_formed(&self) -> bool {
        self.len() < 2 || self.complementary_gcds().iter().all(One::is_one)
    }
}

/// `(m, q / m)` with `m` the gcd of all weights.
pub fn reduce_gcd(q: &WeightSystem) -> (BigInt, WeightSystem) {
    let m = gcd_all(q.weights());
    let reduced = q.weights().iter().map(|w| w / &m).collect();
    (m, WeightSystem(reduced))
}

/// Applies `q_i -> q_i / a_i`, `a_i = lcm(d_j : j != i)`, `d_j = gcd(q_k : k != j)`,
/// until nothing changes.
pub fn well_form(q: &WeightSystem) -> WeightSystem {
    let mut current = q.clone();
    loop {
        let next = well_form_step(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

/// One application of the isomorphism `WP(q_1..q_n) = WP(q_1/a_1 .. q_n/a_n)`.
pub fn well_form_step(q: &WeightSystem) -> WeightSystem {
    if q.len() < 2 {
        return q.clone();
    }
    let d = q.complementary_gcds();
    let out = (0..q.len())
        .map(|i| {
            let a = lcm_all(d.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x));
            &q.0[i] / a
        })
        .collect();
    WeightSystem(out)
}

/// Coordinate subspace `{x : x_j = 0 for j not in I}` on which every nonzero
/// coordinate has weight divisible by `prime`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularStratum {
    pub prime: u64,
    /// 1-based coordinate indices `i` with `prime | q_i`.
    pub indices: Vec<usize>,
}

impl SingularStratum {
    /// Projective dimension `|I| - 1`.
    pub fn dimension(&self) -> usize {
        self.indices.len() - 1
    }

    /// True when every monomial of `F_A` involves a coordinate outside `I`,
    /// so `F_A` vanishes identically on the stratum.
    pub fn contained_in_hypersurface(&self, a: &ExponentMatrix) -> bool {
        let m = a.matrix();
        (0..m.rows()).all(|i| {
            m.row(i)
                .iter()
                .enumerate()
                .any(|(j, e)| !e.is_zero() && !self.indices.contains(&(j + 1)))
        })
    }
}

fn prime_factors(n: &BigInt) -> Result<Vec<u64>> {
    let mut n = n
        .to_u64()
        .ok_or_else(|| Error::InvalidWeights(format!("weight {n} too large to factor")))?;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    Ok(out)
}

/// One stratum per prime dividing some weight, sorted by prime.
pub fn singular_strata(q: &WeightSystem) -> Result<Vec<SingularStratum>> {
    let mut primes = BTreeSet::new();
    for w in q.weights() {
        primes.extend(prime_factors(w)?);
    }
    Ok(primes
        .into_iter()
        .map(|p| {
            let pb = BigInt::from(p);
            let indices = q
                .weights()
                .iter()
                .enumerate()
                .filter(|(_, w)| w.is_multiple_of(&pb))
                .map(|(i, _)| i + 1)
                .collect();
            SingularStratum { prime: p, indices }
        })
        .collect())
}

/// `q_i | Q` for all `i`: the canonical sheaf `O(-Q)` is a line bundle.
pub fn fano_divisibility(q: &WeightSystem) -> bool {
    let total = q.total();
    q.weights().iter().all(|w| total.is_multiple_of(w))
}
