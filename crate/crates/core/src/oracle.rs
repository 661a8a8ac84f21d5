//! Brute-force enumeration of `Gamma(q')`, `Gamma_A` and `H_A` for small `d^n`.
//!
//! Independent of the lattice code: elements are listed explicitly in
//! `(Z/d)^n` and structures are recovered from `p^j`-torsion counts.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::shioda::ShiodaData;

/// Largest `d^n` the enumeration will attempt.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedGroup {
    pub order: u64,
    pub invariant_factors: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedGroups {
    pub gamma_q_prime: EnumeratedGroup,
    pub gamma_a: EnumeratedGroup,
    pub h_a: EnumeratedGroup,
}

struct Ctx {
    n: usize,
    d: u64,
    q_prime: Vec<u64>,
    b: Vec<Vec<u64>>,
    scaling: HashSet<Vec<u64>>,
}

impl Ctx {
    fn new(data: &ShiodaData) -> Result<Self> {
        let d = small(&data.d)?;
        let n = data.n();
        let red = |x: &BigInt| -> Result<u64> { small(&x.mod_floor(&data.d)) };
        let q_prime = data.q_prime.iter().map(red).collect::<Result<Vec<_>>>()?;
        let q = data.q_reduced.iter().map(red).collect::<Result<Vec<_>>>()?;
        let b = data.b.to_rows().iter().map(|r| r.iter().map(red).collect()).collect::<Result<Vec<_>>>()?;
        let scaling = (0..d).map(|c| q.iter().map(|x| x * c % d).collect()).collect();
        Ok(Self { n, d, q_prime, b, scaling })
    }

    fn image(&self, k: &[u64]) -> Vec<u64> {
        self.b.iter().map(|row| row.iter().zip(k).map(|(x, y)| x * y % self.d).sum::<u64>() % self.d).collect()
    }

    fn scale(&self, v: &[u64], t: u64) -> Vec<u64> {
        let t = t % self.d;
        v.iter().map(|x| x * t % self.d).collect()
    }

    /// Smallest representative of `w + Z q_red` under lexicographic order.
    fn canonical_image(&self, w: &[u64]) -> Vec<u64> {
        self.scaling
            .iter()
            .map(|s| w.iter().zip(s).map(|(x, y)| (x + self.d - y) % self.d).collect::<Vec<_>>())
            .min()
            .expect("scaling set is nonempty")
    }

    fn is_diagonal_scalar(v: &[u64]) -> bool {
        v.iter().all(|x| *x == v[0])
    }
}

fn small(x: &BigInt) -> Result<u64> {
    x.to_u64().ok_or_else(|| Error::Internal(format!("{x} does not fit in u64")))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Invariant factors of a finite abelian group of the given order, from the
/// number of elements killed by each `t`.
fn structure_from_torsion(order: u64, killed: impl Fn(u64) -> u64) -> Vec<u64> {
    let mut exponents: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for p in prime_factors(order) {
        // ranks[j] = log_p |G[p^j]|
        let mut ranks = vec![0u32];
        let mut pj = 1u64;
        loop {
            pj *= p;
            let c = killed(pj);
            let mut r = 0;
            let mut x = c;
            while x > 1 {
                x /= p;
                r += 1;
            }
            if r == *ranks.last().unwrap() {
                break;
            }
            ranks.push(r);
        }
        // r_j - r_{j-1} = number of cyclic factors of exponent >= j
        let ge: Vec<u32> = ranks.windows(2).map(|w| w[1] - w[0]).collect();
        let mut es = Vec::new();
        for j in 0..ge.len() {
            let next = ge.get(j + 1).copied().unwrap_or(0);
            for _ in 0..(ge[j] - next) {
                es.push(j as u32 + 1);
            }
        }
        es.sort_unstable_by(|a, b| b.cmp(a));
        exponents.insert(p, es);
    }
    let width = exponents.values().map(Vec::len).max().unwrap_or(0);
    let mut factors: Vec<u64> = (0..width)
        .map(|i| exponents.iter().map(|(p, es)| es.get(i).map_or(1, |e| p.pow(*e))).product())
        .collect();
    factors.sort_unstable();
    factors
}

/// Enumerates all three groups, or `None` when `d^n` exceeds the limit.
pub fn enumerate_groups(data: &ShiodaData) -> Result<Option<EnumeratedGroups>> {
    data.require_cy()?;
    let n = data.n() as u32;
    let size = data.d.pow(n);
    if size > BigInt::from(ENUMERATION_LIMIT) {
        return Ok(None);
    }
    let ctx = Ctx::new(data)?;
    let d = ctx.d;

    // representatives of Gamma(q') with k_n = 0
    let mut gamma = Vec::new();
    let free = ctx.n - 1;
    let mut k = vec![0u64; ctx.n];
    for code in 0..d.pow(free as u32) {
        let mut c = code;
        for slot in k.iter_mut().take(free) {
            *slot = c % d;
            c /= d;
        }
        let dot: u64 = k.iter().zip(&ctx.q_prime).map(|(x, y)| x * y % d).sum::<u64>() % d;
        if dot == 0 {
            gamma.push(k.clone());
        }
    }
    let kernel: Vec<&Vec<u64>> = gamma.iter().filter(|k| ctx.scaling.contains(&ctx.image(k))).collect();
    let images: HashSet<Vec<u64>> = gamma.iter().map(|k| ctx.canonical_image(&ctx.image(k))).collect();

    let order = gamma.len() as u64;
    let gamma_q_prime = EnumeratedGroup {
        order,
        invariant_factors: structure_from_torsion(order, |t| {
            gamma.iter().filter(|k| Ctx::is_diagonal_scalar(&ctx.scale(k, t))).count() as u64
        }),
    };
    let order = kernel.len() as u64;
    let gamma_a = EnumeratedGroup {
        order,
        invariant_factors: structure_from_torsion(order, |t| {
            kernel.iter().filter(|k| Ctx::is_diagonal_scalar(&ctx.scale(k, t))).count() as u64
        }),
    };
    let order = images.len() as u64;
    let h_a = EnumeratedGroup {
        order,
        invariant_factors: structure_from_torsion(order, |t| {
            images.iter().filter(|w| ctx.scaling.contains(&ctx.scale(w, t))).count() as u64
        }),
    };
    Ok(Some(EnumeratedGroups { gamma_q_prime, gamma_a, h_a }))
}
