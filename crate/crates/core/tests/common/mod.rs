#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shioda::inverse::InverseMap;
use shioda::shioda::{analyze, ExponentMatrix, ShiodaData};

pub const SUITE_SEED: u64 = 0x51_07da;
pub const SUITE_SIZE: usize = 120;
const MAX_TRIES: usize = 400_000;

pub fn matrix(rows: &[Vec<i64>]) -> ExponentMatrix {
    ExponentMatrix::from_rows(rows.iter().cloned()).unwrap()
}

pub fn data(rows: &[Vec<i64>]) -> ShiodaData {
    analyze(&matrix(rows)).unwrap()
}

pub fn small(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().expect("fits in i64")).collect()
}

/// Diagonal entries in 2..=10, each row with a 40% chance of one extra 1 off the
/// diagonal, conjugated by a random permutation.
pub fn random_candidate(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let n = rng.gen_range(2..=5);
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = rng.gen_range(2..=10);
        if rng.gen_bool(0.4) {
            let j = (i + rng.gen_range(1..n)) % n;
            row[j] = 1;
        }
    }
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    (0..n).map(|i| (0..n).map(|j| a[p[i]][p[j]]).collect()).collect()
}

/// Distinct admissible Calabi-Yau matrices (positive `q` and `q'`), deterministic.
pub fn random_cy_suite(count: usize) -> Vec<Vec<Vec<i64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..MAX_TRIES {
        if out.len() == count {
            break;
        }
        let a = random_candidate(&mut rng);
        if seen.contains(&a) || det(&a) == 0 {
            continue;
        }
        let Ok(d) = analyze(&matrix(&a)) else { continue };
        if d.is_cy {
            seen.insert(a.clone());
            out.push(a);
        }
    }
    out
}

/// Laplace expansion along the first row.
pub fn det(a: &[Vec<i64>]) -> i128 {
    let n = a.len();
    if n == 1 {
        return a[0][0] as i128;
    }
    (0..n)
        .filter(|&j| a[0][j] != 0)
        .map(|j| {
            let minor: Vec<Vec<i64>> =
                a[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * a[0][j] as i128 * det(&minor)
        })
        .sum()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `(d, B)` from the adjugate: `A^{-1} = adj / det`, `d` the least positive clearing denominator.
pub fn cofactor_inverse(a: &[Vec<i64>]) -> (i128, Vec<Vec<i128>>) {
    let n = a.len();
    let det_a = det(a);
    assert_ne!(det_a, 0);
    let adj: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if n == 1 {
                        return 1;
                    }
                    // adj[i][j] = (-1)^{i+j} det(A without row j, column i)
                    let minor: Vec<Vec<i64>> = (0..n)
                        .filter(|&r| r != j)
                        .map(|r| (0..n).filter(|&c| c != i).map(|c| a[r][c]).collect())
                        .collect();
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    sign * det(&minor)
                })
                .collect()
        })
        .collect();
    let g = adj.iter().flatten().fold(det_a, |g, &x| gcd(g, x));
    let d = (det_a / g).abs();
    let s = if det_a / g < 0 { -1 } else { 1 };
    let b = adj.iter().map(|r| r.iter().map(|&x| s * x / g).collect()).collect();
    (d, b)
}

pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Integers `c` with `sum c_j w_j = gcd(w)`.
pub fn bezout(w: &[i64]) -> Vec<i64> {
    let mut c = vec![0i64; w.len()];
    c[0] = 1;
    let mut g = w[0];
    for j in 1..w.len() {
        let (h, x, y) = ext_gcd(g, w[j]);
        for v in c.iter_mut().take(j) {
            *v *= x;
        }
        c[j] = y;
        g = h;
    }
    if g < 0 {
        c.iter_mut().for_each(|v| *v = -*v);
    }
    c
}

fn monomial(z: &[Complex64], e: &[i64]) -> Complex64 {
    z.iter().zip(e).fold(Complex64::new(1.0, 0.0), |acc, (x, &k)| acc * x.powi(k as i32))
}

/// A point of the Fermat hypersurface with every coordinate of modulus one: the
/// `d`-th powers cancel in pairs, plus one triple of cube roots of unity when `n` is odd.
pub fn fermat_point(n: usize, d: i64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut powers = vec![Complex64::new(0.0, 0.0); n];
    let mut rest = &order[..];
    if n % 2 == 1 {
        let w = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        for (k, &i) in rest[..3].iter().enumerate() {
            powers[i] = w * Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 3.0);
        }
        rest = &rest[3..];
    }
    for pair in rest.chunks(2) {
        let w = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        powers[pair[0]] = w;
        powers[pair[1]] = -w;
    }
    // a random d-th root of each power
    powers
        .iter()
        .map(|p| {
            let k = rng.gen_range(0..d) as f64;
            Complex64::from_polar(1.0, (p.arg() + std::f64::consts::TAU * k) / d as f64)
        })
        .collect()
}

/// Largest relative error of `inverse(q_A(phi_A(y)))` against `phi_A(y)` after the
/// best weighted rescaling, over `samples` points of the Fermat hypersurface.
pub fn round_trip_error(data: &ShiodaData, inv: &InverseMap, samples: usize, seed: u64) -> f64 {
    let n = data.n();
    let d = data.d.to_i64().unwrap();
    let a: Vec<Vec<i64>> = data.matrix.matrix().to_rows().iter().map(|r| small(r)).collect();
    let b: Vec<Vec<i64>> = data.b.to_rows().iter().map(|r| small(r)).collect();
    let q = small(&data.q_reduced);
    let lam_exp = bezout(&q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let y = fermat_point(n, d, &mut rng);
        let fermat: Complex64 = y.iter().map(|v| v.powi(d as i32)).sum();
        assert!(fermat.norm() < 1e-9, "sample point is off the Fermat hypersurface");
        let x: Vec<Complex64> = b.iter().map(|row| monomial(&y, row)).collect();
        let mut u = vec![x.iter().product::<Complex64>()];
        u.extend(a.iter().map(|row| monomial(&x, row)));
        let back: Vec<Complex64> = inv
            .lines
            .iter()
            .map(|l| {
                let mut e = vec![l.c0.to_i64().unwrap()];
                e.extend(small(&l.c));
                monomial(&u, &e)
            })
            .collect();
        // back_j = lambda^{q_j} x_j; recover lambda from a Bezout combination of the ratios
        let ratio: Vec<Complex64> = back.iter().zip(&x).map(|(p, v)| p / v).collect();
        let lambda = monomial(&ratio, &lam_exp);
        let num: f64 = back.iter().zip(&x).zip(&q).map(|((p, v), &w)| (p - lambda.powi(w as i32) * v).norm_sqr()).sum();
        let den: f64 = back.iter().map(|p| p.norm_sqr()).sum();
        worst = worst.max((num / den).sqrt());
    }
    worst
}
