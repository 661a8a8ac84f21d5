//! Explicit birational inverses `M_A --> X_A` of the quotient map `q_A`.
//!
//! A line `M^{s_j} x_j = u_0^{c_0} prod_k u_k^{c_k}` holds as a monomial identity
//! in the `x` variables iff `c_0 e + A^t c = e_j + s_j mu`, where `mu` is the
//! exponent vector of the slack monomial `M`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::GroupLattices;
use crate::lattice::{lcm_all, smith_normal_form, solve_diophantine, IntMatrix};
use crate::serial::{int, int_vec};
use crate::shioda::{monomial_text, ShiodaData};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InverseLine {
    #[serde(with = "int")]
    pub s: BigInt,
    #[serde(with = "int")]
    pub c0: BigInt,
    #[serde(with = "int_vec")]
    pub c: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InverseMap {
    #[serde(with = "int_vec")]
    pub slack_exponents: Vec<BigInt>,
    pub lines: Vec<InverseLine>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineDiagnostic {
    /// 1-based target coordinate.
    pub index: usize,
    /// `x`-exponents of `u_0^{c_0} prod u^c`.
    #[serde(with = "int_vec")]
    pub lhs: Vec<BigInt>,
    /// `x`-exponents of `M^{s_j} x_j`.
    #[serde(with = "int_vec")]
    pub rhs: Vec<BigInt>,
    /// `rhs - lhs`; unchanged by adding multiples of `(d, -q')` to `(c_0, c)`.
    #[serde(with = "int_vec")]
    pub residual: Vec<BigInt>,
    pub valid: bool,
    /// When the residual is a multiple of `e`, the `u_0` power that repairs the line.
    pub required_c0: Option<crate::serial::Int>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InverseVerification {
    pub valid: bool,
    /// `s` is a multiple of the weights, so the lines define a map into `WP(q)`
    /// without reference to `M`.
    pub weighted: bool,
    pub lines: Vec<LineDiagnostic>,
}

impl InverseMap {
    /// `M = x1^2*x2^3*...` followed by one `M^s*x_j = u0^c0*u1^c1*...` line per coordinate;
    /// negative `u` exponents are rendered as a denominator.
    pub fn to_text(&self) -> String {
        let mut out = vec![format!("M = {}", monomial_text(&self.slack_exponents, "x"))];
        for (j, l) in self.lines.iter().enumerate() {
            let mut exps = vec![l.c0.clone()];
            exps.extend(l.c.iter().cloned());
            let num: Vec<BigInt> = exps.iter().map(|e| e.max(&BigInt::zero()).clone()).collect();
            let den: Vec<BigInt> = exps.iter().map(|e| (-e).max(BigInt::zero())).collect();
            let render = |v: &[BigInt]| {
                let t: Vec<String> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| !e.is_zero())
                    .map(|(i, e)| if e.is_one() { format!("u{i}") } else { format!("u{i}^{e}") })
                    .collect();
                if t.is_empty() { "1".to_string() } else { t.join("*") }
            };
            let lhs = match &l.s {
                s if s.is_zero() => format!("x{}", j + 1),
                s if s.is_one() => format!("M*x{}", j + 1),
                s => format!("M^{s}*x{}", j + 1),
            };
            let mut rhs = render(&num);
            if den.iter().any(|e| !e.is_zero()) {
                rhs = format!("{rhs} / ({})", render(&den));
            }
            out.push(format!("{lhs} = {rhs}"));
        }
        out.join("\n")
    }
}

impl InverseVerification {
    pub fn valid_lines(&self) -> usize {
        self.lines.iter().filter(|l| l.valid).count()
    }
}

fn check_shape(data: &ShiodaData, inv: &InverseMap) -> Result<()> {
    let n = data.n();
    if inv.slack_exponents.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "slack monomial has {} exponents, expected {n}",
            inv.slack_exponents.len()
        )));
    }
    if inv.lines.len() != n {
        return Err(Error::DimensionMismatch(format!("{} inverse lines, expected {n}", inv.lines.len())));
    }
    if let Some((j, l)) = inv.lines.iter().enumerate().find(|(_, l)| l.c.len() != n) {
        return Err(Error::DimensionMismatch(format!("line {} has {} u-exponents, expected {n}", j + 1, l.c.len())));
    }
    Ok(())
}

/// Checks every line's exponent identity.
pub fn verify_inverse(data: &ShiodaData, inv: &InverseMap) -> Result<InverseVerification> {
    check_shape(data, inv)?;
    let n = data.n();
    let at = data.matrix.matrix().transpose();
    let mu = &inv.slack_exponents;
    let mut lines = Vec::with_capacity(n);
    for (j, line) in inv.lines.iter().enumerate() {
        let lhs: Vec<BigInt> = at.mul_vec(&line.c)?.into_iter().map(|x| x + &line.c0).collect();
        let rhs: Vec<BigInt> = (0..n)
            .map(|i| &line.s * &mu[i] + if i == j { BigInt::one() } else { BigInt::zero() })
            .collect();
        let residual: Vec<BigInt> = rhs.iter().zip(&lhs).map(|(r, l)| r - l).collect();
        let valid = residual.iter().all(Zero::is_zero);
        let required_c0 = residual
            .iter()
            .all(|r| r == &residual[0])
            .then(|| crate::serial::Int(&line.c0 + &residual[0]));
        lines.push(LineDiagnostic { index: j + 1, lhs, rhs, residual, valid, required_c0 });
    }
    let nonneg = mu.iter().all(|x| !x.is_negative()) && inv.lines.iter().all(|l| !l.s.is_negative());
    let q = &data.q;
    let weighted = inv.lines.iter().zip(q).all(|(l, qj)| &l.s * &q[0] == &inv.lines[0].s * qj);
    Ok(InverseVerification { valid: nonneg && lines.iter().all(|l| l.valid), weighted, lines })
}

/// Solves `a_k g = b_k (mod s)` simultaneously; returns the least non-negative `g`.
fn solve_congruences(eqs: &[(BigInt, BigInt)], s: &BigInt) -> Option<BigInt> {
    // all solutions so far are r + m Z
    let mut r = BigInt::zero();
    let mut m = BigInt::one();
    for (a, b) in eqs {
        let am = (a * &m).mod_floor(s);
        let rhs = (b - a * &r).mod_floor(s);
        let g = am.gcd(s);
        if !rhs.is_multiple_of(&g) {
            return None;
        }
        let s_g = s / &g;
        let inv = (&am / &g).extended_gcd(&s_g).x;
        let t = ((&rhs / &g) * inv).mod_floor(&s_g);
        r += &m * t;
        m *= &s_g;
        r = r.mod_floor(&m);
    }
    Some(r.mod_floor(s))
}

/// Some verified inverse when `H_A` is trivial, `None` otherwise.
///
/// Works in `G = Z^n / (Ze + A^t Z^n)`: with `s_j = kappa q_red_j` the lines are solvable
/// iff `kappa q_red_j [mu] = -[e_j]` in `G` for every `j`.
pub fn construct_inverse(data: &ShiodaData) -> Result<Option<InverseMap>> {
    data.require_cy()?;
    if !GroupLattices::new(data)?.h_a()?.is_trivial() {
        return Ok(None);
    }
    let n = data.n();
    let at = data.matrix.matrix().transpose();
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| std::iter::once(BigInt::one()).chain(at.row(i).iter().cloned()).collect())
        .collect();
    let system = IntMatrix::from_rows(rows)?;
    let snf = smith_normal_form(&system);
    let diag = snf.diagonal();
    if diag.len() != n || diag.iter().any(Zero::is_zero) {
        return Err(Error::Internal("e and the columns of A^t do not span a full-rank lattice".into()));
    }
    let exponent = lcm_all(&diag);

    let mut found = None;
    let mut kappa = BigInt::one();
    while kappa <= exponent {
        let mut w = vec![BigInt::zero(); n];
        let ok = (0..n).all(|i| {
            let s = &diag[i];
            if s.is_one() {
                return true;
            }
            let eqs: Vec<(BigInt, BigInt)> =
                (0..n).map(|j| (&kappa * &data.q_reduced[j], -snf.u[(i, j)].clone())).collect();
            match solve_congruences(&eqs, s) {
                Some(g) => {
                    w[i] = g;
                    true
                }
                None => false,
            }
        });
        if ok {
            found = Some((kappa.clone(), snf.u_inv.mul_vec(&w)?));
            break;
        }
        kappa += 1;
    }
    let Some((kappa, mu)) = found else {
        return Err(Error::Internal("no slack monomial found although H_A is trivial".into()));
    };

    // dZ^n and Ze lie in the span, so reduce mod d and shift to the smallest positive vector.
    let mut mu: Vec<BigInt> = mu.iter().map(|x| x.mod_floor(&data.d)).collect();
    let shift = mu.iter().min().unwrap() - 1;
    mu.iter_mut().for_each(|x| *x -= &shift);

    let mut lines = Vec::with_capacity(n);
    for j in 0..n {
        let s = &kappa * &data.q_reduced[j];
        let rhs: Vec<BigInt> =
            (0..n).map(|i| &s * &mu[i] + if i == j { BigInt::one() } else { BigInt::zero() }).collect();
        let sol = solve_diophantine(&system, &rhs)?
            .ok_or_else(|| Error::Internal(format!("inverse line {} has no integer solution", j + 1)))?;
        let mut x = sol.particular;
        if let [k] = sol.kernel_basis.as_slice() {
            let k: Vec<BigInt> = if k[0].is_negative() { k.iter().map(|v| -v).collect() } else { k.clone() };
            if k[0].is_positive() {
                let t = x[0].div_floor(&k[0]);
                x.iter_mut().zip(&k).for_each(|(a, b)| *a -= &t * b);
            }
        }
        let c0 = x.remove(0);
        lines.push(InverseLine { s, c0, c: x });
    }
    let inv = InverseMap { slack_exponents: mu, lines };
    let check = verify_inverse(data, &inv)?;
    if !check.valid || !check.weighted {
        return Err(Error::Internal("constructed inverse failed verification".into()));
    }
    Ok(Some(inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::to_bigints;
    use crate::shioda::{analyze, ExponentMatrix};

    fn example_d() -> ShiodaData {
        analyze(
            &ExponentMatrix::from_rows([
                [5, 0, 0, 0, 0],
                [0, 9, 1, 0, 0],
                [0, 0, 9, 1, 0],
                [0, 0, 0, 10, 0],
                [0, 0, 0, 0, 2],
            ])
            .unwrap(),
        )
        .unwrap()
    }

    fn line(s: i64, c0: i64, c: &[i64]) -> InverseLine {
        InverseLine { s: s.into(), c0: c0.into(), c: to_bigints(c) }
    }

    fn printed(c0: [i64; 5]) -> InverseMap {
        InverseMap {
            slack_exponents: to_bigints(&[2, 3, 1, 1, 2]),
            lines: vec![
                line(162, c0[0], &[65, 54, 12, 15, 162]),
                line(81, c0[1], &[-2, 8, -11, -8, -5]),
                line(81, c0[2], &[18, 19, -1, 1, 45]),
                line(81, c0[3], &[0, 9, -10, -7, 0]),
                line(405, c0[4], &[81, 90, -10, 1, 203]),
            ],
        }
    }

    #[test]
    fn printed_lines_need_u0_powers() {
        let d = example_d();
        let v = verify_inverse(&d, &printed([0; 5])).unwrap();
        assert!(!v.valid);
        assert!(v.lines[0].valid);
        assert_eq!(v.lines[0].lhs, to_bigints(&[325, 486, 162, 162, 324]));
        let required: Vec<BigInt> = v.lines.iter().map(|l| l.required_c0.clone().unwrap().0).collect();
        assert_eq!(required, to_bigints(&[0, 172, 72, 162, 405]));
        let fixed = verify_inverse(&d, &printed([0, 172, 72, 162, 405])).unwrap();
        assert!(fixed.valid && fixed.weighted);
        assert_eq!(fixed.valid_lines(), 5);
    }

    #[test]
    fn relation_vector_does_not_change_lines() {
        let d = example_d();
        let mut inv = printed([0, 172, 72, 162, 405]);
        for l in inv.lines.iter_mut() {
            l.c0 += &d.d * 3;
            for (c, q) in l.c.iter_mut().zip(&d.q_prime) {
                *c -= q * 3;
            }
        }
        assert!(verify_inverse(&d, &inv).unwrap().valid);
    }

    #[test]
    fn constructed_for_example_d() {
        let d = example_d();
        let inv = construct_inverse(&d).unwrap().unwrap();
        assert!(verify_inverse(&d, &inv).unwrap().valid);
        assert!(inv.slack_exponents.iter().all(|x| x.is_positive()));
    }

    #[test]
    fn absent_for_nontrivial_h() {
        let quintic = analyze(&ExponentMatrix::new(IntMatrix::diagonal(&[5; 5])).unwrap()).unwrap();
        assert_eq!(construct_inverse(&quintic).unwrap(), None);
    }

    #[test]
    fn conic() {
        let d = analyze(&ExponentMatrix::new(IntMatrix::diagonal(&[2, 2])).unwrap()).unwrap();
        let inv = construct_inverse(&d).unwrap().unwrap();
        assert!(verify_inverse(&d, &inv).unwrap().valid);
    }

    #[test]
    fn congruences() {
        let s = BigInt::from(12);
        let eqs = vec![(BigInt::from(4), BigInt::from(8)), (BigInt::from(3), BigInt::from(6))];
        let g = solve_congruences(&eqs, &s).unwrap();
        assert!((BigInt::from(4) * &g - BigInt::from(8)).is_multiple_of(&s));
        assert!((BigInt::from(3) * &g - BigInt::from(6)).is_multiple_of(&s));
        assert_eq!(solve_congruences(&[(BigInt::from(2), BigInt::from(1))], &BigInt::from(4)), None);
    }

    #[test]
    fn shape_errors() {
        let d = example_d();
        let mut inv = printed([0; 5]);
        inv.lines.pop();
        assert!(matches!(verify_inverse(&d, &inv), Err(Error::DimensionMismatch(_))));
    }
}
