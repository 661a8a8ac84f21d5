//! Equations of the Shioda quotient `M_A`, its deformation family, the mirror
//! transpose and the birational fingerprint.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{gcd_all, solve_diophantine, IntMatrix};
use crate::serial::{int, int_vec};
use crate::shioda::{analyze, ExponentMatrix, ShiodaData};

/// Deformation parameter: a formal symbol or an exact rational value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Param {
    Symbolic(String),
    Exact(BigRational),
}

impl Param {
    pub fn symbolic() -> Self {
        Param::Symbolic("t".into())
    }

    pub fn zero() -> Self {
        Param::Exact(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Param::Exact(x) if x.is_zero())
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Symbolic(s) => f.write_str(s),
            Param::Exact(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Param {
    type Err = Error;

    /// Integers and fractions `p/q` parse as exact values, identifiers as symbols.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(x) = s.parse::<BigRational>() {
            return Ok(Param::Exact(x));
        }
        let ident = !s.is_empty()
            && s.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ident {
            Ok(Param::Symbolic(s.into()))
        } else {
            Err(Error::Parse(format!("parameter {s:?} is neither a rational number nor a symbol")))
        }
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `sum_i c_i u_i - t u_0 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearRelation {
    #[serde(with = "int_vec")]
    pub coefficients: Vec<BigInt>,
    pub t: Param,
}

/// `u_0^power = prod_i u_i^{exponents_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialRelation {
    #[serde(with = "int")]
    pub power: BigInt,
    #[serde(with = "int_vec")]
    pub exponents: Vec<BigInt>,
}

impl MonomialRelation {
    /// All `u_i` have the same degree, so balance means `power = sum exponents`.
    pub fn is_balanced(&self) -> bool {
        self.power == self.exponents.iter().sum::<BigInt>()
    }

    pub fn is_reduced(&self) -> bool {
        gcd_all(std::iter::once(&self.power).chain(&self.exponents)).is_one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationSet {
    pub linear: LinearRelation,
    pub relation: MonomialRelation,
}

/// `(sum_i u_i)^d = t^d prod_i u_i^{q'_i}`, obtained by solving the linear equation for `u_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminatedEquation {
    #[serde(with = "int")]
    pub degree: BigInt,
    pub t: Param,
    #[serde(with = "int_vec")]
    pub exponents: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyEquations {
    pub t: Param,
    pub unreduced: EquationSet,
    pub reduced: EquationSet,
    /// Absent for `t = 0`, where `u_0` cannot be eliminated.
    pub eliminated: Option<EliminatedEquation>,
}

fn equation_set(n: usize, t: &Param, power: &BigInt, exponents: &[BigInt]) -> EquationSet {
    EquationSet {
        linear: LinearRelation { coefficients: vec![BigInt::one(); n], t: t.clone() },
        relation: MonomialRelation { power: power.clone(), exponents: exponents.to_vec() },
    }
}

/// Unreduced `u_0^d = prod u_i^{q'_i}` and reduced `u_0^{a'} = prod u_i^{a'_i}`, with `sum u_i = 0`.
pub fn mbar_equations(data: &ShiodaData) -> Result<(EquationSet, EquationSet)> {
    let f = family_equations(data, &Param::zero())?;
    Ok((f.unreduced, f.reduced))
}

pub fn family_equations(data: &ShiodaData, t: &Param) -> Result<FamilyEquations> {
    data.require_cy()?;
    let n = data.n();
    let unreduced = equation_set(n, t, &data.d, &data.q_prime);
    let reduced = equation_set(n, t, &data.a_prime, &data.a_prime_vec);
    if !unreduced.relation.is_balanced() || !reduced.relation.is_balanced() || !reduced.relation.is_reduced() {
        return Err(Error::Internal("monomial relation is not balanced and reduced".into()));
    }
    let eliminated = (!t.is_zero())
        .then(|| EliminatedEquation { degree: data.d.clone(), t: t.clone(), exponents: data.q_prime.clone() });
    Ok(FamilyEquations { t: t.clone(), unreduced, reduced, eliminated })
}

fn power(var: &str, e: &BigInt) -> Option<String> {
    if e.is_zero() {
        None
    } else if e.is_one() {
        Some(var.to_string())
    } else {
        Some(format!("{var}^{e}"))
    }
}

fn latex_power(var: &str, e: &BigInt) -> Option<String> {
    if e.is_zero() {
        None
    } else if e.is_one() {
        Some(var.to_string())
    } else {
        Some(format!("{var}^{{{e}}}"))
    }
}

fn linear_text(l: &LinearRelation) -> String {
    let mut s = String::new();
    for (i, c) in l.coefficients.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let var = format!("u{}", i + 1);
        let mag = c.abs();
        let term = if mag.is_one() { var } else { format!("{mag}*{var}") };
        if s.is_empty() {
            s = if c.is_negative() { format!("-{term}") } else { term };
        } else {
            s.push(if c.is_negative() { '-' } else { '+' });
            s.push_str(&term);
        }
    }
    match &l.t {
        t if t.is_zero() => {}
        Param::Exact(x) if x.is_one() => s.push_str(" - u0"),
        Param::Exact(x) if (-x).is_one() => s.push_str(" + u0"),
        Param::Exact(x) if x.is_negative() => s.push_str(&format!(" + {}*u0", -x)),
        t => s.push_str(&format!(" - {t}*u0")),
    }
    format!("{s} = 0")
}

impl EquationSet {
    /// `u0^75 = u1^5 u2^8 ... ; u1+u2+... = 0`
    pub fn to_text(&self) -> String {
        let rhs: Vec<String> = self
            .relation
            .exponents
            .iter()
            .enumerate()
            .filter_map(|(i, e)| power(&format!("u{}", i + 1), e))
            .collect();
        let lhs = power("u0", &self.relation.power).unwrap_or_else(|| "1".into());
        let rhs = if rhs.is_empty() { "1".into() } else { rhs.join(" ") };
        format!("{lhs} = {rhs} ; {}", linear_text(&self.linear))
    }

    pub fn to_latex(&self) -> String {
        let rhs: String = self
            .relation
            .exponents
            .iter()
            .enumerate()
            .filter_map(|(i, e)| latex_power(&format!("u_{}", i + 1), e))
            .collect();
        let lhs = latex_power("u_0", &self.relation.power).unwrap_or_else(|| "1".into());
        let lin: Vec<String> = (1..=self.linear.coefficients.len()).map(|i| format!("u_{i}")).collect();
        let mut linear = lin.join(" + ");
        match &self.linear.t {
            t if t.is_zero() => {}
            Param::Exact(x) if x.is_one() => linear.push_str(" - u_0"),
            Param::Exact(x) if !x.is_integer() => {
                linear.push_str(&format!(" - \\tfrac{{{}}}{{{}}} u_0", x.numer(), x.denom()))
            }
            t => linear.push_str(&format!(" - {t} u_0")),
        }
        format!("{lhs} = {rhs}, \\quad {linear} = 0")
    }
}

impl EliminatedEquation {
    pub fn to_text(&self) -> String {
        let n = self.exponents.len();
        let sum: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
        let rhs: Vec<String> = self
            .exponents
            .iter()
            .enumerate()
            .filter_map(|(i, e)| power(&format!("u{}", i + 1), e))
            .collect();
        let coeff = match &self.t {
            Param::Exact(x) if x.is_one() => String::new(),
            Param::Exact(x) => format!("({x})^{} ", self.degree),
            t => format!("{t}^{} ", self.degree),
        };
        format!("({})^{} = {coeff}{}", sum.join("+"), self.degree, rhs.join(" "))
    }
}

impl FamilyEquations {
    pub fn to_text(&self) -> String {
        let mut lines = vec![self.unreduced.to_text(), self.reduced.to_text()];
        if let Some(e) = &self.eliminated {
            lines.push(e.to_text());
        }
        lines.join("\n")
    }
}

/// Birational fingerprint `(a', sorted a'_vec)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    #[serde(with = "int")]
    pub degree: BigInt,
    #[serde(with = "int_vec")]
    pub exponents: Vec<BigInt>,
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.exponents.iter().map(|x| x.to_string()).collect();
        write!(f, "({},{{{}}})", self.degree, e.join(","))
    }
}

pub fn fingerprint(data: &ShiodaData) -> Result<Fingerprint> {
    data.require_cy()?;
    let mut exponents = data.a_prime_vec.clone();
    exponents.sort();
    Ok(Fingerprint { degree: data.a_prime.clone(), exponents })
}

/// Left-eigenvector certificate: the primitive `(c, lambda)` with `c A = lambda e^t`,
/// `lambda > 0`. Returns `None` when `c` is not strictly positive.
pub fn left_eigenvector(a: &ExponentMatrix) -> Result<Option<(Vec<BigInt>, BigInt)>> {
    let n = a.n();
    let at = a.matrix().transpose();
    let mut rows = at.to_rows();
    for r in rows.iter_mut() {
        r.push(BigInt::from(-1));
    }
    let m = IntMatrix::from_rows(rows)?;
    let sol = solve_diophantine(&m, &vec![BigInt::zero(); n])?
        .ok_or_else(|| Error::Internal("homogeneous system without solution".into()))?;
    if sol.kernel_basis.len() != 1 {
        return Err(Error::Internal(format!("left eigenspace of rank {}", sol.kernel_basis.len())));
    }
    let mut v = sol.kernel_basis.into_iter().next().unwrap();
    let g = gcd_all(&v);
    for x in v.iter_mut() {
        *x = x.div_floor(&g);
    }
    if v[n].is_negative() {
        v.iter_mut().for_each(|x| *x = -x.clone());
    }
    let lambda = v.pop().unwrap();
    if !lambda.is_positive() || v.iter().any(|x| !x.is_positive()) {
        return Ok(None);
    }
    Ok(Some((v, lambda)))
}

/// Fingerprint obtained from the left eigenvector alone, without `B` or `q'`.
pub fn certified_fingerprint(a: &ExponentMatrix) -> Result<Option<Fingerprint>> {
    Ok(left_eigenvector(a)?.map(|(mut c, lambda)| {
        c.sort();
        Fingerprint { degree: lambda, exponents: c }
    }))
}

/// Family equations of `M_{tA,1}` and whether their relation exponents are
/// proportional to the weights `q` of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorTranspose {
    pub transpose: ShiodaData,
    pub equations: FamilyEquations,
    pub proportional_to_q: bool,
}

pub fn mirror_transpose(a: &ExponentMatrix) -> Result<MirrorTranspose> {
    let original = analyze(a)?;
    let transpose = analyze(&a.transpose())?;
    let equations = family_equations(&transpose, &Param::Exact(BigRational::one()))?;
    let rel = &equations.reduced.relation.exponents;
    let q = &original.q_reduced;
    let proportional = rel.iter().zip(q).all(|(r, x)| r * &q[0] == x * &rel[0]);
    Ok(MirrorTranspose { transpose, equations, proportional_to_q: proportional })
}
