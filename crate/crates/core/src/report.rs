//! Input documents and the JSON analysis report.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::equations::{family_equations, fingerprint, EquationSet, FamilyEquations, Fingerprint, Param};
use crate::error::{Error, Result};
use crate::groups::{shioda_groups, AbelianGroupStructure};
use crate::inverse::{construct_inverse, InverseMap};
use crate::lattice::IntMatrix;
use crate::oracle::{enumerate_groups, EnumeratedGroup};
use crate::serial::{decimal, int, int_mat, int_vec};
use crate::shioda::{analyze, matrix_from_polynomial, ExponentMatrix, ShiodaData};
use crate::wps::{fano_divisibility, singular_strata, well_form, SingularStratum, WeightSystem};

pub const SCHEMA: &str = "shioda-report/1";

/// Either an exponent matrix or the monomials of `F_A` together with weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Polynomial {
        #[serde(with = "int_mat")]
        monomials: Vec<Vec<BigInt>>,
        #[serde(with = "int_vec")]
        weights: Vec<BigInt>,
    },
    Matrix {
        #[serde(with = "int_mat")]
        matrix: Vec<Vec<BigInt>>,
    },
}

impl MatrixInput {
    pub fn from_matrix(rows: Vec<Vec<BigInt>>) -> Self {
        MatrixInput::Matrix { matrix: rows }
    }

    /// Builds the exponent matrix; for polynomial input also checks that every
    /// monomial has the same weighted degree.
    pub fn exponent_matrix(&self) -> Result<ExponentMatrix> {
        match self {
            MatrixInput::Matrix { matrix } => {
                let n = matrix.len();
                if let Some((i, r)) = matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
                    return Err(Error::Ragged { row: i + 1, len: r.len(), expected: n });
                }
                ExponentMatrix::new(IntMatrix::from_rows(matrix.clone())?)
            }
            MatrixInput::Polynomial { monomials, weights } => {
                let a = matrix_from_polynomial(monomials)?;
                let w = WeightSystem::new(weights.clone())?;
                if w.len() != a.n() {
                    return Err(Error::WrongCount { expected: a.n(), got: w.len() });
                }
                let degrees = a.matrix().mul_vec(w.weights())?;
                if let Some((i, deg)) = degrees.iter().enumerate().find(|(_, x)| *x != &degrees[0]) {
                    return Err(Error::InvalidWeights(format!(
                        "monomial {} has weighted degree {deg}, monomial 1 has {}",
                        i + 1,
                        degrees[0]
                    )));
                }
                Ok(a)
            }
        }
    }

    pub fn given_weights(&self) -> Option<&[BigInt]> {
        match self {
            MatrixInput::Polynomial { weights, .. } => Some(weights),
            MatrixInput::Matrix { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDocument {
    pub name: String,
    #[serde(flatten)]
    pub input: MatrixInput,
}

impl InputDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("input document: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupReport {
    #[serde(with = "int_vec")]
    pub invariant_factors: Vec<BigInt>,
    #[serde(with = "decimal")]
    pub order: BigInt,
    pub description: String,
    #[serde(with = "int_mat")]
    pub generator_lifts: Vec<Vec<BigInt>>,
}

impl From<&AbelianGroupStructure> for GroupReport {
    fn from(g: &AbelianGroupStructure) -> Self {
        Self {
            invariant_factors: g.invariant_factors.clone(),
            order: g.order.clone(),
            description: g.describe(),
            generator_lifts: g.generator_lifts.iter().map(|v| v.k.clone()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupsReport {
    pub gamma_q_prime: GroupReport,
    pub gamma_a: GroupReport,
    pub h_a: GroupReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    /// False when `d^n` is above the enumeration limit and nothing was checked.
    pub ran: bool,
    pub agrees: bool,
    pub gamma_q_prime: Option<Vec<u64>>,
    pub gamma_a: Option<Vec<u64>>,
    pub h_a: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationsReport {
    pub unreduced: EquationSet,
    pub reduced: EquationSet,
    pub family: FamilyEquations,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InverseReport {
    pub present: bool,
    pub map: Option<InverseMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub name: String,
    pub input: MatrixInput,
    #[serde(with = "int")]
    pub d: BigInt,
    #[serde(with = "int_mat")]
    pub b: Vec<Vec<BigInt>>,
    #[serde(with = "int_vec")]
    pub q: Vec<BigInt>,
    #[serde(with = "int")]
    pub m: BigInt,
    #[serde(with = "int_vec")]
    pub q_reduced: Vec<BigInt>,
    #[serde(with = "int_vec")]
    pub q_prime: Vec<BigInt>,
    #[serde(with = "int")]
    pub m_prime: BigInt,
    #[serde(with = "int")]
    pub a_prime: BigInt,
    #[serde(with = "int_vec")]
    pub a_prime_vec: Vec<BigInt>,
    pub is_cy: bool,
    pub fano: bool,
    #[serde(with = "int_vec")]
    pub well_formed_weights: Vec<BigInt>,
    pub singular_strata: Vec<SingularStratum>,
    pub groups: Option<GroupsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    pub equations: Option<EquationsReport>,
    pub fingerprint: Option<Fingerprint>,
    pub inverse: Option<InverseReport>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReportOptions {
    /// Only the weight data; skips groups, equations and the inverse, so
    /// non-Calabi-Yau matrices are accepted.
    pub basic: bool,
    /// Cross-check the groups by enumeration when `d^n` is small enough.
    pub oracle: bool,
}

fn oracle_report(data: &ShiodaData, groups: &GroupsReport) -> Result<OracleReport> {
    let to_u64 = |g: &GroupReport| -> Vec<u64> {
        g.invariant_factors.iter().map(|x| u64::try_from(x).unwrap_or(u64::MAX)).collect()
    };
    let Some(e) = enumerate_groups(data)? else {
        return Ok(OracleReport { ran: false, agrees: true, gamma_q_prime: None, gamma_a: None, h_a: None });
    };
    let same = |x: &EnumeratedGroup, g: &GroupReport| x.invariant_factors == to_u64(g);
    let agrees =
        same(&e.gamma_q_prime, &groups.gamma_q_prime) && same(&e.gamma_a, &groups.gamma_a) && same(&e.h_a, &groups.h_a);
    Ok(OracleReport {
        ran: true,
        agrees,
        gamma_q_prime: Some(e.gamma_q_prime.invariant_factors),
        gamma_a: Some(e.gamma_a.invariant_factors),
        h_a: Some(e.h_a.invariant_factors),
    })
}

pub fn build_report(name: &str, input: &MatrixInput, options: ReportOptions) -> Result<AnalysisReport> {
    let a = input.exponent_matrix()?;
    let data = analyze(&a)?;
    data.check_consistency()?;
    let reduced = WeightSystem::new(data.q_reduced.clone())?;
    let mut report = AnalysisReport {
        schema: SCHEMA.into(),
        name: name.into(),
        input: input.clone(),
        d: data.d.clone(),
        b: data.b.to_rows(),
        q: data.q.clone(),
        m: data.m.clone(),
        q_reduced: data.q_reduced.clone(),
        q_prime: data.q_prime.clone(),
        m_prime: data.m_prime.clone(),
        a_prime: data.a_prime.clone(),
        a_prime_vec: data.a_prime_vec.clone(),
        is_cy: data.is_cy,
        fano: fano_divisibility(&reduced),
        well_formed_weights: well_form(&reduced).weights().to_vec(),
        singular_strata: singular_strata(&reduced)?,
        groups: None,
        oracle: None,
        equations: None,
        fingerprint: None,
        inverse: None,
    };
    if options.basic {
        return Ok(report);
    }
    data.require_cy()?;
    let g = shioda_groups(&data)?;
    let groups = GroupsReport {
        gamma_q_prime: (&g.gamma_q_prime).into(),
        gamma_a: (&g.gamma_a).into(),
        h_a: (&g.h_a).into(),
    };
    if options.oracle {
        let o = oracle_report(&data, &groups)?;
        if !o.agrees {
            return Err(Error::Internal("enumerated groups disagree with the lattice computation".into()));
        }
        report.oracle = Some(o);
    }
    report.groups = Some(groups);
    let family = family_equations(&data, &Param::symbolic())?;
    let (unreduced, reduced) = (family.unreduced.clone(), family.reduced.clone());
    let bare = |e: EquationSet| {
        let mut e = e;
        e.linear.t = Param::zero();
        e
    };
    report.equations = Some(EquationsReport { unreduced: bare(unreduced), reduced: bare(reduced), family });
    report.fingerprint = Some(fingerprint(&data)?);
    let inv = construct_inverse(&data)?;
    report.inverse = Some(InverseReport { present: inv.is_some(), map: inv });
    report.check_consistency()?;
    Ok(report)
}

impl AnalysisReport {
    /// `A q = d e` on the echoed input and `|Gamma_A| |H_A| = |Gamma(q')|`.
    pub fn check_consistency(&self) -> Result<()> {
        let a = self.input.exponent_matrix()?;
        let aq = a.matrix().mul_vec(&self.q)?;
        if aq.iter().any(|x| x != &self.d) {
            return Err(Error::Internal("report violates A q = d e".into()));
        }
        if let Some(g) = &self.groups {
            if &g.gamma_a.order * &g.h_a.order != g.gamma_q_prime.order {
                return Err(Error::Internal("report group orders do not multiply".into()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("report: {e}")))
    }

    pub fn to_text(&self) -> String {
        let v = |x: &[BigInt]| crate::lattice::format_vec(x);
        let mut out = vec![
            format!("name: {}", self.name),
            format!("d = {}", self.d),
            format!("q = {}  (m = {}, reduced {})", v(&self.q), self.m, v(&self.q_reduced)),
            format!("q' = {}  (m' = {}, a' = {})", v(&self.q_prime), self.m_prime, self.a_prime),
            format!("Calabi-Yau: {}", self.is_cy),
            format!("Fano divisibility: {}", self.fano),
            format!("well-formed weights: {}", v(&self.well_formed_weights)),
        ];
        for s in &self.singular_strata {
            let idx: Vec<String> = s.indices.iter().map(|i| i.to_string()).collect();
            out.push(format!("Sing_{}: {{{}}}", s.prime, idx.join(",")));
        }
        if let Some(g) = &self.groups {
            out.push(format!("Gamma(q') = {}  (order {})", g.gamma_q_prime.description, g.gamma_q_prime.order));
            out.push(format!("Gamma_A = {}  (order {})", g.gamma_a.description, g.gamma_a.order));
            out.push(format!("H_A = {}  (order {})", g.h_a.description, g.h_a.order));
        }
        if let Some(e) = &self.equations {
            out.push(format!("M: {}", e.unreduced.to_text()));
            out.push(format!("M reduced: {}", e.reduced.to_text()));
        }
        if let Some(f) = &self.fingerprint {
            out.push(format!("fingerprint: {f}"));
        }
        if let Some(i) = &self.inverse {
            out.push(format!("inverse: {}", if i.present { "constructed" } else { "absent (H_A nontrivial)" }));
        }
        out.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_inputs() {
        let doc = InputDocument::parse(r#"{"name":"a","matrix":[[5,0],[0,5]]}"#).unwrap();
        assert!(matches!(doc.input, MatrixInput::Matrix { .. }));
        let doc = InputDocument::parse(r#"{"name":"p","monomials":[[2,0],[0,2]],"weights":[1,1]}"#).unwrap();
        assert_eq!(doc.input.exponent_matrix().unwrap().n(), 2);
        assert!(InputDocument::parse(r#"{"name":"r","matrix":[[0.5,0],[0,1]]}"#).is_err());
        let bad = InputDocument::parse(r#"{"name":"w","monomials":[[2,0],[0,2]],"weights":[1,2]}"#).unwrap();
        assert!(matches!(bad.input.exponent_matrix(), Err(Error::InvalidWeights(_))));
    }

    #[test]
    fn report_round_trip() {
        let input = MatrixInput::from_matrix(vec![
            crate::lattice::to_bigints(&[5, 0, 0, 0, 0]),
            crate::lattice::to_bigints(&[0, 10, 0, 0, 0]),
            crate::lattice::to_bigints(&[0, 0, 10, 0, 0]),
            crate::lattice::to_bigints(&[0, 0, 0, 10, 0]),
            crate::lattice::to_bigints(&[0, 0, 0, 0, 2]),
        ]);
        let r = build_report("exampleA", &input, ReportOptions { basic: false, oracle: true }).unwrap();
        assert_eq!(r.groups.as_ref().unwrap().gamma_q_prime.order, BigInt::from(1000));
        assert!(r.oracle.as_ref().unwrap().agrees);
        let json = r.to_json();
        assert!(json.contains("\"schema\": \"shioda-report/1\""));
        assert!(json.contains("\"order\": \"1000\""));
        assert_eq!(AnalysisReport::from_json(&json).unwrap(), r);
    }

    #[test]
    fn non_cy_needs_basic() {
        let input = MatrixInput::from_matrix(vec![
            crate::lattice::to_bigints(&[1, 0]),
            crate::lattice::to_bigints(&[0, 1]),
        ]);
        assert!(matches!(build_report("id", &input, ReportOptions::default()), Err(Error::NotCalabiYau { .. })));
        let r = build_report("id", &input, ReportOptions { basic: true, oracle: false }).unwrap();
        assert!(!r.is_cy && r.groups.is_none());
    }
}
