//! Registry of worked examples and families, and their recomputation.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::equations::{fingerprint, mbar_equations, Fingerprint, MonomialRelation};
use crate::error::{Error, Result};
use crate::groups::{invariant_form_exponents, is_automorphism_vector, shioda_groups, CyclotomicVector, GroupLattices};
use crate::inverse::{construct_inverse, verify_inverse, InverseMap};
use crate::lattice::format_vec;
use crate::report::MatrixInput;
use crate::serial::{int_mat, int_vec, Int};
use crate::shioda::{analyze, ExponentMatrix, ShiodaData};
use crate::wps::{fano_divisibility, singular_strata, WeightSystem};

const SOURCES: &[(&str, &str)] = &[
    ("example_a.json", include_str!("../fixtures/example_a.json")),
    ("example_b.json", include_str!("../fixtures/example_b.json")),
    ("example_c.json", include_str!("../fixtures/example_c.json")),
    ("example_d.json", include_str!("../fixtures/example_d.json")),
    ("quintic.json", include_str!("../fixtures/quintic.json")),
    ("families.json", include_str!("../fixtures/families.json")),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Printed in a worked example or the family list.
    PaperExample,
    /// Recomputed value that corrects or completes the printed data.
    DerivedCorrection,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::PaperExample => "paper-example",
            Provenance::DerivedCorrection => "derived-correction",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected<T> {
    pub value: T,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedStratum {
    pub prime: u64,
    pub indices: Vec<usize>,
    /// `F_A` vanishes identically on the stratum.
    pub contained: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedValues {
    pub d: Option<Expected<Int>>,
    pub b: Option<Expected<Vec<Vec<Int>>>>,
    pub q: Option<Expected<Vec<Int>>>,
    pub q_reduced: Option<Expected<Vec<Int>>>,
    pub q_prime: Option<Expected<Vec<Int>>>,
    pub m_prime: Option<Expected<Int>>,
    pub weights: Option<Expected<Vec<Int>>>,
    pub is_cy: Option<Expected<bool>>,
    pub fano: Option<Expected<bool>>,
    pub unreduced_relation: Option<Expected<MonomialRelation>>,
    pub reduced_relation: Option<Expected<MonomialRelation>>,
    pub gamma_q_prime: Option<Expected<Vec<Int>>>,
    pub gamma_a: Option<Expected<Vec<Int>>>,
    pub h_a: Option<Expected<Vec<Int>>>,
    /// Orders of `Gamma(q')`, `Gamma_A`, `H_A` as decimal strings.
    pub orders: Option<Expected<[String; 3]>>,
    pub invariant_form: Option<Expected<Vec<Int>>>,
    pub strata: Option<Expected<Vec<ExpectedStratum>>>,
    pub fingerprint: Option<Expected<Fingerprint>>,
    pub text: Option<Expected<String>>,
    pub inverse_exists: Option<Expected<bool>>,
    /// Name of the error variant the input must be rejected with.
    pub rejected: Option<Expected<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupName {
    /// `k` in `Gamma(q')` (source coordinates).
    GammaQPrime,
    /// `k` in `Gamma_A` (source coordinates).
    GammaA,
    /// Image vector `w` in the `x` coordinates realised by some `g_k`.
    HA,
    /// `A w = c e mod d`.
    Automorphism,
    /// `w = c q_red mod d`.
    TrivialAction,
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupName::GammaQPrime => "gamma_q_prime",
            GroupName::GammaA => "gamma_a",
            GroupName::HA => "h_a",
            GroupName::Automorphism => "automorphism",
            GroupName::TrivialAction => "trivial_action",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipCheck {
    pub group: GroupName,
    #[serde(with = "int_vec")]
    pub vector: Vec<BigInt>,
    pub member: bool,
    pub provenance: Provenance,
}

/// The vectors generate the whole group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorCheck {
    pub group: GroupName,
    #[serde(with = "int_mat")]
    pub vectors: Vec<Vec<BigInt>>,
    pub provenance: Provenance,
}

/// `sum_i coefficients_i vectors_i = equals (mod d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinationCheck {
    #[serde(with = "int_mat")]
    pub vectors: Vec<Vec<BigInt>>,
    #[serde(with = "int_vec")]
    pub coefficients: Vec<BigInt>,
    #[serde(with = "int_vec")]
    pub equals: Vec<BigInt>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InverseFixture {
    /// The inverse as printed.
    pub map: InverseMap,
    pub provenance: Provenance,
    pub printed_valid_lines: Option<Expected<usize>>,
    pub corrected_c0: Option<Expected<Vec<Int>>>,
    /// `x`-exponents of both sides, for the leading lines.
    pub line_exponents: Option<Expected<Vec<Vec<Int>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub description: String,
    #[serde(default)]
    pub class: Option<String>,
    #[serde(flatten)]
    pub input: MatrixInput,
    pub expected: ExpectedValues,
    #[serde(default)]
    pub members: Vec<MembershipCheck>,
    #[serde(default)]
    pub generators: Vec<GeneratorCheck>,
    #[serde(default)]
    pub combinations: Vec<CombinationCheck>,
    #[serde(default)]
    pub inverse: Option<InverseFixture>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
    #[serde(default)]
    pub errata: Vec<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<Fixture>),
    One(Box<Fixture>),
}

pub fn parse_fixtures(text: &str) -> Result<Vec<Fixture>> {
    match serde_json::from_str::<OneOrMany>(text) {
        Ok(OneOrMany::Many(v)) => Ok(v),
        Ok(OneOrMany::One(f)) => Ok(vec![*f]),
        Err(e) => Err(Error::Parse(format!("fixture: {e}"))),
    }
}

/// Every built-in fixture, sorted by name.
pub fn registry() -> Result<Vec<Fixture>> {
    let mut all = Vec::new();
    for (file, text) in SOURCES {
        all.extend(parse_fixtures(text).map_err(|e| Error::Parse(format!("{file}: {e}")))?);
    }
    all.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(all)
}

pub fn fixture(name: &str) -> Result<Fixture> {
    registry()?
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::Parse(format!("no fixture named {name:?}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub field: String,
    pub provenance: Provenance,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureResult {
    pub name: String,
    pub checks: Vec<Check>,
    pub errata: Vec<String>,
    /// `(valid lines, total lines)` after applying the corrected `u_0` powers.
    pub inverse_lines: Option<(usize, usize)>,
}

impl FixtureResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn ints(v: &[Int]) -> Vec<BigInt> {
    v.iter().map(|x| x.0.clone()).collect()
}

fn list(v: &[BigInt]) -> String {
    format_vec(v)
}

struct Recorder(Vec<Check>);

impl Recorder {
    fn push(&mut self, field: impl Into<String>, provenance: Provenance, expected: String, actual: String) {
        let passed = expected == actual;
        self.0.push(Check { field: field.into(), provenance, expected, actual, passed });
    }

    fn compare<T: fmt::Debug>(&mut self, field: &str, e: &Option<Expected<T>>, actual: impl FnOnce() -> Result<String>, render: impl Fn(&T) -> String) {
        if let Some(e) = e {
            let actual = actual().unwrap_or_else(|err| format!("error: {err}"));
            self.push(field, e.provenance, render(&e.value), actual);
        }
    }
}

fn error_variant(e: &Error) -> String {
    let s = format!("{e:?}");
    s.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

/// Recomputes everything the fixture asserts.
pub fn verify_fixture(f: &Fixture) -> FixtureResult {
    let mut r = Recorder(Vec::new());
    let mut inverse_lines = None;
    let data = f.input.exponent_matrix().and_then(|a| analyze(&a));
    let data = match (data, &f.expected.rejected) {
        (Err(e), Some(exp)) => {
            r.push("rejected", exp.provenance, exp.value.clone(), error_variant(&e));
            None
        }
        (Ok(_), Some(exp)) => {
            r.push("rejected", exp.provenance, exp.value.clone(), "accepted".into());
            None
        }
        (Err(e), None) => {
            r.push("input", Provenance::DerivedCorrection, "admissible".into(), e.to_string());
            None
        }
        (Ok(d), None) => Some(d),
    };
    if let Some(data) = data {
        check_data(f, &data, &mut r, &mut inverse_lines);
    }
    FixtureResult { name: f.name.clone(), checks: r.0, errata: f.errata.clone(), inverse_lines }
}

fn check_data(f: &Fixture, data: &ShiodaData, r: &mut Recorder, inverse_lines: &mut Option<(usize, usize)>) {
    let e = &f.expected;
    let int = |x: &Int| x.to_string();
    let vecs = |x: &Vec<Int>| list(&ints(x));
    r.compare("d", &e.d, || Ok(data.d.to_string()), int);
    r.compare("b", &e.b, || Ok(data.b.to_rows().iter().map(|x| list(x)).collect::<Vec<_>>().join(";")), |m| {
        m.iter().map(|x| list(&ints(x))).collect::<Vec<_>>().join(";")
    });
    r.compare("q", &e.q, || Ok(list(&data.q)), vecs);
    r.compare("q_reduced", &e.q_reduced, || Ok(list(&data.q_reduced)), vecs);
    r.compare("q_prime", &e.q_prime, || Ok(list(&data.q_prime)), vecs);
    r.compare("m_prime", &e.m_prime, || Ok(data.m_prime.to_string()), int);
    r.compare(
        "weights",
        &e.weights,
        || Ok(f.input.given_weights().map(list).unwrap_or_else(|| list(&data.q_reduced))),
        vecs,
    );
    if let (Some(w), Some(given)) = (&e.weights, f.input.given_weights()) {
        r.push("weights = q_reduced", w.provenance, list(given), list(&data.q_reduced));
    }
    r.compare("is_cy", &e.is_cy, || Ok(data.is_cy.to_string()), |b| b.to_string());
    r.compare(
        "fano",
        &e.fano,
        || Ok(fano_divisibility(&WeightSystem::new(data.q_reduced.clone())?).to_string()),
        |b| b.to_string(),
    );
    let rel = |m: &MonomialRelation| format!("({}; {})", m.power, list(&m.exponents));
    r.compare("unreduced_relation", &e.unreduced_relation, || Ok(rel(&mbar_equations(data)?.0.relation)), rel);
    r.compare("reduced_relation", &e.reduced_relation, || Ok(rel(&mbar_equations(data)?.1.relation)), rel);
    r.compare("text", &e.text, || Ok(mbar_equations(data)?.1.to_text()), |s| s.clone());

    let groups = shioda_groups(data);
    let factors = |pick: fn(&crate::groups::ShiodaGroups) -> &crate::groups::AbelianGroupStructure| -> Result<String> {
        match &groups {
            Ok(g) => Ok(list(&pick(g).invariant_factors)),
            Err(e) => Err(e.clone()),
        }
    };
    r.compare("gamma_q_prime", &e.gamma_q_prime, || factors(|g| &g.gamma_q_prime), vecs);
    r.compare("gamma_a", &e.gamma_a, || factors(|g| &g.gamma_a), vecs);
    r.compare("h_a", &e.h_a, || factors(|g| &g.h_a), vecs);
    r.compare(
        "orders",
        &e.orders,
        || {
            let g = groups.clone()?;
            Ok(format!("{} {} {}", g.gamma_q_prime.order, g.gamma_a.order, g.h_a.order))
        },
        |o| o.join(" "),
    );
    r.compare("invariant_form", &e.invariant_form, || Ok(list(&invariant_form_exponents(data)?)), vecs);
    let stratum = |s: &ExpectedStratum| format!("p={} {:?} contained={}", s.prime, s.indices, s.contained);
    r.compare(
        "strata",
        &e.strata,
        || {
            let strata = singular_strata(&WeightSystem::new(data.q_reduced.clone())?)?;
            Ok(strata
                .iter()
                .map(|s| {
                    stratum(&ExpectedStratum {
                        prime: s.prime,
                        indices: s.indices.clone(),
                        contained: s.contained_in_hypersurface(&data.matrix),
                    })
                })
                .collect::<Vec<_>>()
                .join(", "))
        },
        |v| v.iter().map(stratum).collect::<Vec<_>>().join(", "),
    );
    r.compare("fingerprint", &e.fingerprint, || Ok(fingerprint(data)?.to_string()), |f| f.to_string());
    r.compare("inverse_exists", &e.inverse_exists, || Ok(construct_inverse(data)?.is_some().to_string()), |b| b.to_string());

    if !(f.members.is_empty() && f.generators.is_empty() && f.combinations.is_empty()) {
        match GroupLattices::new(data) {
            Ok(lat) => check_vectors(f, data, &lat, r),
            Err(err) => r.push("group vectors", Provenance::PaperExample, "computable".into(), err.to_string()),
        }
    }
    if let Some(inv) = &f.inverse {
        *inverse_lines = check_inverse(inv, data, r);
    }
}

fn member(data: &ShiodaData, lat: &GroupLattices, g: GroupName, v: &[BigInt]) -> Result<bool> {
    Ok(match g {
        GroupName::GammaQPrime => lat.in_gamma_q_prime(v),
        GroupName::GammaA => lat.in_gamma_a(v),
        GroupName::HA => lat.in_h_a(v) && is_automorphism_vector(&CyclotomicVector::new(data.d.clone(), v), data)?,
        GroupName::Automorphism => is_automorphism_vector(&CyclotomicVector::new(data.d.clone(), v), data)?,
        GroupName::TrivialAction => lat.acts_trivially(v),
    })
}

fn check_vectors(f: &Fixture, data: &ShiodaData, lat: &GroupLattices, r: &mut Recorder) {
    for m in &f.members {
        let actual = member(data, lat, m.group, &m.vector).map(|b| b.to_string()).unwrap_or_else(|e| e.to_string());
        r.push(format!("{} in {}", list(&m.vector), m.group), m.provenance, m.member.to_string(), actual);
    }
    for g in &f.generators {
        let field = format!("{} generated by {} vectors", g.group, g.vectors.len());
        let actual = (|| -> Result<(BigInt, BigInt)> {
            let all_members = g.vectors.iter().map(|v| member(data, lat, g.group, v)).collect::<Result<Vec<_>>>()?;
            if all_members.iter().any(|b| !b) {
                return Err(Error::Internal("a listed generator is not a member".into()));
            }
            Ok(match g.group {
                GroupName::GammaQPrime => (lat.generated_order_source(&g.vectors)?, lat.gamma_q_prime()?.order),
                GroupName::GammaA => (lat.generated_order_source(&g.vectors)?, lat.gamma_a()?.order),
                GroupName::HA => (lat.generated_order_image(&g.vectors)?, lat.h_a()?.order),
                other => return Err(Error::Internal(format!("{other} is not a finite group here"))),
            })
        })();
        match actual {
            Ok((sub, full)) => r.push(field, g.provenance, format!("order {full}"), format!("order {sub}")),
            Err(e) => r.push(field, g.provenance, "generating set".into(), e.to_string()),
        }
    }
    for c in &f.combinations {
        let n = data.n();
        let mut sum = vec![BigInt::from(0); n];
        for (v, k) in c.vectors.iter().zip(&c.coefficients) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += k * x;
            }
        }
        let reduce = |v: &[BigInt]| -> Vec<BigInt> { v.iter().map(|x| x.mod_floor(&data.d)).collect() };
        r.push(
            format!("combination {} mod {}", list(&c.coefficients), data.d),
            c.provenance,
            list(&reduce(&c.equals)),
            list(&reduce(&sum)),
        );
    }
}

fn check_inverse(inv: &InverseFixture, data: &ShiodaData, r: &mut Recorder) -> Option<(usize, usize)> {
    let printed = match verify_inverse(data, &inv.map) {
        Ok(v) => v,
        Err(e) => {
            r.push("inverse", inv.provenance, "verifiable".into(), e.to_string());
            return None;
        }
    };
    if let Some(e) = &inv.printed_valid_lines {
        r.push("printed inverse valid lines", e.provenance, e.value.to_string(), printed.valid_lines().to_string());
    }
    if let Some(e) = &inv.line_exponents {
        for (i, want) in e.value.iter().enumerate() {
            let Some(line) = printed.lines.get(i) else { continue };
            let want = list(&ints(want));
            r.push(format!("inverse line {} lhs exponents", i + 1), e.provenance, want.clone(), list(&line.lhs));
            r.push(format!("inverse line {} rhs exponents", i + 1), e.provenance, want, list(&line.rhs));
        }
    }
    let corrected = inv.corrected_c0.as_ref()?;
    let required: Vec<String> = printed
        .lines
        .iter()
        .map(|l| l.required_c0.as_ref().map_or("none".into(), |x| x.to_string()))
        .collect();
    r.push("required u0 powers", corrected.provenance, list(&ints(&corrected.value)), format!("({})", required.join(",")));
    let mut fixed = inv.map.clone();
    for (line, c0) in fixed.lines.iter_mut().zip(&corrected.value) {
        line.c0 = c0.0.clone();
    }
    match verify_inverse(data, &fixed) {
        Ok(v) => {
            let n = v.lines.len();
            r.push("corrected inverse valid lines", corrected.provenance, n.to_string(), v.valid_lines().to_string());
            Some((v.valid_lines(), n))
        }
        Err(e) => {
            r.push("corrected inverse", corrected.provenance, "valid".into(), e.to_string());
            None
        }
    }
}

/// Runs every fixture whose name contains `filter` (all when `None`), in name order.
pub fn verify_fixtures(filter: Option<&str>) -> Result<Vec<FixtureResult>> {
    Ok(registry()?
        .iter()
        .filter(|f| filter.is_none_or(|p| f.name.contains(p)))
        .map(verify_fixture)
        .collect())
}

/// Parsed exponent matrix of a fixture.
pub fn fixture_matrix(f: &Fixture) -> Result<ExponentMatrix> {
    f.input.exponent_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_loads() {
        let all = registry().unwrap();
        assert_eq!(all.len(), 18);
        assert!(all.windows(2).all(|w| w[0].name < w[1].name));
        assert_eq!(all.iter().filter(|f| f.class.is_some()).count(), 12);
    }

    #[test]
    fn every_value_has_provenance() {
        for text in SOURCES.iter().map(|(_, t)| t) {
            let v: serde_json::Value = serde_json::from_str(text).unwrap();
            let fixtures = v.as_array().cloned().unwrap_or_else(|| vec![v.clone()]);
            for f in fixtures {
                for (k, e) in f["expected"].as_object().unwrap() {
                    assert!(e.get("provenance").is_some(), "{} {k}", f["name"]);
                }
            }
        }
    }

    #[test]
    fn all_fixtures_pass() {
        for res in verify_fixtures(None).unwrap() {
            let fails: Vec<_> = res.failures().collect();
            assert!(fails.is_empty(), "{}: {fails:#?}", res.name);
        }
    }

    #[test]
    fn filters() {
        assert!(verify_fixtures(Some("no-such-fixture")).unwrap().is_empty());
        let d = verify_fixtures(Some("exampleD")).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].inverse_lines, Some((5, 5)));
    }
}
