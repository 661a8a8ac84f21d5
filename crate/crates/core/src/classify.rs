//! Grouping of families by birational fingerprint.
//!
//! Equal fingerprints mean identical reduced `Mbar` family equations up to a
//! permutation of `u_1..u_n`, which is sufficient for birational equivalence.
//! Different fingerprints are never read as non-equivalence.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::equations::{certified_fingerprint, fingerprint, left_eigenvector, EquationSet, Fingerprint, LinearRelation, MonomialRelation, Param};
use crate::error::{Error, Result};
use crate::fixtures::registry;
use crate::report::MatrixInput;
use crate::serial::{int, int_vec};
use crate::shioda::analyze;

/// One family to classify: a named matrix or polynomial, with optional label and errata.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub name: String,
    #[serde(flatten)]
    pub input: MatrixInput,
    /// Class the family is expected to fall into, if known.
    #[serde(default)]
    pub class: Option<String>,
    /// Corrections applied to the printed data.
    #[serde(default)]
    pub errata: Vec<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<FamilyEntry>),
    One(Box<FamilyEntry>),
}

/// Accepts a single entry or an array; fixture files parse as well.
pub fn parse_families(text: &str) -> Result<Vec<FamilyEntry>> {
    match serde_json::from_str::<OneOrMany>(text) {
        Ok(OneOrMany::Many(v)) => Ok(v),
        Ok(OneOrMany::One(f)) => Ok(vec![*f]),
        Err(e) => Err(Error::Parse(format!("families: {e}"))),
    }
}

/// The labelled families of the built-in registry, sorted by name.
pub fn builtin_families() -> Result<Vec<FamilyEntry>> {
    Ok(registry()?
        .into_iter()
        .filter(|f| f.class.is_some())
        .map(|f| FamilyEntry { name: f.name, input: f.input, class: f.class, errata: f.errata })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedFamily {
    pub name: String,
    pub class: Option<String>,
    #[serde(with = "int_vec")]
    pub weights: Vec<BigInt>,
    #[serde(with = "int")]
    pub d: BigInt,
    #[serde(with = "int_vec")]
    pub q_prime: Vec<BigInt>,
    pub fingerprint: Fingerprint,
    /// Primitive positive `c` with `c A = lambda e^t`.
    #[serde(with = "int_vec")]
    pub certificate: Vec<BigInt>,
    #[serde(with = "int")]
    pub lambda: BigInt,
    /// The certificate reproduces the fingerprint.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintClass {
    pub fingerprint: Fingerprint,
    pub members: Vec<String>,
    /// Reduced family equations shared by all members, exponents sorted.
    pub equations: EquationSet,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub family: String,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub classes: Vec<FingerprintClass>,
    pub families: Vec<ClassifiedFamily>,
    pub substitutions: Vec<Substitution>,
    /// Disagreements between labels, fingerprints and certificates.
    pub deviations: Vec<String>,
}

impl Classification {
    pub fn is_clean(&self) -> bool {
        self.deviations.is_empty()
    }

    /// Member lists of the classes, in class order.
    pub fn partition(&self) -> Vec<Vec<String>> {
        self.classes.iter().map(|c| c.members.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("classification serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.classes.iter().enumerate() {
            out.push_str(&format!(
                "class {}: fingerprint {}{}\n  members: {}\n  same reduced Mbar equations: {}\n",
                i + 1,
                c.fingerprint,
                if c.certified { " (certified)" } else { " (NOT certified)" },
                c.members.join(", "),
                c.equations.to_text()
            ));
        }
        for f in &self.families {
            out.push_str(&format!(
                "{}: weights {} d={} c={} cA={}e\n",
                f.name,
                crate::lattice::format_vec(&f.weights),
                f.d,
                crate::lattice::format_vec(&f.certificate),
                f.lambda
            ));
        }
        if !self.substitutions.is_empty() {
            out.push_str("substitutions:\n");
            for s in &self.substitutions {
                out.push_str(&format!("  {}: {}\n", s.family, s.note));
            }
        }
        if !self.deviations.is_empty() {
            out.push_str("deviations:\n");
            for d in &self.deviations {
                out.push_str(&format!("  {d}\n"));
            }
        }
        out
    }
}

fn classify_one(f: &FamilyEntry) -> Result<ClassifiedFamily> {
    let a = f.input.exponent_matrix()?;
    let data = analyze(&a)?;
    let fp = fingerprint(&data)?;
    let (certificate, lambda) = left_eigenvector(&a)?
        .ok_or_else(|| Error::Internal("no positive left eigenvector although q' is positive".into()))?;
    let certified = certified_fingerprint(&a)?.as_ref() == Some(&fp);
    Ok(ClassifiedFamily {
        name: f.name.clone(),
        class: f.class.clone(),
        weights: data.q_reduced.clone(),
        d: data.d.clone(),
        q_prime: data.q_prime.clone(),
        fingerprint: fp,
        certificate,
        lambda,
        certified,
    })
}

/// Groups the families by fingerprint; classes are ordered by their first member name.
pub fn classify(families: &[FamilyEntry]) -> Result<Classification> {
    let mut classified = families
        .iter()
        .map(|f| classify_one(f).map_err(|e| e.named(&f.name)))
        .collect::<Result<Vec<_>>>()?;
    classified.sort_by(|a, b| a.name.cmp(&b.name));

    let mut by_fp: BTreeMap<Fingerprint, Vec<&ClassifiedFamily>> = BTreeMap::new();
    for f in &classified {
        by_fp.entry(f.fingerprint.clone()).or_default().push(f);
    }
    let mut classes: Vec<FingerprintClass> = by_fp
        .into_iter()
        .map(|(fp, members)| FingerprintClass {
            equations: EquationSet {
                linear: LinearRelation { coefficients: vec![BigInt::one(); fp.exponents.len()], t: Param::symbolic() },
                relation: MonomialRelation { power: fp.degree.clone(), exponents: fp.exponents.clone() },
            },
            certified: members.iter().all(|m| m.certified),
            members: members.iter().map(|m| m.name.clone()).collect(),
            fingerprint: fp,
        })
        .collect();
    classes.sort_by(|a, b| a.members[0].cmp(&b.members[0]));

    let mut deviations = Vec::new();
    for f in classified.iter().filter(|f| !f.certified) {
        deviations.push(format!(
            "{}: left eigenvector c={} with cA={}e does not reproduce fingerprint {} (q'={})",
            f.name,
            crate::lattice::format_vec(&f.certificate),
            f.lambda,
            f.fingerprint,
            crate::lattice::format_vec(&f.q_prime)
        ));
    }
    let mut by_label: BTreeMap<&str, Vec<&ClassifiedFamily>> = BTreeMap::new();
    for f in &classified {
        if let Some(c) = &f.class {
            by_label.entry(c).or_default().push(f);
        }
    }
    for (label, members) in &by_label {
        if let Some(other) = members.iter().find(|m| m.fingerprint != members[0].fingerprint) {
            deviations.push(format!(
                "class {label}: {} has fingerprint {} but {} has {}",
                members[0].name, members[0].fingerprint, other.name, other.fingerprint
            ));
        }
    }
    for c in &classes {
        let labels: Vec<&str> = c
            .members
            .iter()
            .filter_map(|m| classified.iter().find(|f| &f.name == m).and_then(|f| f.class.as_deref()))
            .collect();
        if labels.windows(2).any(|w| w[0] != w[1]) {
            deviations.push(format!("fingerprint {} joins classes {}", c.fingerprint, labels.join(", ")));
        }
    }

    let mut substitutions: Vec<Substitution> = families
        .iter()
        .flat_map(|f| f.errata.iter().map(|note| Substitution { family: f.name.clone(), note: note.clone() }))
        .collect();
    substitutions.sort_by(|a, b| a.family.cmp(&b.family));

    Ok(Classification { classes, families: classified, substitutions, deviations })
}
