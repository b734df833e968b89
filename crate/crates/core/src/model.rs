//! The combinatorial Legendrian data model.
//!
//! A chord-generic Legendrian is carried as pure data: dimension, Euler
//! characteristic (of the manifold and of its cotangent bundle), a set of
//! labeled Reeb chords with exact rational actions and signs, Morse
//! perturbation points, and a Maslov vector over named basis labels.  The
//! Thurston-Bennequin number of such a model is the signed chord count.
//!
//! Chord signs are input data, not derived from tangent-plane geometry;
//! constructors embed the published signs of the standard examples.

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feasibility::{LinearConstraint, LinearSystem};
use crate::rational::Rational;
use crate::sign::Sign;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid model: {0:?}")]
    InvalidModel(Vec<String>),
    #[error("no built-in chord sign for a Whitney sphere of dimension {0}; pass one explicitly")]
    UnknownWhitneySign(u32),
    #[error("cancelling pair must satisfy za > zb > 0 (got za={za}, zb={zb})")]
    BadChordOrder { za: Rational, zb: Rational },
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("no action supplied for chord `{0}`")]
    MissingAction(String),
    #[error("action supplied for unknown chord `{0}`")]
    UnexpectedAction(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

/// A Reeb chord: the action is the chord's length, the sign compares the
/// orientation of the two projected tangent planes with the ambient one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReebChord {
    pub label: String,
    pub action: Rational,
    pub sign: Sign,
}

impl ReebChord {
    pub fn new(label: impl Into<String>, action: Rational, sign: Sign) -> Self {
        ReebChord {
            label: label.into(),
            action,
            sign,
        }
    }
}

/// A labeled Morse critical point with its index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseCritical {
    pub label: String,
    pub index: u32,
}

impl MorseCritical {
    pub fn new(label: impl Into<String>, index: u32) -> Self {
        MorseCritical {
            label: label.into(),
            index,
        }
    }
}

/// A chord-generic Legendrian as combinatorial data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegendrianModel {
    pub dim: u32,
    pub euler: i64,
    pub cotangent_euler: i64,
    pub chords: Vec<ReebChord>,
    pub morse: Vec<MorseCritical>,
    pub maslov: IndexMap<String, i64>,
}

/// Outcome of validating a model; violations are data, not failures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            write!(f, "ok")
        } else {
            write!(f, "{}", self.violations.join("; "))
        }
    }
}

/// `(-1)^(dim(dim+1)/2) * euler`, the Euler characteristic convention for
/// the cotangent bundle, pinned by chi(T*S^2) = -2 and chi(T*S^4) = 2.
pub fn cotangent_euler(dim: u32, euler: i64) -> i64 {
    let parity = ((dim as u64 * (dim as u64 + 1) / 2) % 2) as u32;
    Sign::parity(parity).as_i64() * euler
}

/// Sign carried by a Morse critical point of a model of dimension `dim`:
/// `(-1)^(dim(dim+1)/2) * (-1)^index`.  With this convention the signed
/// count of critical points equals `cotangent_euler`, which is what the
/// product tb formula requires of the Morse terms.
pub fn morse_sign(dim: u32, index: u32) -> Sign {
    let prefactor = Sign::parity(((dim as u64 * (dim as u64 + 1) / 2) % 2) as u32);
    prefactor * Sign::parity(index)
}

impl LegendrianModel {
    /// Checks every structural invariant and lists each violation by name.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.dim == 0 {
            violations.push("dimension must be positive".to_string());
        }
        let mut chord_labels = BTreeMap::new();
        for c in &self.chords {
            *chord_labels.entry(c.label.as_str()).or_insert(0u32) += 1;
            if !c.action.is_positive() {
                violations.push(format!("chord `{}` must have positive action", c.label));
            }
        }
        for (label, count) in chord_labels {
            if count > 1 {
                violations.push(format!("duplicate chord label `{label}`"));
            }
        }
        if self.morse.is_empty() {
            violations.push("Morse data must be nonempty".to_string());
        }
        let mut morse_labels = BTreeMap::new();
        for m in &self.morse {
            *morse_labels.entry(m.label.as_str()).or_insert(0u32) += 1;
            if m.index > self.dim {
                violations.push(format!(
                    "Morse point `{}` has index {} outside [0, {}]",
                    m.label, m.index, self.dim
                ));
            }
        }
        for (label, count) in morse_labels {
            if count > 1 {
                violations.push(format!("duplicate Morse label `{label}`"));
            }
        }
        let signed: i64 = self
            .morse
            .iter()
            .map(|m| Sign::parity(m.index).as_i64())
            .sum();
        if signed != self.euler {
            violations.push("Morse–Euler consistency".to_string());
        }
        if self.dim % 2 == 1 && (self.euler != 0 || self.cotangent_euler != 0) {
            violations.push("odd dimension forces euler 0".to_string());
        }
        if self.cotangent_euler != cotangent_euler(self.dim, self.euler) {
            violations.push("cotangent consistency".to_string());
        }
        ValidationReport {
            ok: violations.is_empty(),
            violations,
        }
    }

    fn require_valid(&self) -> Result<(), ModelError> {
        let report = self.validate();
        if report.ok {
            Ok(())
        } else {
            Err(ModelError::InvalidModel(report.violations))
        }
    }

    /// tb as the signed count of Reeb chords.
    pub fn chord_sum_tb(&self) -> Result<i64, ModelError> {
        self.require_valid()?;
        Ok(self.chords.iter().map(|c| c.sign.as_i64()).sum())
    }

    /// Signed Morse count; equals `cotangent_euler` on valid models.
    pub fn morse_sign_sum(&self) -> i64 {
        self.morse
            .iter()
            .map(|m| morse_sign(self.dim, m.index).as_i64())
            .sum()
    }

    pub fn action_set(&self) -> Vec<&Rational> {
        self.chords.iter().map(|c| &c.action).collect()
    }

    /// Appends a cancelling chord pair `(za, +lead)` and `(zb, -lead)` under
    /// fresh labels; tb is unchanged.
    pub fn stabilize_with_cancelling_pair(
        &self,
        za: Rational,
        zb: Rational,
        lead_sign: Sign,
    ) -> Result<LegendrianModel, ModelError> {
        self.require_valid()?;
        if !(za > zb && zb.is_positive()) {
            return Err(ModelError::BadChordOrder { za, zb });
        }
        let mut k = 1usize;
        let (la, lb) = loop {
            let la = format!("s{k}a");
            let lb = format!("s{k}b");
            if !self.chords.iter().any(|c| c.label == la || c.label == lb) {
                break (la, lb);
            }
            k += 1;
        };
        let mut out = self.clone();
        out.chords.push(ReebChord::new(la, za, lead_sign));
        out.chords.push(ReebChord::new(lb, zb, -lead_sign));
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<LegendrianModel, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// The one-double-point Legendrian sphere of dimension `n`, with the chord
/// sign taken from the built-in table {1: -1, 2: +1, 4: -1}.
pub fn whitney(n: u32, action: Rational) -> Result<LegendrianModel, ModelError> {
    let sign = match n {
        1 | 4 => Sign::Minus,
        2 => Sign::Plus,
        _ => return Err(ModelError::UnknownWhitneySign(n)),
    };
    Ok(whitney_with_sign(n, action, sign))
}

/// Whitney sphere with an explicitly supplied chord sign, for dimensions not
/// covered by the built-in table.
pub fn whitney_with_sign(n: u32, action: Rational, sign: Sign) -> LegendrianModel {
    let euler = 1 + Sign::parity(n).as_i64();
    let mut maslov = IndexMap::new();
    maslov.insert("g".to_string(), 0i64);
    LegendrianModel {
        dim: n,
        euler,
        cotangent_euler: cotangent_euler(n, euler),
        chords: vec![ReebChord::new("a", action, sign)],
        morse: vec![
            MorseCritical::new("m0", 0),
            MorseCritical::new(format!("m{n}"), n),
        ],
        maslov,
    }
}

/// The built-in knot fixtures: a once-stabilized unknot, an unknot carrying
/// an extra kink pair, and a maximal-tb right trefoil.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureName {
    StabilizedUnknot,
    R1Unknot,
    Trefoil,
}

impl FixtureName {
    pub fn parse(name: &str) -> Result<FixtureName, ModelError> {
        match name {
            "stabilized_unknot" | "k1" => Ok(FixtureName::StabilizedUnknot),
            "r1_unknot" | "k2" => Ok(FixtureName::R1Unknot),
            "trefoil" | "k3" => Ok(FixtureName::Trefoil),
            _ => Err(ModelError::UnknownFixture(name.to_string())),
        }
    }

    pub fn chord_data(self) -> Vec<(&'static str, Sign)> {
        match self {
            FixtureName::StabilizedUnknot => {
                vec![("a1", Sign::Minus), ("a2", Sign::Minus)]
            }
            FixtureName::R1Unknot => vec![
                ("b1", Sign::Minus),
                ("b2", Sign::Minus),
                ("b3", Sign::Plus),
            ],
            FixtureName::Trefoil => vec![
                ("c1", Sign::Minus),
                ("c2", Sign::Minus),
                ("c3", Sign::Plus),
                ("c4", Sign::Plus),
                ("c5", Sign::Plus),
            ],
        }
    }

    /// The fixture's action constraints: positivity plus the dominance
    /// inequalities its diagram's face areas impose.
    pub fn constraint_system(self) -> LinearSystem {
        let labels: Vec<&str> = self.chord_data().iter().map(|(l, _)| *l).collect();
        let mut sys = LinearSystem::new(labels.iter().map(|l| l.to_string()).collect());
        for l in &labels {
            sys.push(LinearConstraint::positive(l)).unwrap();
        }
        let dominances: Vec<(&str, &str)> = match self {
            FixtureName::StabilizedUnknot => vec![],
            FixtureName::R1Unknot => vec![("b1", "b3"), ("b2", "b3")],
            FixtureName::Trefoil => vec![
                ("c1", "c3"),
                ("c1", "c4"),
                ("c1", "c5"),
                ("c2", "c3"),
                ("c2", "c4"),
                ("c2", "c5"),
            ],
        };
        for (hi, lo) in dominances {
            sys.push(LinearConstraint::dominates(hi, lo)).unwrap();
        }
        sys
    }
}

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FixtureName::StabilizedUnknot => "stabilized_unknot",
            FixtureName::R1Unknot => "r1_unknot",
            FixtureName::Trefoil => "trefoil",
        };
        write!(f, "{name}")
    }
}

/// Builds the named knot fixture at the given chord actions, together with
/// its constraint system.  The assignment must cover every chord label and
/// satisfy the constraints.
pub fn knot_fixture(
    name: FixtureName,
    actions: &BTreeMap<String, Rational>,
) -> Result<(LegendrianModel, LinearSystem), ModelError> {
    let data = name.chord_data();
    for label in actions.keys() {
        if !data.iter().any(|(l, _)| l == label) {
            return Err(ModelError::UnexpectedAction(label.clone()));
        }
    }
    let mut chords = Vec::new();
    for (label, sign) in &data {
        let action = actions
            .get(*label)
            .ok_or_else(|| ModelError::MissingAction(label.to_string()))?;
        chords.push(ReebChord::new(*label, action.clone(), *sign));
    }
    let sys = name.constraint_system();
    let point: BTreeMap<String, Rational> = actions.clone();
    for c in &sys.constraints {
        if !c.satisfied_by(&point) {
            return Err(ModelError::ConstraintViolated(c.to_string()));
        }
    }
    let mut maslov = IndexMap::new();
    maslov.insert("g".to_string(), 0i64);
    let model = LegendrianModel {
        dim: 1,
        euler: 0,
        cotangent_euler: 0,
        chords,
        morse: vec![MorseCritical::new("m0", 0), MorseCritical::new("m1", 1)],
        maslov,
    };
    debug_assert!(model.validate().ok);
    Ok((model, sys))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn whitney_constructors_validate_and_count() {
        let w1 = whitney(1, r("1")).unwrap();
        assert!(w1.validate().ok);
        assert_eq!(w1.chord_sum_tb().unwrap(), -1);
        assert_eq!(w1.euler, 0);
        assert_eq!(w1.cotangent_euler, 0);

        let w2 = whitney(2, r("1")).unwrap();
        assert_eq!(w2.chord_sum_tb().unwrap(), 1);
        assert_eq!(w2.euler, 2);
        assert_eq!(w2.cotangent_euler, -2);

        let w4 = whitney(4, r("1")).unwrap();
        assert_eq!(w4.chord_sum_tb().unwrap(), -1);
        assert_eq!(w4.cotangent_euler, 2);

        assert_eq!(whitney(3, r("1")).unwrap_err(), ModelError::UnknownWhitneySign(3));
        let w3 = whitney_with_sign(3, r("1"), Sign::Plus);
        assert!(w3.validate().ok);
    }

    #[test]
    fn cotangent_convention() {
        assert_eq!(cotangent_euler(2, 2), -2);
        assert_eq!(cotangent_euler(4, 2), 2);
        assert_eq!(cotangent_euler(1, 0), 0);
        assert_eq!(cotangent_euler(3, 0), 0);
        // applying the parity factor twice returns euler
        for dim in 1..=6 {
            for e in [-4i64, -2, 0, 2, 4] {
                assert_eq!(cotangent_euler(dim, cotangent_euler(dim, e)), e);
            }
        }
    }

    #[test]
    fn morse_sign_sums_to_cotangent_euler() {
        for n in 1..=5 {
            let w = whitney_with_sign(n, r("1"), Sign::Plus);
            assert_eq!(w.morse_sign_sum(), w.cotangent_euler);
        }
    }

    #[test]
    fn validation_names_each_violation() {
        // morse {index 0} with euler 0 breaks Morse–Euler consistency
        let m = LegendrianModel {
            dim: 2,
            euler: 0,
            cotangent_euler: 0,
            chords: vec![],
            morse: vec![MorseCritical::new("m0", 0)],
            maslov: IndexMap::new(),
        };
        let report = m.validate();
        assert!(!report.ok);
        assert!(report.violations.contains(&"Morse–Euler consistency".to_string()));

        let m = LegendrianModel {
            dim: 3,
            euler: 2,
            cotangent_euler: 2,
            chords: vec![],
            morse: vec![MorseCritical::new("m0", 0), MorseCritical::new("m2", 2)],
            maslov: IndexMap::new(),
        };
        let report = m.validate();
        assert!(report
            .violations
            .contains(&"odd dimension forces euler 0".to_string()));

        let mut bad = whitney(1, r("1")).unwrap();
        bad.chords.push(ReebChord::new("a", r("2"), Sign::Plus));
        bad.chords.push(ReebChord::new("z", r("-1"), Sign::Plus));
        let report = bad.validate();
        assert!(report.violations.iter().any(|v| v.contains("duplicate chord label `a`")));
        assert!(report.violations.iter().any(|v| v.contains("positive action")));
        assert!(bad.chord_sum_tb().is_err());
    }

    #[test]
    fn stabilization_preserves_tb() {
        let w = whitney(1, r("1")).unwrap();
        let s = w
            .stabilize_with_cancelling_pair(r("3"), r("2"), Sign::Plus)
            .unwrap();
        assert_eq!(s.chords.len(), 3);
        assert_eq!(s.chord_sum_tb().unwrap(), -1);
        // twice, with distinct fresh labels
        let s2 = s
            .stabilize_with_cancelling_pair(r("7"), r("5"), Sign::Minus)
            .unwrap();
        assert_eq!(s2.chords.len(), 5);
        assert_eq!(s2.chord_sum_tb().unwrap(), -1);
        assert!(s2.validate().ok);

        assert!(matches!(
            w.stabilize_with_cancelling_pair(r("2"), r("2"), Sign::Plus),
            Err(ModelError::BadChordOrder { .. })
        ));
    }

    #[test]
    fn fixtures_embed_published_signs() {
        let mut actions = BTreeMap::new();
        actions.insert("a1".to_string(), r("5"));
        actions.insert("a2".to_string(), r("5"));
        let (k1, _) = knot_fixture(FixtureName::StabilizedUnknot, &actions).unwrap();
        assert_eq!(k1.chord_sum_tb().unwrap(), -2);

        let mut actions = BTreeMap::new();
        for (l, v) in [("c1", "10"), ("c2", "10"), ("c3", "1"), ("c4", "1"), ("c5", "1")] {
            actions.insert(l.to_string(), r(v));
        }
        let (k3, sys) = knot_fixture(FixtureName::Trefoil, &actions).unwrap();
        assert_eq!(k3.chord_sum_tb().unwrap(), 1);
        assert!(sys.is_feasible());
    }

    #[test]
    fn fixtures_reject_constraint_violations() {
        let mut actions = BTreeMap::new();
        actions.insert("b1".to_string(), r("1"));
        actions.insert("b2".to_string(), r("1"));
        actions.insert("b3".to_string(), r("5"));
        let err = knot_fixture(FixtureName::R1Unknot, &actions).unwrap_err();
        match err {
            ModelError::ConstraintViolated(c) => assert!(c.contains("b1") && c.contains("b3")),
            other => panic!("expected ConstraintViolated, got {other:?}"),
        }

        let mut missing = BTreeMap::new();
        missing.insert("b1".to_string(), r("1"));
        assert!(matches!(
            knot_fixture(FixtureName::R1Unknot, &missing),
            Err(ModelError::MissingAction(_))
        ));
    }

    #[test]
    fn model_json_round_trip() {
        let w = whitney(2, r("7/3")).unwrap();
        let text = w.to_json();
        let back = LegendrianModel::from_json(&text).unwrap();
        assert_eq!(w, back);
        // integer shorthand accepted on input
        let shorthand = text.replace("\"7/3\"", "\"4\"");
        let m = LegendrianModel::from_json(&shorthand).unwrap();
        assert_eq!(m.chords[0].action, r("4"));
    }
}
