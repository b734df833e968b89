//! Planar Lagrangian-projection knot diagrams from PD codes.
//!
//! A crossing is written `X[a,b,c,d]`: the four arc labels counterclockwise
//! starting from the incoming under-strand, where "under" means the sheet
//! with the lower z-coordinate.  An `outer=k` directive is required because
//! an abstract PD code does not know which face is unbounded: the unbounded
//! face is the one lying to the left of arc `k` in crossing order, and the
//! area identity applies to bounded faces only.
//!
//! Faces come from the rotation system the counterclockwise tuples define;
//! each face is traversed with its region on the left, so the corner signs
//! below say whether the boundary jumps from the lower sheet to the upper
//! one (positive) or back (negative) at each crossing.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::feasibility::{LinearConstraint, LinearSystem, Relation};
use crate::model::{LegendrianModel, ModelError, MorseCritical, ReebChord};
use crate::rational::Rational;
use crate::sign::Sign;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid diagram: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A validated planar diagram: crossings, a consistent orientation of the
/// arcs, and the designated unbounded face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PDCode {
    crossings: Vec<[u32; 4]>,
    outer_face_arc: u32,
    /// Incoming occurrence of each arc (crossing, slot), 0-based arc index.
    heads: Vec<(usize, u8)>,
    occurrences: Vec<[(usize, u8); 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FaceCorner {
    /// 1-based crossing id, matching the constraint variable `c{id}`.
    pub crossing: usize,
    /// Quadrant between tuple slots `position` and `position + 1 (mod 4)`.
    pub position: u8,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Face {
    pub corners: Vec<FaceCorner>,
    pub unbounded: bool,
}

/// Parses whitespace-separated `X[a,b,c,d]` tokens plus one `outer=k`
/// directive.  Lines may carry `#` comments.
pub fn parse_pd(text: &str) -> Result<PDCode, DiagramError> {
    let mut crossings = Vec::new();
    let mut outer = None;
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.split_whitespace() {
            if let Some(rest) = token.strip_prefix("outer=") {
                let k: u32 = rest
                    .parse()
                    .map_err(|_| DiagramError::Parse(format!("bad outer directive `{token}`")))?;
                if outer.replace(k).is_some() {
                    return Err(DiagramError::Parse("duplicate outer directive".into()));
                }
            } else if let Some(body) = token
                .strip_prefix("X[")
                .and_then(|t| t.strip_suffix(']'))
            {
                let labels: Result<Vec<u32>, _> =
                    body.split(',').map(|p| p.trim().parse::<u32>()).collect();
                let labels =
                    labels.map_err(|_| DiagramError::Parse(format!("malformed token `{token}`")))?;
                if labels.len() != 4 {
                    return Err(DiagramError::Parse(format!(
                        "crossing `{token}` needs exactly 4 arc labels"
                    )));
                }
                crossings.push([labels[0], labels[1], labels[2], labels[3]]);
            } else {
                return Err(DiagramError::Parse(format!("unrecognized token `{token}`")));
            }
        }
    }
    let outer = outer.ok_or_else(|| DiagramError::Parse("missing outer directive".into()))?;
    PDCode::build(crossings, outer)
}

impl PDCode {
    pub fn build(crossings: Vec<[u32; 4]>, outer_face_arc: u32) -> Result<PDCode, DiagramError> {
        let n = crossings.len();
        if n == 0 {
            return Err(DiagramError::Invalid("diagram has no crossings".into()));
        }
        let arc_count = 2 * n;
        let mut occ: Vec<Vec<(usize, u8)>> = vec![Vec::new(); arc_count];
        for (c, tuple) in crossings.iter().enumerate() {
            for (s, &label) in tuple.iter().enumerate() {
                if label == 0 || label as usize > arc_count {
                    return Err(DiagramError::Invalid(format!(
                        "arc label {label} outside 1..{arc_count}"
                    )));
                }
                occ[label as usize - 1].push((c, s as u8));
            }
        }
        let mut occurrences = Vec::with_capacity(arc_count);
        for (i, list) in occ.iter().enumerate() {
            if list.len() != 2 {
                return Err(DiagramError::Invalid(format!(
                    "arc {} occurs {} times, expected exactly 2",
                    i + 1,
                    list.len()
                )));
            }
            occurrences.push([list[0], list[1]]);
        }
        if outer_face_arc == 0 || outer_face_arc as usize > arc_count {
            return Err(DiagramError::Invalid(format!(
                "outer face arc {outer_face_arc} outside 1..{arc_count}"
            )));
        }

        // Walk the knot once: under-strands pass slot 0 -> 2, over-strands
        // 1 -> 3 or 3 -> 1.  The walk both orients every arc and certifies
        // the diagram is a single connected closed curve.
        let mut heads: Vec<Option<(usize, u8)>> = vec![None; arc_count];
        let start_arc = crossings[0][0] as usize - 1;
        let start_head = (0usize, 0u8);
        let mut arc = start_arc;
        let mut head = start_head;
        let mut visited = 0usize;
        loop {
            if heads[arc].is_some() {
                return Err(DiagramError::Invalid(format!(
                    "arc {} is incoming at two crossings; arcs must chain head-to-tail",
                    arc + 1
                )));
            }
            heads[arc] = Some(head);
            visited += 1;
            let (c, s) = head;
            let exit = match s {
                0 => 2,
                1 => 3,
                3 => 1,
                _ => {
                    return Err(DiagramError::Invalid(format!(
                        "arc {} enters a crossing at the outgoing under slot",
                        arc + 1
                    )))
                }
            };
            let next_label = crossings[c][exit as usize] as usize - 1;
            let tail = (c, exit);
            let [o0, o1] = occurrences[next_label];
            let next_head = if o0 == tail {
                o1
            } else if o1 == tail {
                o0
            } else {
                return Err(DiagramError::Invalid(format!(
                    "arc {} does not occupy its own exit port",
                    next_label + 1
                )));
            };
            if next_label == start_arc && next_head == start_head {
                break;
            }
            if visited > arc_count {
                return Err(DiagramError::Invalid(
                    "orientation walk does not close up".into(),
                ));
            }
            arc = next_label;
            head = next_head;
        }
        if visited != arc_count {
            return Err(DiagramError::Invalid(format!(
                "diagram is not a single closed curve: walk covered {visited} of {arc_count} arcs"
            )));
        }
        let heads: Vec<(usize, u8)> = heads.into_iter().map(|h| h.unwrap()).collect();

        let pd = PDCode {
            crossings,
            outer_face_arc,
            heads,
            occurrences,
        };
        // Planarity: the rotation system must satisfy Euler's formula.
        let f = pd.face_orbits().len();
        let (v, e) = (n as i64, arc_count as i64);
        if v - e + f as i64 != 2 {
            return Err(DiagramError::Invalid(format!(
                "rotation system is not planar: V - E + F = {}",
                v - e + f as i64
            )));
        }
        Ok(pd)
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn crossings(&self) -> &[[u32; 4]] {
        &self.crossings
    }

    pub fn outer_face_arc(&self) -> u32 {
        self.outer_face_arc
    }

    /// Constraint variable for a 0-based crossing index.
    pub fn variable(&self, crossing: usize) -> String {
        format!("c{}", crossing + 1)
    }

    /// Slot (1 or 3) where the over-strand enters each crossing.
    fn over_in_slot(&self, c: usize) -> u8 {
        let arc1 = self.crossings[c][1] as usize - 1;
        if self.heads[arc1] == (c, 1) {
            1
        } else {
            3
        }
    }

    /// Sign of each crossing from the strand orientations: with the under
    /// strand entering at slot 0, the over strand entering at slot 3 gives a
    /// positively oriented (over, under) frame, and slot 1 a negative one.
    pub fn crossing_signs(&self) -> Vec<Sign> {
        (0..self.crossings.len())
            .map(|c| {
                if self.over_in_slot(c) == 3 {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            })
            .collect()
    }

    /// The writhe of the projection: signed crossing count.
    pub fn tb(&self) -> i64 {
        self.crossing_signs().iter().map(|s| s.as_i64()).sum()
    }

    /// Face orbits as dart cycles; a dart is (arc index, occurrence index
    /// it is heading to).
    fn face_orbits(&self) -> Vec<Vec<(usize, u8)>> {
        let arc_count = self.occurrences.len();
        let mut seen = vec![[false; 2]; arc_count];
        let mut orbits = Vec::new();
        for arc in 0..arc_count {
            for to in 0..2u8 {
                if seen[arc][to as usize] {
                    continue;
                }
                let mut orbit = Vec::new();
                let (mut a, mut t) = (arc, to);
                loop {
                    if seen[a][t as usize] {
                        break;
                    }
                    seen[a][t as usize] = true;
                    orbit.push((a, t));
                    let (c, s) = self.occurrences[a][t as usize];
                    let exit = (s + 3) % 4;
                    let next_arc = self.crossings[c][exit as usize] as usize - 1;
                    let [o0, _] = self.occurrences[next_arc];
                    let j: u8 = if o0 == (c, exit) { 0 } else { 1 };
                    a = next_arc;
                    t = 1 - j;
                }
                orbits.push(orbit);
            }
        }
        orbits
    }

    /// All faces of the planar diagram with signed corners; the face left of
    /// the outer arc (in its orientation) is tagged unbounded.
    pub fn faces(&self) -> Vec<Face> {
        let outer_arc = self.outer_face_arc as usize - 1;
        let outer_head = self.heads[outer_arc];
        let outer_to = if self.occurrences[outer_arc][0] == outer_head {
            0u8
        } else {
            1u8
        };
        self.face_orbits()
            .into_iter()
            .map(|orbit| {
                let unbounded = orbit.contains(&(outer_arc, outer_to));
                let corners = orbit
                    .iter()
                    .map(|&(a, t)| {
                        let (c, s) = self.occurrences[a][t as usize];
                        let position = (s + 3) % 4;
                        FaceCorner {
                            crossing: c + 1,
                            position,
                            sign: if position % 2 == 1 {
                                Sign::Plus
                            } else {
                                Sign::Minus
                            },
                        }
                    })
                    .collect();
                Face { corners, unbounded }
            })
            .collect()
    }

    /// One strict inequality per bounded face (positive-corner actions minus
    /// negative-corner actions exceed zero), plus positivity per crossing.
    pub fn area_constraints(&self) -> LinearSystem {
        let vars: Vec<String> = (0..self.crossings.len()).map(|c| self.variable(c)).collect();
        let mut sys = LinearSystem::new(vars);
        for c in 0..self.crossings.len() {
            sys.constraints
                .push(LinearConstraint::positive(&self.variable(c)));
        }
        for face in self.faces() {
            if face.unbounded {
                continue;
            }
            let mut net: BTreeMap<String, i64> = BTreeMap::new();
            for corner in &face.corners {
                *net.entry(self.variable(corner.crossing - 1)).or_insert(0) +=
                    corner.sign.as_i64();
            }
            let lhs: BTreeMap<String, Rational> = net
                .into_iter()
                .filter(|(_, coeff)| *coeff != 0)
                .map(|(v, coeff)| (v, Rational::integer(coeff)))
                .collect();
            sys.constraints.push(LinearConstraint {
                lhs,
                rel: Relation::Gt,
                rhs: Rational::zero(),
            });
        }
        sys
    }

    /// Lifts the diagram to a Legendrian model: dimension 1, signs from the
    /// crossings, actions supplied by the caller and checked against the
    /// area constraints.
    pub fn to_model(
        &self,
        actions: &BTreeMap<String, Rational>,
    ) -> Result<LegendrianModel, DiagramError> {
        let signs = self.crossing_signs();
        let mut chords = Vec::new();
        let mut point = BTreeMap::new();
        for c in 0..self.crossings.len() {
            let var = self.variable(c);
            let action = actions
                .get(&var)
                .ok_or_else(|| ModelError::MissingAction(var.clone()))?;
            point.insert(var.clone(), action.clone());
            chords.push(ReebChord::new(var, action.clone(), signs[c]));
        }
        for label in actions.keys() {
            if !point.contains_key(label) {
                return Err(ModelError::UnexpectedAction(label.clone()).into());
            }
        }
        for constraint in &self.area_constraints().constraints {
            if !constraint.satisfied_by(&point) {
                return Err(ModelError::ConstraintViolated(constraint.to_string()).into());
            }
        }
        let mut maslov = indexmap::IndexMap::new();
        maslov.insert("g".to_string(), 0i64);
        Ok(LegendrianModel {
            dim: 1,
            euler: 0,
            cotangent_euler: 0,
            chords,
            morse: vec![MorseCritical::new("m0", 0), MorseCritical::new("m1", 1)],
            maslov,
        })
    }
}

impl fmt::Display for PDCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for tuple in &self.crossings {
            writeln!(f, "X[{},{},{},{}]", tuple[0], tuple[1], tuple[2], tuple[3])?;
        }
        write!(f, "outer={}", self.outer_face_arc)
    }
}

pub const STABILIZED_UNKNOT_PD: &str = include_str!("../fixtures/stabilized_unknot.pd");
pub const R1_UNKNOT_PD: &str = include_str!("../fixtures/r1_unknot.pd");
pub const TREFOIL_PD: &str = include_str!("../fixtures/trefoil.pd");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_crossing_kink_parses() {
        let pd = parse_pd("X[1,2,2,1] outer=1").unwrap();
        assert_eq!(pd.crossing_count(), 1);
        assert_eq!(pd.faces().len(), 3);
    }

    #[test]
    fn arc_count_violations_are_rejected() {
        assert!(matches!(
            parse_pd("X[1,2,2,3] outer=1"),
            Err(DiagramError::Invalid(_))
        ));
        assert!(matches!(
            parse_pd("X[1,2,2,1]"),
            Err(DiagramError::Parse(_))
        ));
        assert!(matches!(
            parse_pd("X[1,2,2] outer=1"),
            Err(DiagramError::Parse(_))
        ));
        assert!(matches!(
            parse_pd("Y[1,2,2,1] outer=1"),
            Err(DiagramError::Parse(_))
        ));
    }

    #[test]
    fn two_component_links_are_rejected() {
        // two disjoint kinks wearing a shared label range
        let text = "X[1,2,2,1] X[3,4,4,3] outer=1";
        assert!(matches!(parse_pd(text), Err(DiagramError::Invalid(_))));
    }

    fn fixture(text: &str) -> PDCode {
        parse_pd(text).unwrap()
    }

    #[test]
    fn curated_fixture_signs_and_tb() {
        let k1 = fixture(STABILIZED_UNKNOT_PD);
        assert_eq!(
            k1.crossing_signs(),
            vec![Sign::Minus, Sign::Minus]
        );
        assert_eq!(k1.tb(), -2);

        let k2 = fixture(R1_UNKNOT_PD);
        assert_eq!(
            k2.crossing_signs(),
            vec![Sign::Minus, Sign::Minus, Sign::Plus]
        );
        assert_eq!(k2.tb(), -1);

        let k3 = fixture(TREFOIL_PD);
        assert_eq!(
            k3.crossing_signs(),
            vec![Sign::Minus, Sign::Minus, Sign::Plus, Sign::Plus, Sign::Plus]
        );
        assert_eq!(k3.tb(), 1);
    }

    /// Euler's formula pins the face counts: V - E + F = 2 with E = 2V.
    #[test]
    fn fixture_face_counts_match_euler() {
        for (text, v) in [
            (STABILIZED_UNKNOT_PD, 2usize),
            (R1_UNKNOT_PD, 3),
            (TREFOIL_PD, 5),
        ] {
            let pd = fixture(text);
            let faces = pd.faces();
            assert_eq!(faces.len(), v + 2);
            assert_eq!(faces.iter().filter(|f| f.unbounded).count(), 1);
            // each crossing contributes exactly 4 corners across all faces
            let mut per_crossing = vec![0usize; v];
            for face in &faces {
                for corner in &face.corners {
                    per_crossing[corner.crossing - 1] += 1;
                }
            }
            assert!(per_crossing.iter().all(|&c| c == 4));
            // every bounded face of a realizable diagram has a positive corner
            for face in faces.iter().filter(|f| !f.unbounded) {
                assert!(face.corners.iter().any(|c| c.sign == Sign::Plus));
            }
        }
    }

    #[test]
    fn orientation_reversal_keeps_signs() {
        // rewriting each tuple from the outgoing under-strand reverses both
        // strands; signs must not change
        let reverse = |pd: &PDCode| {
            let tuples: Vec<[u32; 4]> = pd
                .crossings()
                .iter()
                .map(|t| [t[2], t[3], t[0], t[1]])
                .collect();
            PDCode::build(tuples, pd.outer_face_arc()).unwrap()
        };
        for text in [STABILIZED_UNKNOT_PD, R1_UNKNOT_PD, TREFOIL_PD] {
            let pd = fixture(text);
            let rev = reverse(&pd);
            assert_eq!(pd.crossing_signs(), rev.crossing_signs());
        }
    }

    #[test]
    fn kink_constraints_reduce_to_positivity() {
        // outer=2 puts the two-negative-corner face outside, leaving the two
        // lobes bounded, each a single positive corner
        let pd = fixture("X[1,2,2,1] outer=2");
        let sys = pd.area_constraints();
        assert!(sys.is_feasible());
        let quoted = LinearSystem {
            vars: vec!["c1".into()],
            constraints: vec![LinearConstraint::positive("c1")],
        };
        assert!(sys.equivalent_to(&quoted).unwrap());
        // the other outer choice strands a negative lobe inside: infeasible
        let pd = fixture("X[1,2,2,1] outer=1");
        assert!(!pd.area_constraints().is_feasible());
    }

    #[test]
    fn diagram_converts_to_model() {
        let pd = fixture(R1_UNKNOT_PD);
        let mut actions = BTreeMap::new();
        actions.insert("c1".to_string(), "7".parse().unwrap());
        actions.insert("c2".to_string(), "9".parse().unwrap());
        actions.insert("c3".to_string(), "2".parse().unwrap());
        let model = pd.to_model(&actions).unwrap();
        assert!(model.validate().ok);
        assert_eq!(model.chord_sum_tb().unwrap(), pd.tb());

        let mut bad = actions.clone();
        bad.insert("c3".to_string(), "100".parse().unwrap());
        assert!(matches!(
            pd.to_model(&bad),
            Err(DiagramError::Model(ModelError::ConstraintViolated(_)))
        ));
    }
}
