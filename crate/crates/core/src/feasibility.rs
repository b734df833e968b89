//! Exact rational linear feasibility via Fourier-Motzkin elimination.
//!
//! Systems are small (the knot fixtures need ten variables) and the face-area
//! inequalities are strict, so exact projection beats floating-point LP here.
//! Strictness propagates through elimination: combining a strict bound with
//! anything yields a strict bound.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeasibilityError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("constraint has no nonzero coefficient")]
    EmptyConstraint,
    #[error("cannot negate an equality constraint")]
    NegatedEquality,
    #[error("system is infeasible")]
    Infeasible,
}

/// Relation of a linear constraint: `>`, `>=` or `=`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Gt,
    Ge,
    Eq,
}

impl Serialize for Relation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

impl<'de> Deserialize<'de> for Relation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            ">" => Ok(Relation::Gt),
            ">=" => Ok(Relation::Ge),
            "=" => Ok(Relation::Eq),
            _ => Err(serde::de::Error::custom(format!("bad relation `{s}`"))),
        }
    }
}

/// `sum(lhs[v] * v) REL rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub lhs: BTreeMap<String, Rational>,
    pub rel: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(lhs: Vec<(&str, Rational)>, rel: Relation, rhs: Rational) -> Self {
        let mut map = BTreeMap::new();
        for (v, c) in lhs {
            if !c.is_zero() {
                map.insert(v.to_string(), c);
            }
        }
        LinearConstraint { lhs: map, rel, rhs }
    }

    /// `a - b > 0`, the shape of every face-area and fixture inequality.
    pub fn dominates(a: &str, b: &str) -> Self {
        LinearConstraint::new(
            vec![(a, Rational::one()), (b, Rational::integer(-1))],
            Relation::Gt,
            Rational::zero(),
        )
    }

    /// `v > 0`.
    pub fn positive(v: &str) -> Self {
        LinearConstraint::new(vec![(v, Rational::one())], Relation::Gt, Rational::zero())
    }

    /// The complement of a strict or weak inequality.
    pub fn negated(&self) -> Result<Self, FeasibilityError> {
        let lhs = self.lhs.iter().map(|(v, c)| (v.clone(), -c)).collect();
        let (rel, rhs) = match self.rel {
            Relation::Gt => (Relation::Ge, -&self.rhs),
            Relation::Ge => (Relation::Gt, -&self.rhs),
            Relation::Eq => return Err(FeasibilityError::NegatedEquality),
        };
        Ok(LinearConstraint { lhs, rel, rhs })
    }

    pub fn satisfied_by(&self, point: &BTreeMap<String, Rational>) -> bool {
        let mut acc = Rational::zero();
        for (v, c) in &self.lhs {
            let x = point.get(v).cloned().unwrap_or_else(Rational::zero);
            acc = acc + (c * &x);
        }
        match self.rel {
            Relation::Gt => acc > self.rhs,
            Relation::Ge => acc >= self.rhs,
            Relation::Eq => acc == self.rhs,
        }
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.lhs {
            if first {
                if c == &Rational::one() {
                    write!(f, "{v}")?;
                } else {
                    write!(f, "{c}*{v}")?;
                }
                first = false;
            } else if c.is_negative() {
                if -c == Rational::one() {
                    write!(f, " - {v}")?;
                } else {
                    write!(f, " - {}*{v}", -c)?;
                }
            } else if c == &Rational::one() {
                write!(f, " + {v}")?;
            } else {
                write!(f, " + {c}*{v}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        let rel = match self.rel {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        write!(f, " {rel} {}", self.rhs)
    }
}

/// An ordered variable set plus a list of constraints over it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct LinearSystem {
    pub vars: Vec<String>,
    pub constraints: Vec<LinearConstraint>,
}

impl LinearSystem {
    pub fn new(vars: Vec<String>) -> Self {
        LinearSystem {
            vars,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, c: LinearConstraint) -> Result<(), FeasibilityError> {
        if c.lhs.is_empty() {
            return Err(FeasibilityError::EmptyConstraint);
        }
        for v in c.lhs.keys() {
            if !self.vars.iter().any(|w| w == v) {
                return Err(FeasibilityError::UnknownVariable(v.clone()));
            }
        }
        self.constraints.push(c);
        Ok(())
    }

    /// Disjoint union of two systems over disjoint variable sets.
    pub fn union(&self, other: &LinearSystem) -> LinearSystem {
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        let mut constraints = self.constraints.clone();
        constraints.extend(other.constraints.iter().cloned());
        LinearSystem { vars, constraints }
    }

    pub fn with_constraint(&self, c: LinearConstraint) -> LinearSystem {
        let mut sys = self.clone();
        sys.constraints.push(c);
        sys
    }

    /// Projects out `var`; the solution set of the result is exactly the
    /// projection of the solution set of `self`.
    pub fn eliminate(&self, var: &str) -> Result<LinearSystem, FeasibilityError> {
        if !self.vars.iter().any(|v| v == var) {
            return Err(FeasibilityError::UnknownVariable(var.to_string()));
        }
        let idx = self.var_index();
        let vi = idx[var];
        let rows = self.rows(&idx);
        let projected = eliminate_rows(&rows, vi);
        let vars: Vec<String> = self.vars.iter().filter(|v| *v != var).cloned().collect();
        Ok(self.rows_to_system(vars, &projected))
    }

    /// True iff the system has a rational solution.
    pub fn is_feasible(&self) -> bool {
        let idx = self.var_index();
        let mut rows = self.rows(&idx);
        for vi in self.elimination_order(&idx) {
            if rows.iter().any(|r| r.is_ground_contradiction()) {
                return false;
            }
            rows = eliminate_rows(&rows, vi);
        }
        !rows.iter().any(|r| r.is_ground_contradiction())
    }

    /// A rational witness: midpoint of each variable's residual interval,
    /// back-substituted through the elimination stages.  Deterministic for a
    /// fixed variable order.
    pub fn sample_point(&self) -> Result<BTreeMap<String, Rational>, FeasibilityError> {
        let idx = self.var_index();
        let order = self.elimination_order(&idx);
        let mut stages = vec![self.rows(&idx)];
        for &vi in &order {
            if stages.last().unwrap().iter().any(|r| r.is_ground_contradiction()) {
                return Err(FeasibilityError::Infeasible);
            }
            let next = eliminate_rows(stages.last().unwrap(), vi);
            stages.push(next);
        }
        if stages
            .last()
            .unwrap()
            .iter()
            .any(|r| r.is_ground_contradiction())
        {
            return Err(FeasibilityError::Infeasible);
        }
        let mut values: Vec<Option<Rational>> = vec![None; self.vars.len()];
        for (k, &vi) in order.iter().enumerate().rev() {
            let val = pick_value(&stages[k], vi, &values);
            values[vi] = Some(val);
        }
        let mut point = BTreeMap::new();
        for (i, v) in self.vars.iter().enumerate() {
            point.insert(v.clone(), values[i].clone().unwrap_or_else(Rational::zero));
        }
        debug_assert!(self.constraints.iter().all(|c| c.satisfied_by(&point)));
        Ok(point)
    }

    /// Does every solution of `self` satisfy `c`?  Checked by refuting
    /// `self ∪ {¬c}`.
    pub fn implies(&self, c: &LinearConstraint) -> Result<bool, FeasibilityError> {
        let mut sys = self.clone();
        for v in c.lhs.keys() {
            if !sys.vars.contains(v) {
                sys.vars.push(v.clone());
            }
        }
        sys.constraints.push(c.negated()?);
        Ok(!sys.is_feasible())
    }

    /// Mutual implication of two systems, constraint by constraint.
    pub fn equivalent_to(&self, other: &LinearSystem) -> Result<bool, FeasibilityError> {
        for c in &other.constraints {
            if !self.implies(c)? {
                return Ok(false);
            }
        }
        for c in &self.constraints {
            if !other.implies(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn var_index(&self) -> BTreeMap<&str, usize> {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect()
    }

    /// Ascending by name; affects intermediate sizes only, never answers.
    fn elimination_order(&self, idx: &BTreeMap<&str, usize>) -> Vec<usize> {
        let mut names: Vec<&str> = self.vars.iter().map(|v| v.as_str()).collect();
        names.sort_unstable();
        names.into_iter().map(|n| idx[n]).collect()
    }

    fn rows(&self, idx: &BTreeMap<&str, usize>) -> Vec<Row> {
        let n = self.vars.len();
        let mut rows = Vec::new();
        for c in &self.constraints {
            // scale by the lcm of denominators: rows are all-integer
            let mut scale = BigInt::from(1);
            for q in c.lhs.values() {
                scale = scale.lcm(q.denom());
            }
            scale = scale.lcm(c.rhs.denom());
            let mut coeffs = vec![BigInt::from(0); n];
            for (v, q) in &c.lhs {
                coeffs[idx[v.as_str()]] = q.numer() * (&scale / q.denom());
            }
            let constant = -(c.rhs.numer() * (&scale / c.rhs.denom()));
            match c.rel {
                Relation::Gt => rows.push(Row::new(coeffs, constant, true)),
                Relation::Ge => rows.push(Row::new(coeffs, constant, false)),
                Relation::Eq => {
                    rows.push(Row::new(
                        coeffs.iter().map(|q| -q).collect(),
                        -&constant,
                        false,
                    ));
                    rows.push(Row::new(coeffs, constant, false));
                }
            }
        }
        rows
    }

    fn rows_to_system(&self, vars: Vec<String>, rows: &[Row]) -> LinearSystem {
        let keep: Vec<usize> = self
            .vars
            .iter()
            .enumerate()
            .filter(|(_, v)| vars.contains(v))
            .map(|(i, _)| i)
            .collect();
        let mut constraints = Vec::new();
        for row in rows {
            let mut lhs = BTreeMap::new();
            for &i in &keep {
                if !row.coeffs[i].is_zero() {
                    lhs.insert(
                        self.vars[i].clone(),
                        Rational::from_bigint(row.coeffs[i].clone()),
                    );
                }
            }
            constraints.push(LinearConstraint {
                lhs,
                rel: if row.strict { Relation::Gt } else { Relation::Ge },
                rhs: Rational::from_bigint(-&row.constant),
            });
        }
        LinearSystem { vars, constraints }
    }
}

/// Internal normal form `sum(coeffs * x) + constant (>|>=) 0` over integers,
/// normalized by the gcd of all entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Row {
    coeffs: Vec<BigInt>,
    constant: BigInt,
    strict: bool,
}

impl Row {
    fn new(coeffs: Vec<BigInt>, constant: BigInt, strict: bool) -> Self {
        let mut row = Row {
            coeffs,
            constant,
            strict,
        };
        row.reduce();
        row
    }

    /// Divide the whole row by the gcd of its entries to keep numbers small.
    fn reduce(&mut self) {
        let mut g = self.constant.abs();
        for c in &self.coeffs {
            if !c.is_zero() {
                g = g.gcd(c);
            }
            if g.is_one() {
                return;
            }
        }
        if g.is_zero() || g.is_one() {
            return;
        }
        for c in &mut self.coeffs {
            *c = &*c / &g;
        }
        self.constant = &self.constant / &g;
    }

    fn is_ground(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn is_ground_contradiction(&self) -> bool {
        self.is_ground()
            && if self.strict {
                !self.constant.is_positive()
            } else {
                self.constant.is_negative()
            }
    }

    fn is_ground_tautology(&self) -> bool {
        self.is_ground() && !self.is_ground_contradiction()
    }

    /// Gcd of the coefficient part alone (positive; 0 only for ground rows).
    fn coeff_gcd(&self) -> BigInt {
        let mut g = BigInt::from(0);
        for c in &self.coeffs {
            if !c.is_zero() {
                g = g.gcd(c);
                if g.is_one() {
                    break;
                }
            }
        }
        g
    }
}

/// Deduplicates parallel rows, keeping only the tightest bound for each
/// coefficient direction; the projection set is unchanged.
struct TightestRows {
    out: Vec<Row>,
    index: HashMap<Vec<BigInt>, usize>,
    saw_contradiction: bool,
}

impl TightestRows {
    fn new() -> Self {
        TightestRows {
            out: Vec::new(),
            index: HashMap::new(),
            saw_contradiction: false,
        }
    }

    fn push(&mut self, row: Row) {
        if row.is_ground_tautology() {
            return;
        }
        if row.is_ground_contradiction() {
            if !self.saw_contradiction {
                self.saw_contradiction = true;
                self.out.push(row);
            }
            return;
        }
        let g = row.coeff_gcd();
        let key: Vec<BigInt> = row.coeffs.iter().map(|c| c / &g).collect();
        match self.index.get(&key) {
            None => {
                self.index.insert(key, self.out.len());
                self.out.push(row);
            }
            Some(&i) => {
                let held = &self.out[i];
                let hg = held.coeff_gcd();
                // compare constant/g against held constant/hg
                let lhs = &row.constant * &hg;
                let rhs = &held.constant * &g;
                let tighter = lhs < rhs || (lhs == rhs && row.strict && !held.strict);
                if tighter {
                    self.out[i] = row;
                }
            }
        }
    }
}

fn eliminate_rows(rows: &[Row], vi: usize) -> Vec<Row> {
    let mut lower = Vec::new(); // coeff > 0: bounds var from below
    let mut upper = Vec::new(); // coeff < 0: bounds var from above
    let mut acc = TightestRows::new();
    for row in rows {
        let c = &row.coeffs[vi];
        if c.is_positive() {
            lower.push(row);
        } else if c.is_negative() {
            upper.push(row);
        } else {
            acc.push(row.clone());
        }
    }
    for lo in &lower {
        for hi in &upper {
            let a = &lo.coeffs[vi]; // > 0
            let b = hi.coeffs[vi].abs(); // > 0
            let coeffs: Vec<BigInt> = lo
                .coeffs
                .iter()
                .zip(hi.coeffs.iter())
                .map(|(x, y)| &b * x + a * y)
                .collect();
            debug_assert!(coeffs[vi].is_zero());
            let constant = &b * &lo.constant + a * &hi.constant;
            acc.push(Row::new(coeffs, constant, lo.strict || hi.strict));
        }
    }
    acc.out
}

/// Residual interval midpoint for `vi` in a stage whose later variables are
/// already fixed.
fn pick_value(rows: &[Row], vi: usize, values: &[Option<Rational>]) -> Rational {
    let mut lo: Option<(Rational, bool)> = None; // (bound, strict)
    let mut hi: Option<(Rational, bool)> = None;
    for row in rows {
        let c = &row.coeffs[vi];
        if c.is_zero() {
            continue;
        }
        let mut acc = Rational::from_bigint(row.constant.clone());
        for (j, q) in row.coeffs.iter().enumerate() {
            if j == vi || q.is_zero() {
                continue;
            }
            let x = values[j]
                .as_ref()
                .expect("back-substitution saw an uneliminated variable");
            acc = acc + (&Rational::from_bigint(q.clone()) * x);
        }
        // c*v + acc (>|>=) 0
        let bound = &(-&acc) / &Rational::from_bigint(c.clone());
        if c.is_positive() {
            let better = match &lo {
                None => true,
                Some((b, s)) => bound > *b || (bound == *b && row.strict && !*s),
            };
            if better {
                lo = Some((bound, row.strict));
            }
        } else {
            let better = match &hi {
                None => true,
                Some((b, s)) => bound < *b || (bound == *b && row.strict && !*s),
            };
            if better {
                hi = Some((bound, row.strict));
            }
        }
    }
    match (lo, hi) {
        (None, None) => Rational::zero(),
        (Some((l, _)), None) => l + Rational::one(),
        (None, Some((h, _))) => h - Rational::one(),
        (Some((l, _)), Some((h, _))) => {
            if l == h {
                l
            } else {
                (l + h) / Rational::integer(2)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn sys(vars: &[&str], cs: Vec<LinearConstraint>) -> LinearSystem {
        let mut s = LinearSystem::new(vars.iter().map(|v| v.to_string()).collect());
        for c in cs {
            s.push(c).unwrap();
        }
        s
    }

    fn gt(lhs: Vec<(&str, i64)>, rhs: i64) -> LinearConstraint {
        LinearConstraint::new(
            lhs.into_iter().map(|(v, c)| (v, Rational::integer(c))).collect(),
            Relation::Gt,
            Rational::integer(rhs),
        )
    }

    #[test]
    fn eliminate_open_interval_is_empty() {
        // {x > 0, x < 1}
        let s = sys(&["x"], vec![gt(vec![("x", 1)], 0), gt(vec![("x", -1)], -1)]);
        let p = s.eliminate("x").unwrap();
        assert!(p.constraints.is_empty());
        assert!(s.is_feasible());
    }

    #[test]
    fn eliminate_contradiction_leaves_ground_falsity() {
        // {x > 0, -x > 0}
        let s = sys(&["x"], vec![gt(vec![("x", 1)], 0), gt(vec![("x", -1)], 0)]);
        let p = s.eliminate("x").unwrap();
        assert_eq!(p.constraints.len(), 1);
        let ground = &p.constraints[0];
        assert!(ground.lhs.is_empty());
        assert_eq!(ground.rel, Relation::Gt);
        assert!(!Rational::zero().gt(&ground.rhs));
        assert!(!s.is_feasible());
    }

    #[test]
    fn eliminate_transitivity() {
        // {x > y, y > z} --y--> {x > z}
        let s = sys(
            &["x", "y", "z"],
            vec![gt(vec![("x", 1), ("y", -1)], 0), gt(vec![("y", 1), ("z", -1)], 0)],
        );
        let p = s.eliminate("y").unwrap();
        assert_eq!(p.constraints.len(), 1);
        let c = &p.constraints[0];
        assert_eq!(c.lhs.get("x"), Some(&Rational::one()));
        assert_eq!(c.lhs.get("z"), Some(&Rational::integer(-1)));
        assert_eq!(c.rel, Relation::Gt);
        assert_eq!(c.rhs, Rational::zero());
    }

    #[test]
    fn unknown_variable_is_rejected() {
        let s = sys(&["x"], vec![]);
        assert_eq!(
            s.eliminate("w").unwrap_err(),
            FeasibilityError::UnknownVariable("w".into())
        );
    }

    #[test]
    fn midpoint_sampling() {
        let s = sys(&["x"], vec![gt(vec![("x", 1)], 0), gt(vec![("x", -1)], -1)]);
        let p = s.sample_point().unwrap();
        assert_eq!(p["x"], r("1/2"));
    }

    #[test]
    fn empty_system_is_feasible() {
        let s = LinearSystem::new(vec![]);
        assert!(s.is_feasible());
        assert!(s.sample_point().unwrap().is_empty());
    }

    #[test]
    fn infeasible_sample_reports() {
        let s = sys(&["x"], vec![gt(vec![("x", 1)], 0), gt(vec![("x", -1)], 0)]);
        assert_eq!(s.sample_point().unwrap_err(), FeasibilityError::Infeasible);
    }

    #[test]
    fn equalities_substitute_exactly() {
        // {x = 2/3, x + y > 1} => y > 1/3
        let mut s = LinearSystem::new(vec!["x".into(), "y".into()]);
        s.push(LinearConstraint::new(
            vec![("x", Rational::one())],
            Relation::Eq,
            r("2/3"),
        ))
        .unwrap();
        s.push(gt(vec![("x", 1), ("y", 1)], 1)).unwrap();
        assert!(s.is_feasible());
        let p = s.sample_point().unwrap();
        assert_eq!(p["x"], r("2/3"));
        assert!(&p["x"] + &p["y"] > Rational::one());
    }

    #[test]
    fn implication_and_equivalence() {
        // {a > b, b > c} implies a > c but not b > a
        let s = sys(
            &["a", "b", "c"],
            vec![gt(vec![("a", 1), ("b", -1)], 0), gt(vec![("b", 1), ("c", -1)], 0)],
        );
        assert!(s.implies(&gt(vec![("a", 1), ("c", -1)], 0)).unwrap());
        assert!(!s.implies(&gt(vec![("b", 1), ("a", -1)], 0)).unwrap());

        let t = sys(
            &["a", "b", "c"],
            vec![
                gt(vec![("a", 1), ("b", -1)], 0),
                gt(vec![("b", 1), ("c", -1)], 0),
                gt(vec![("a", 1), ("c", -1)], 0),
            ],
        );
        assert!(s.equivalent_to(&t).unwrap());
        let u = sys(&["a", "b", "c"], vec![gt(vec![("a", 1), ("c", -1)], 0)]);
        assert!(!s.equivalent_to(&u).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let s = sys(
            &["b1", "b3"],
            vec![gt(vec![("b1", 1), ("b3", -1)], 0), gt(vec![("b3", 1)], 0)],
        );
        let text = serde_json::to_string(&s).unwrap();
        let back: LinearSystem = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
        assert!(text.contains("\"rel\":\">\""));
    }
}
