//! The two-factor Legendrian product: closed-form tb and Maslov class,
//! Reeb chord enumeration of the Morse-perturbed product, frontspinning,
//! and the infinite tb family obtained from cancelling chord pairs.
//!
//! The product of two chord-generic Legendrians is embedded exactly when the
//! two factors' action sets are disjoint; every operation here rejects
//! colliding actions rather than perturbing silently.

use std::cmp::Ordering;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{morse_sign, LegendrianModel, ModelError, MorseCritical, ReebChord};
use crate::rational::Rational;
use crate::sign::Sign;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProductError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("action tie at {0}: the tau comparison is undefined at equality")]
    ActionTie(Rational),
    #[error("action collision at {0}: factor action sets must be disjoint")]
    ActionCollision(Rational),
    #[error("factor dimensions {0} and {1} must have different parity")]
    ParityViolation(u32, u32),
    #[error("window violation: {0}")]
    WindowViolation(String),
    #[error("no chord labeled `{0}`")]
    UnknownChordLabel(String),
}

/// The four Reeb chord families of the perturbed product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChordKind {
    A,
    B,
    C,
    D,
}

impl fmt::Display for ChordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChordKind::A => write!(f, "A"),
            ChordKind::B => write!(f, "B"),
            ChordKind::C => write!(f, "C"),
            ChordKind::D => write!(f, "D"),
        }
    }
}

/// A Reeb chord of the perturbed product, tagged with its family and the
/// factor data it came from.  A-chords pair a chord of K with a Morse point
/// of L, B-chords a Morse point of K with a chord of L, C- and D-chords pair
/// chords of both factors at difference and sum actions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbedChord {
    pub kind: ChordKind,
    pub parent_k: String,
    pub parent_l: String,
    pub action: Rational,
    pub sign: Sign,
}

impl PerturbedChord {
    pub fn label(&self) -> String {
        format!("{}({},{})", self.kind, self.parent_k, self.parent_l)
    }
}

fn parity_product(n: u32, m: u32) -> Sign {
    Sign::parity(((n as u64 * m as u64) % 2) as u32)
}

/// The sign factor of the mixed chord pair in the product tb formula:
/// `(-1)^n` when the K-chord is shorter, `(-1)^m` when it is longer.
/// Undefined at equality.
pub fn tau(za: &Rational, zb: &Rational, n: u32, m: u32) -> Result<Sign, ProductError> {
    match za.cmp(zb) {
        Ordering::Less => Ok(Sign::parity(n % 2)),
        Ordering::Greater => Ok(Sign::parity(m % 2)),
        Ordering::Equal => Err(ProductError::ActionTie(za.clone())),
    }
}

fn check_disjoint_actions(k: &LegendrianModel, l: &LegendrianModel) -> Result<(), ProductError> {
    for a in &k.chords {
        for b in &l.chords {
            if a.action == b.action {
                return Err(ProductError::ActionCollision(a.action.clone()));
            }
        }
    }
    Ok(())
}

/// tb of the Legendrian product in closed form:
/// `(-1)^(nm) (tb(K) chi(T*L) + chi(T*K) tb(L) + tb(K) tb(L) + sum tau sigma sigma)`.
pub fn product_tb(k: &LegendrianModel, l: &LegendrianModel) -> Result<i64, ProductError> {
    let tbk = k.chord_sum_tb()?;
    let tbl = l.chord_sum_tb()?;
    check_disjoint_actions(k, l)?;
    let mut tau_sum = 0i64;
    for a in &k.chords {
        for b in &l.chords {
            let t = tau(&a.action, &b.action, k.dim, l.dim)?;
            tau_sum += (t * a.sign * b.sign).as_i64();
        }
    }
    let pref = parity_product(k.dim, l.dim).as_i64();
    Ok(pref * (tbk * l.cotangent_euler + k.cotangent_euler * tbl + tbk * tbl + tau_sum))
}

/// Direct sum of the factor Maslov vectors, K's entries first, with factor
/// tags keeping the basis labels disjoint.
pub fn maslov_product(k: &LegendrianModel, l: &LegendrianModel) -> IndexMap<String, i64> {
    let mut out = IndexMap::new();
    for (key, v) in &k.maslov {
        out.insert(format!("K.{key}"), *v);
    }
    for (key, v) in &l.maslov {
        out.insert(format!("L.{key}"), *v);
    }
    out
}

/// Enumerates the Reeb chords of the Morse-perturbed product and assembles
/// the product model around them.
///
/// Emitted actions are the nominal values (the perturbation turns them into
/// nearby ones, but every sign depends only on comparisons between original
/// factor actions, which disjointness makes robust).  By default two chords
/// may share an action; `strict` separates duplicates by deterministic
/// infinitesimal offsets in (kind, parent, parent) order so the result is
/// chord generic and can be fed into further products.
pub fn perturb_product(
    k: &LegendrianModel,
    l: &LegendrianModel,
    strict: bool,
) -> Result<(Vec<PerturbedChord>, LegendrianModel), ProductError> {
    perturb_product_avoiding(k, l, strict, &[])
}

/// As `perturb_product`, but in strict mode the offsets also clear the given
/// external action values, so comparisons against a later factor stay exact.
pub fn perturb_product_avoiding(
    k: &LegendrianModel,
    l: &LegendrianModel,
    strict: bool,
    avoid: &[Rational],
) -> Result<(Vec<PerturbedChord>, LegendrianModel), ProductError> {
    k.chord_sum_tb()?;
    l.chord_sum_tb()?;
    check_disjoint_actions(k, l)?;
    let pref = parity_product(k.dim, l.dim);
    let mut chords = Vec::new();
    for a in &k.chords {
        for ml in &l.morse {
            chords.push(PerturbedChord {
                kind: ChordKind::A,
                parent_k: a.label.clone(),
                parent_l: ml.label.clone(),
                action: a.action.clone(),
                sign: pref * a.sign * morse_sign(l.dim, ml.index),
            });
        }
    }
    for mk in &k.morse {
        for b in &l.chords {
            chords.push(PerturbedChord {
                kind: ChordKind::B,
                parent_k: mk.label.clone(),
                parent_l: b.label.clone(),
                action: b.action.clone(),
                sign: pref * morse_sign(k.dim, mk.index) * b.sign,
            });
        }
    }
    for a in &k.chords {
        for b in &l.chords {
            let t = tau(&a.action, &b.action, k.dim, l.dim)?;
            let pair_sign = pref * a.sign * b.sign;
            chords.push(PerturbedChord {
                kind: ChordKind::C,
                parent_k: a.label.clone(),
                parent_l: b.label.clone(),
                action: (&a.action - &b.action).abs(),
                sign: pair_sign * t,
            });
            chords.push(PerturbedChord {
                kind: ChordKind::D,
                parent_k: a.label.clone(),
                parent_l: b.label.clone(),
                action: &a.action + &b.action,
                sign: pair_sign,
            });
        }
    }
    chords.sort_by(|x, y| {
        (x.kind, &x.parent_k, &x.parent_l).cmp(&(y.kind, &y.parent_k, &y.parent_l))
    });
    if strict {
        epsilon_separate(&mut chords, avoid);
    }

    let mut morse = Vec::new();
    for mk in &k.morse {
        for ml in &l.morse {
            morse.push(MorseCritical::new(
                format!("({},{})", mk.label, ml.label),
                mk.index + ml.index,
            ));
        }
    }
    let model = LegendrianModel {
        dim: k.dim + l.dim,
        euler: k.euler * l.euler,
        cotangent_euler: k.cotangent_euler * l.cotangent_euler,
        chords: chords
            .iter()
            .map(|pc| ReebChord::new(pc.label(), pc.action.clone(), pc.sign))
            .collect(),
        morse,
        maslov: maslov_product(k, l),
    };
    debug_assert!(model.validate().ok, "{:?}", model.validate());
    Ok((chords, model))
}

/// Separates duplicate actions (and actions tied to `avoid` values) by
/// offsets `k*eps` small enough to move nothing past any other value.  The
/// tiebreak order is the canonical (kind, parent, parent) sort.
fn epsilon_separate(chords: &mut [PerturbedChord], avoid: &[Rational]) {
    if chords.is_empty() {
        return;
    }
    let mut values: Vec<Rational> = chords.iter().map(|c| c.action.clone()).collect();
    values.extend(avoid.iter().cloned());
    values.sort();
    values.dedup();
    let base = if values.len() >= 2 {
        values
            .windows(2)
            .map(|w| &w[1] - &w[0])
            .min()
            .expect("at least one gap")
    } else {
        values[0].clone()
    };
    let eps = base / Rational::integer(chords.len() as i64 + 1);
    let mut groups: std::collections::BTreeMap<Rational, Vec<usize>> =
        std::collections::BTreeMap::new();
    for (i, c) in chords.iter().enumerate() {
        groups.entry(c.action.clone()).or_default().push(i);
    }
    for (value, idxs) in groups {
        let tied = avoid.contains(&value);
        let start = usize::from(tied);
        if idxs.len() == 1 && !tied {
            continue;
        }
        for (j, &i) in idxs.iter().enumerate() {
            let step = start + j;
            if step == 0 {
                continue;
            }
            chords[i].action = &chords[i].action + &(eps.clone() * Rational::integer(step as i64));
        }
    }
}

/// Product with a one-chord unknot whose action dominates every action of
/// `l`, so every mixed comparison takes the longer-K-chord branch.  This is
/// the chord-level realization of frontspinning.
pub fn frontspin(l: &LegendrianModel) -> Result<LegendrianModel, ProductError> {
    l.chord_sum_tb()?;
    let action = match l.chords.iter().map(|c| c.action.clone()).max() {
        Some(max) => Rational::one() + Rational::integer(2) * max,
        None => Rational::one(),
    };
    let unknot = crate::model::whitney(1, action).expect("dimension 1 is in the sign table");
    let (_, model) = perturb_product(&unknot, l, false)?;
    Ok(model)
}

/// tb of `K_i x L` for `i = 0..=pairs`, where `K_i` adds `i` cancelling
/// chord pairs at distinct actions inside the window `(zb, za)` around the
/// distinguished chord `e` of `L`.  Consecutive values differ by the
/// constant `2 (-1)^(nm) (-1)^m lead_sign sigma(e)`.
pub fn infinite_family_tb(
    k: &LegendrianModel,
    l: &LegendrianModel,
    e_label: &str,
    pairs: u32,
    za: Rational,
    zb: Rational,
    lead_sign: Sign,
) -> Result<Vec<i64>, ProductError> {
    k.chord_sum_tb()?;
    l.chord_sum_tb()?;
    if k.dim % 2 == l.dim % 2 {
        return Err(ProductError::ParityViolation(k.dim, l.dim));
    }
    let e = l
        .chords
        .iter()
        .find(|c| c.label == e_label)
        .ok_or_else(|| ProductError::UnknownChordLabel(e_label.to_string()))?;
    if !(za > e.action && e.action > zb && zb.is_positive()) {
        return Err(ProductError::WindowViolation(format!(
            "need za > Z({e_label}) > zb > 0, got za={za}, Z={}, zb={zb}",
            e.action
        )));
    }
    for c in &l.chords {
        if c.label != e_label && c.action >= zb && c.action <= za {
            return Err(ProductError::WindowViolation(format!(
                "chord `{}` with action {} lies inside [{zb}, {za}]",
                c.label, c.action
            )));
        }
    }
    let denom = Rational::integer(pairs as i64 + 1);
    let up = &za - &e.action;
    let down = &e.action - &zb;
    let mut out = Vec::with_capacity(pairs as usize + 1);
    let mut current = k.clone();
    out.push(product_tb(&current, l)?);
    for t in 1..=pairs {
        let frac = Rational::integer(t as i64) / denom.clone();
        let at = &e.action + &(up.clone() * frac.clone());
        let bt = &e.action - &(down.clone() * frac);
        current = current.stabilize_with_cancelling_pair(at, bt, lead_sign)?;
        out.push(product_tb(&current, l)?);
    }
    Ok(out)
}
