//! The three-knot product: a closed form for tb as a sum over chord triples,
//! cross-validated against the iterated two-factor route.
//!
//! Genericity is enforced, never patched silently: any triangle equality
//! among a chord triple's actions aborts, because the triple factor is
//! undefined there and a hidden nudge would make results irreproducible.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{LegendrianModel, ModelError};
use crate::product::{
    perturb_product_avoiding, product_tb, tau, ChordKind, ProductError,
};
use crate::rational::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TripleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error("degenerate triple ({0}, {1}, {2}): a triangle equality holds")]
    DegenerateTriple(Rational, Rational, Rational),
    #[error("triple products are defined for knots; got dimension {0}")]
    NotAKnot(u32),
}

/// `2` when `(a, b, c)` satisfies all strict triangle inequalities, `0`
/// otherwise; symmetric in its arguments.  Any triangle equality is a
/// degeneracy.
pub fn triple_tau(a: &Rational, b: &Rational, c: &Rational) -> Result<i64, TripleError> {
    let ab = a + b;
    let bc = b + c;
    let ca = c + a;
    if ab == *c || bc == *a || ca == *b {
        return Err(TripleError::DegenerateTriple(a.clone(), b.clone(), c.clone()));
    }
    Ok(if ab > *c && bc > *a && ca > *b { 2 } else { 0 })
}

fn require_knot(m: &LegendrianModel) -> Result<(), TripleError> {
    m.chord_sum_tb()?;
    if m.dim != 1 {
        return Err(TripleError::NotAKnot(m.dim));
    }
    Ok(())
}

/// tb of the three-knot product as the triple-factor sum over all chord
/// triples.  Ties between actions of different factors are harmless here;
/// only triangle equalities are degenerate.
pub fn triple_tb(
    k1: &LegendrianModel,
    k2: &LegendrianModel,
    k3: &LegendrianModel,
) -> Result<i64, TripleError> {
    require_knot(k1)?;
    require_knot(k2)?;
    require_knot(k3)?;
    let mut total = 0i64;
    for a in &k1.chords {
        for b in &k2.chords {
            for c in &k3.chords {
                let t = triple_tau(&a.action, &b.action, &c.action)?;
                total += t * (a.sign * b.sign * c.sign).as_i64();
            }
        }
    }
    Ok(total)
}

/// Both routes to the triple tb: the closed form and the iterated product
/// `(K1 x K2) x K3`, where the intermediate model is made chord generic in
/// strict mode with offsets clearing K3's actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TripleAudit {
    pub closed_form: i64,
    pub iterated: i64,
    pub agree: bool,
}

pub fn triple_vs_iterated(
    k1: &LegendrianModel,
    k2: &LegendrianModel,
    k3: &LegendrianModel,
) -> Result<TripleAudit, TripleError> {
    let closed_form = triple_tb(k1, k2, k3)?;
    let avoid: Vec<Rational> = k3.chords.iter().map(|c| c.action.clone()).collect();
    let (_, intermediate) = perturb_product_avoiding(k1, k2, true, &avoid)?;
    let iterated = product_tb(&intermediate, k3)?;
    Ok(TripleAudit {
        closed_form,
        iterated,
        agree: closed_form == iterated,
    })
}

/// The tau-term of the iterated route split by the intermediate chord's
/// family.  The A- and B-families pair Morse points of opposite sign at
/// equal actions, so their contributions cancel identically.
pub fn iterated_tau_contributions(
    k1: &LegendrianModel,
    k2: &LegendrianModel,
    k3: &LegendrianModel,
) -> Result<BTreeMap<ChordKind, i64>, TripleError> {
    require_knot(k1)?;
    require_knot(k2)?;
    require_knot(k3)?;
    let avoid: Vec<Rational> = k3.chords.iter().map(|c| c.action.clone()).collect();
    let (chords, intermediate) = perturb_product_avoiding(k1, k2, true, &avoid)?;
    let mut sums: BTreeMap<ChordKind, i64> = BTreeMap::new();
    for kind in [ChordKind::A, ChordKind::B, ChordKind::C, ChordKind::D] {
        sums.insert(kind, 0);
    }
    for pc in &chords {
        for c in &k3.chords {
            let t = tau(&pc.action, &c.action, intermediate.dim, k3.dim)?;
            *sums.get_mut(&pc.kind).unwrap() += (t * pc.sign * c.sign).as_i64();
        }
    }
    Ok(sums)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{knot_fixture, whitney, FixtureName};
    use crate::sign::Sign;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn fixture(name: FixtureName, values: &[(&str, &str)]) -> LegendrianModel {
        let actions: BTreeMap<String, Rational> = values
            .iter()
            .map(|(l, v)| (l.to_string(), r(v)))
            .collect();
        knot_fixture(name, &actions).unwrap().0
    }

    fn min_instance() -> (LegendrianModel, LegendrianModel, LegendrianModel) {
        (
            fixture(FixtureName::StabilizedUnknot, &[("a1", "5"), ("a2", "5")]),
            fixture(FixtureName::R1Unknot, &[("b1", "10"), ("b2", "10"), ("b3", "3")]),
            fixture(
                FixtureName::Trefoil,
                &[("c1", "10"), ("c2", "10"), ("c3", "3"), ("c4", "3"), ("c5", "3")],
            ),
        )
    }

    fn max_instance() -> (LegendrianModel, LegendrianModel, LegendrianModel) {
        (
            fixture(FixtureName::StabilizedUnknot, &[("a1", "5"), ("a2", "5")]),
            fixture(FixtureName::R1Unknot, &[("b1", "6"), ("b2", "6"), ("b3", "2")]),
            fixture(
                FixtureName::Trefoil,
                &[("c1", "12"), ("c2", "12"), ("c3", "2"), ("c4", "2"), ("c5", "2")],
            ),
        )
    }

    #[test]
    fn triple_factor_values() {
        assert_eq!(triple_tau(&r("3"), &r("4"), &r("5")).unwrap(), 2);
        assert_eq!(triple_tau(&r("1"), &r("2"), &r("5")).unwrap(), 0);
        assert_eq!(triple_tau(&r("5"), &r("10"), &r("3")).unwrap(), 0);
        assert!(matches!(
            triple_tau(&r("1"), &r("2"), &r("3")),
            Err(TripleError::DegenerateTriple(..))
        ));
    }

    #[test]
    fn triple_factor_is_symmetric() {
        let vals = [r("3"), r("4"), r("5"), r("1"), r("2"), r("9")];
        for a in &vals {
            for b in &vals {
                for c in &vals {
                    let base = triple_tau(a, b, c);
                    for (x, y, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                        match (&base, triple_tau(x, y, z)) {
                            (Ok(v), Ok(w)) => assert_eq!(*v, w),
                            (Err(_), Err(_)) => {}
                            (l, r) => panic!("asymmetric outcome: {l:?} vs {r:?}"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn knot_fixture_extremes() {
        let (k1, k2, k3) = min_instance();
        assert_eq!(triple_tb(&k1, &k2, &k3).unwrap(), -28);
        let (k1, k2, k3) = max_instance();
        assert_eq!(triple_tb(&k1, &k2, &k3).unwrap(), 24);
    }

    #[test]
    fn triple_tb_is_factor_permutation_invariant() {
        let (k1, k2, k3) = min_instance();
        let base = triple_tb(&k1, &k2, &k3).unwrap();
        assert_eq!(triple_tb(&k3, &k2, &k1).unwrap(), base);
        assert_eq!(triple_tb(&k2, &k3, &k1).unwrap(), base);
        assert_eq!(triple_tb(&k1, &k3, &k2).unwrap(), base);
    }

    /// The closed form and the iterated product agree exactly; for three
    /// one-chord unknots the common value is 2 * sigma(a)sigma(b)sigma(c)
    /// inside the triangle region.
    #[test]
    fn whitney_triple_agrees_across_routes() {
        let w = |a: &str| whitney(1, r(a)).unwrap();
        let audit = triple_vs_iterated(&w("3"), &w("4"), &w("5")).unwrap();
        assert!(audit.agree);
        assert_eq!(audit.closed_form, -2);
        let audit = triple_vs_iterated(&w("1"), &w("2"), &w("5")).unwrap();
        assert!(audit.agree);
        assert_eq!(audit.closed_form, 0);
    }

    #[test]
    fn fixture_extremes_agree_across_routes() {
        let (k1, k2, k3) = min_instance();
        let audit = triple_vs_iterated(&k1, &k2, &k3).unwrap();
        assert_eq!(
            (audit.closed_form, audit.iterated, audit.agree),
            (-28, -28, true)
        );
        let (k1, k2, k3) = max_instance();
        let audit = triple_vs_iterated(&k1, &k2, &k3).unwrap();
        assert_eq!(
            (audit.closed_form, audit.iterated, audit.agree),
            (24, 24, true)
        );
    }

    #[test]
    fn morse_family_contributions_cancel() {
        for instance in [min_instance(), max_instance()] {
            let (k1, k2, k3) = instance;
            let sums = iterated_tau_contributions(&k1, &k2, &k3).unwrap();
            assert_eq!(sums[&ChordKind::A], 0);
            assert_eq!(sums[&ChordKind::B], 0);
        }
    }

    #[test]
    fn first_factor_collision_blocks_iteration_only() {
        let w = |a: &str| whitney(1, r(a)).unwrap();
        // shared action between the second and third factor is fine on both
        // routes; between the first two it blocks the intermediate product
        let audit = triple_vs_iterated(&w("3"), &w("4"), &w("4")).unwrap();
        assert!(audit.agree);
        assert!(matches!(
            triple_vs_iterated(&w("3"), &w("3"), &w("5")),
            Err(TripleError::Product(ProductError::ActionCollision(_)))
        ));
        // the closed form itself tolerates the tie
        assert_eq!(triple_tb(&w("3"), &w("3"), &w("5")).unwrap(), -2);
    }

    #[test]
    fn random_triples_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 40 {
            let knot = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut m = whitney(1, Rational::new(rng.gen_range(1..300), rng.gen_range(1..8)))
                    .unwrap();
                for _ in 0..rng.gen_range(0usize..3) {
                    let hi = Rational::new(rng.gen_range(100..600), rng.gen_range(1..8));
                    let lo = &hi * &Rational::new(1, 2);
                    m = m
                        .stabilize_with_cancelling_pair(
                            hi,
                            lo,
                            if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus },
                        )
                        .unwrap();
                }
                m
            };
            let (k1, k2, k3) = (knot(&mut rng), knot(&mut rng), knot(&mut rng));
            match triple_vs_iterated(&k1, &k2, &k3) {
                Ok(audit) => {
                    assert!(
                        audit.agree,
                        "routes disagree: {} vs {}",
                        audit.closed_form, audit.iterated
                    );
                    checked += 1;
                }
                // collisions and degenerate triples are redrawn
                Err(_) => continue,
            }
        }
    }
}
