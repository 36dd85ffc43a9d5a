//! The group side of the laboratory: words in two generators subject to
//! `a b a⁻¹ = bⁿ`, their affine normal forms, the binary translation family,
//! and the relation-defect measurements that tell how far a concrete pair of
//! circle maps is from satisfying the relation.

mod bitword;
mod element;
mod word;

pub use bitword::{BitWord, BitWordShape};
pub use element::{realize_word, BsElement, BsError, NAdic};
pub use word::{Letter, Word, WordError};

use serde::Serialize;

use crate::circle::{angular_distance, CircleError, CircleMap, CirclePoint};
use crate::value::Value;

/// How far a pair `(f, h)` is from satisfying `h ∘ f ∘ h⁻¹ = f^n`.
#[derive(Clone, Debug, Serialize)]
pub struct RelationDefect {
    /// The two sides were recognized as structurally identical; the defect
    /// is exactly zero everywhere (not just on the sampled points).
    pub structurally_zero: bool,
    /// Largest sampled angular distance between the two sides.
    pub max_defect: Value,
    /// A sample point attaining `max_defect`, when sampling happened.
    pub worst_point: Option<CirclePoint>,
    pub samples: usize,
}

/// Measures `sup_x d(h(f(h⁻¹(x))), f^n(x))` over a uniform angular grid,
/// first trying to recognize the two sides as structurally equal (which
/// certifies a defect of exactly zero).
pub fn relation_defect(
    f: &CircleMap,
    h: &CircleMap,
    n: u32,
    samples: usize,
) -> Result<RelationDefect, CircleError> {
    let lhs = h.compose(f).compose(&h.inverse()?);
    let rhs = f.pow(n as i64)?;
    if lhs.canonical_eq(&rhs) {
        return Ok(RelationDefect {
            structurally_zero: true,
            max_defect: Value::zero(),
            worst_point: None,
            samples: 0,
        });
    }
    let points: Vec<CirclePoint> = (0..samples)
        .map(|i| CirclePoint::angular(Value::ratio(i as i64, samples as i64)))
        .collect();
    defect_on_points(&lhs, &rhs, &points)
}

/// The same measurement on caller-chosen points (for orbit segments or
/// non-uniform grids).
pub fn relation_defect_on_points(
    f: &CircleMap,
    h: &CircleMap,
    n: u32,
    points: &[CirclePoint],
) -> Result<RelationDefect, CircleError> {
    let lhs = h.compose(f).compose(&h.inverse()?);
    let rhs = f.pow(n as i64)?;
    if lhs.canonical_eq(&rhs) {
        return Ok(RelationDefect {
            structurally_zero: true,
            max_defect: Value::zero(),
            worst_point: None,
            samples: 0,
        });
    }
    defect_on_points(&lhs, &rhs, points)
}

fn defect_on_points(
    lhs: &CircleMap,
    rhs: &CircleMap,
    points: &[CirclePoint],
) -> Result<RelationDefect, CircleError> {
    let mut max_defect = Value::zero();
    let mut worst: Option<CirclePoint> = None;
    for p in points {
        let d = angular_distance(&lhs.evaluate(p), &rhs.evaluate(p));
        if d > max_defect || worst.is_none() {
            max_defect = d;
            worst = Some(p.clone());
        }
    }
    Ok(RelationDefect {
        structurally_zero: false,
        max_defect,
        worst_point: worst,
        samples: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::PlCircleMap;

    #[test]
    fn standard_pair_satisfies_the_relation_exactly() {
        for n in [2u32, 3, 7] {
            let f = CircleMap::unit_translation();
            let h = CircleMap::scaling(n as i64);
            let d = relation_defect(&f, &h, n, 64).unwrap();
            assert!(d.structurally_zero, "n = {n}");
            assert!(d.max_defect.is_zero());
        }
    }

    #[test]
    fn conjugated_standard_pair_still_exact() {
        let phi = CircleMap::PlCircle(
            PlCircleMap::from_knot_values(
                vec![Value::zero(), Value::ratio(1, 2)],
                vec![Value::zero(), Value::ratio(3, 4)],
            )
            .unwrap(),
        );
        let f = CircleMap::unit_translation().conjugate_by(&phi).unwrap();
        let h = CircleMap::scaling(2).conjugate_by(&phi).unwrap();
        let d = relation_defect(&f, &h, 2, 32).unwrap();
        assert!(
            d.structurally_zero,
            "conjugation must cancel structurally: {d:?}"
        );
    }

    #[test]
    fn commuting_rotations_violate_the_relation_measurably() {
        // h ∘ f ∘ h⁻¹ = f for rotations, so the defect against f² is the
        // rotation amount of f itself.
        let f = CircleMap::rotation(Value::ratio(1, 3));
        let h = CircleMap::rotation(Value::ratio(1, 2));
        let d = relation_defect(&f, &h, 2, 12).unwrap();
        assert!(!d.structurally_zero);
        assert_eq!(d.max_defect, Value::ratio(1, 3));
        assert!(d.max_defect.is_exact());
    }
}
