//! Validated rotation-number enclosures.
//!
//! For an orientation-preserving circle homeomorphism with canonical lift
//! `F`, the rotation number satisfies `|(Fᴺ(x) − x)/N − ρ| ≤ 1/N` for every
//! basepoint `x`. Intersecting these windows over several basepoints gives a
//! certified enclosure: exact-rational on maps with an exact lift, and
//! padded by a declared per-step error budget on float paths.

use serde::Serialize;
use thiserror::Error;

use crate::circle::{angular_distance, ArcInterval, CircleError, CircleMap, CirclePoint};
use crate::serialize;
use crate::value::Value;
use crate::Rational;

#[derive(Debug, Error)]
pub enum RotationError {
    /// Basepoint windows do not overlap: the lift evaluation is inconsistent
    /// (a degree-one monotone lift can never produce this).
    #[error("rotation windows from different basepoints do not intersect: {0}")]
    EmptyIntersection(String),
    /// The enclosure is too wide for the requested certification.
    #[error("enclosure width {width} is not below the required {required}")]
    EnclosureTooWide { width: f64, required: f64 },
    /// No integer `l` puts `l/(n−1)` inside the enclosure: the map cannot be
    /// the translation part of an action with this modulus.
    #[error("no integer l with l/{modulus} (mod 1) inside [{lo}, {hi}]")]
    NoAdmissibleL { modulus: i64, lo: f64, hi: f64 },
    #[error(transparent)]
    Circle(#[from] CircleError),
}

/// Certified enclosure `[lo, hi]` for a rotation number, with the iteration
/// count and basepoints that produced it. `float_slack` is the outward
/// padding applied on each side when the lift was evaluated in floating
/// point (zero on exact paths); the width obeys
/// `hi − lo ≤ 2/N + 2·float_slack`.
#[derive(Clone, Debug, Serialize)]
pub struct RotationEnclosure {
    #[serde(serialize_with = "serialize::value_decimal_down")]
    pub lo: Value,
    #[serde(serialize_with = "serialize::value_decimal_up")]
    pub hi: Value,
    pub iterations: u32,
    pub basepoints: Vec<Value>,
    pub float_slack: f64,
}

impl RotationEnclosure {
    pub fn width(&self) -> Value {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Value {
        &(&self.lo + &self.hi) * &Value::ratio(1, 2)
    }

    /// Containment of a real number in the raw (un-reduced) enclosure.
    pub fn contains(&self, x: &Value) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    /// Containment modulo 1, for values only known up to integers.
    pub fn contains_mod_one(&self, x: &Value) -> bool {
        self.as_arc().contains(&x.frac())
    }

    /// The enclosure reduced modulo 1, as an arc. Widths of 1 or more give
    /// the full circle.
    pub fn as_arc(&self) -> ArcInterval {
        let w = self.width();
        if w >= Value::one() {
            ArcInterval::full()
        } else {
            ArcInterval::with_length(self.lo.frac(), w).expect("width below one")
        }
    }

    /// Whether the two enclosures can contain a common rotation number
    /// (intersection modulo 1).
    pub fn meets(&self, other: &RotationEnclosure) -> bool {
        self.as_arc().intersects(&other.as_arc())
    }

    /// The enclosure for `n·ρ` reduced modulo 1.
    pub fn scaled_mod_one(&self, n: i64) -> ArcInterval {
        let lo = &self.lo * &Value::from_int(n);
        let w = &self.width() * &Value::from_int(n);
        if w >= Value::one() {
            ArcInterval::full()
        } else {
            ArcInterval::with_length(lo.frac(), w).expect("width below one")
        }
    }
}

/// Default basepoint set `{0, 1/3, 2/3}`: any finite set is sound, and
/// intersecting a few spread-out windows tightens the enclosure cheaply.
pub fn default_basepoints() -> Vec<Value> {
    vec![Value::zero(), Value::ratio(1, 3), Value::ratio(2, 3)]
}

/// Certified rotation-number enclosure from `iterations` lift steps at each
/// basepoint. Exact-lift maps produce exact window endpoints; float paths
/// pad each window outward by the map's declared per-step error budget.
pub fn rotation_enclosure(
    map: &CircleMap,
    iterations: u32,
    basepoints: &[Value],
) -> Result<RotationEnclosure, RotationError> {
    assert!(iterations >= 1, "at least one iteration required");
    assert!(!basepoints.is_empty(), "at least one basepoint required");
    let n_value = Value::from_int(i64::from(iterations));
    let margin = Value::ratio(1, i64::from(iterations));
    let exact = map.has_exact_lift();
    let slack = if exact { 0.0 } else { map.step_error() };

    let mut lo: Option<Value> = None;
    let mut hi: Option<Value> = None;
    for x in basepoints {
        let mean = if exact && x.is_exact() {
            let mut y = x.clone();
            for _ in 0..iterations {
                y = map.lift_eval(&y);
            }
            &(&y - x) / &n_value
        } else {
            let x0 = x.to_f64();
            let mut y = x0;
            for _ in 0..iterations {
                y = map.lift_eval_f64(y);
            }
            Value::approx((y - x0) / f64::from(iterations))
        };
        let mut w_lo = &mean - &margin;
        let mut w_hi = &mean + &margin;
        if slack > 0.0 {
            w_lo = &w_lo - &Value::approx(slack);
            w_hi = &w_hi + &Value::approx(slack);
        }
        lo = Some(match lo {
            None => w_lo,
            Some(prev) => prev.max(w_lo),
        });
        hi = Some(match hi {
            None => w_hi,
            Some(prev) => prev.min(w_hi),
        });
    }
    let (lo, hi) = (lo.expect("nonempty"), hi.expect("nonempty"));
    if lo > hi {
        return Err(RotationError::EmptyIntersection(format!(
            "lo {lo} exceeds hi {hi} after intersecting {} basepoints",
            basepoints.len()
        )));
    }
    Ok(RotationEnclosure {
        lo,
        hi,
        iterations,
        basepoints: basepoints.to_vec(),
        float_slack: slack,
    })
}

/// Outcome of pinning `ρ = l/(n−1) (mod 1)`: the unique admissible integer
/// in the enclosure, both raw and normalized to `0 ≤ l < n−1`.
#[derive(Clone, Debug, Serialize)]
pub struct RhoRationalForm {
    pub l: i64,
    pub l_raw: i64,
    pub modulus: i64,
    pub enclosure: RotationEnclosure,
}

/// Certify that the rotation number has the form `l/(n−1) (mod 1)` by
/// finding the unique admissible `l` inside an enclosure of width below
/// `1/(2(n−1))`. A miss is a falsification certificate: no action with
/// modulus `n` can have this map as its translation generator.
pub fn rho_rational_form(
    f: &CircleMap,
    n: i64,
    iterations: u32,
) -> Result<RhoRationalForm, RotationError> {
    assert!(n >= 2, "modulus must be at least 2");
    let modulus = n - 1;
    let enclosure = rotation_enclosure(f, iterations, &default_basepoints())?;
    let width = enclosure.width();
    let required = Value::ratio(1, 2 * modulus);
    if width >= required {
        return Err(RotationError::EnclosureTooWide {
            width: width.to_f64(),
            required: required.to_f64(),
        });
    }
    let m_value = Value::from_int(modulus);
    let first = (&enclosure.lo * &m_value).ceil();
    let last = (&enclosure.hi * &m_value).floor();
    if first > last {
        return Err(RotationError::NoAdmissibleL {
            modulus,
            lo: enclosure.lo.to_f64(),
            hi: enclosure.hi.to_f64(),
        });
    }
    // Width below 1/(2(n−1)) leaves room for at most one multiple of
    // 1/(n−1), so the candidate is unique.
    debug_assert_eq!(first, last);
    let l_raw = i64::try_from(first).expect("rotation numbers are desk-scale");
    let l = l_raw.rem_euclid(modulus);
    Ok(RhoRationalForm {
        l,
        l_raw,
        modulus,
        enclosure,
    })
}

/// One-sided rational-rotation detector: returns `p/q` when a grid point
/// returns to itself under `q` steps within `tol` and the certified
/// enclosure confirms `p/q`; `None` is inconclusive, never a proof of
/// irrationality.
pub fn rational_rotation_detect(
    map: &CircleMap,
    qmax: u32,
    tol: f64,
) -> Option<Rational> {
    assert!(qmax >= 1);
    // Burn in each probe for `qmax` steps so orbits attracted to a periodic
    // orbit get close enough to register; rigid periodic orbits are
    // unaffected, and genuinely irrational maps still fail every test below.
    let probes: Vec<CirclePoint> = (0..16)
        .map(|i| map.evaluate_iter(&CirclePoint::angular(Value::ratio(i, 16)), qmax))
        .collect();
    for q in 1..=qmax {
        let near_periodic = probes.iter().any(|x| {
            let y = map.evaluate_iter(x, q);
            angular_distance(&y, x).to_f64() < tol
        });
        if !near_periodic {
            continue;
        }
        // Confirm against an enclosure tight enough to isolate one multiple
        // of 1/q (width ≤ 2/N < 1/q).
        let iterations = (4 * q).max(128);
        let Ok(enclosure) = rotation_enclosure(map, iterations, &default_basepoints()) else {
            continue;
        };
        let q_value = Value::from_int(i64::from(q));
        let first = (&enclosure.lo * &q_value).ceil();
        let last = (&enclosure.hi * &q_value).floor();
        if first > last {
            continue;
        }
        let p = i64::try_from(first).ok()?;
        let q = i64::from(q);
        return Some(Rational::new(p.rem_euclid(q).into(), q.into()));
    }
    None
}

/// Default angular tolerance for the periodic-return test.
pub const DETECT_TOL: f64 = 1e-9;
/// Default maximal period for the periodic-return test.
pub const DETECT_QMAX: u32 = 64;

/// Cross-checks of the rotation-number identities forced by the relation
/// `h∘f∘h⁻¹ = fⁿ`: conjugation invariance (`ρ(hfh⁻¹) = ρ(f)`), the power
/// law (`ρ(fⁿ) = n·ρ(f) mod 1`), and the relation itself
/// (`ρ(hfh⁻¹) = ρ(fⁿ)`). The first two hold for arbitrary `f`, `h`; an
/// empty third intersection flags a pair that cannot satisfy the relation.
#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyInvarianceReport {
    pub rho_f: RotationEnclosure,
    pub rho_conjugated: RotationEnclosure,
    pub rho_power: RotationEnclosure,
    /// enclosure(ρ(hfh⁻¹)) ∩ enclosure(ρ(f)) ≠ ∅.
    pub conjugation_invariant: bool,
    /// enclosure(ρ(fⁿ)) ∩ n·enclosure(ρ(f)) (mod 1) ≠ ∅.
    pub power_identity: bool,
    /// enclosure(ρ(hfh⁻¹)) ∩ enclosure(ρ(fⁿ)) ≠ ∅ — forced by the relation.
    pub relation_consistent: bool,
}

impl ConjugacyInvarianceReport {
    pub fn all_consistent(&self) -> bool {
        self.conjugation_invariant && self.power_identity && self.relation_consistent
    }
}

pub fn conjugacy_invariance_check(
    f: &CircleMap,
    h: &CircleMap,
    n: i64,
    iterations: u32,
) -> Result<ConjugacyInvarianceReport, RotationError> {
    assert!(n >= 1);
    let basepoints = default_basepoints();
    let rho_f = rotation_enclosure(f, iterations, &basepoints)?;
    let conjugated = f.conjugate_by(h)?;
    let rho_conjugated = rotation_enclosure(&conjugated, iterations, &basepoints)?;
    let power = f.pow(n)?;
    let rho_power = rotation_enclosure(&power, iterations, &basepoints)?;
    let conjugation_invariant = rho_conjugated.meets(&rho_f);
    let power_identity = rho_power.as_arc().intersects(&rho_f.scaled_mod_one(n));
    let relation_consistent = rho_conjugated.meets(&rho_power);
    Ok(ConjugacyInvarianceReport {
        rho_f,
        rho_conjugated,
        rho_power,
        conjugation_invariant,
        power_identity,
        relation_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{OracleMap, PlCircleMap};

    fn pl_conjugator() -> CircleMap {
        CircleMap::PlCircle(
            PlCircleMap::from_knot_values(
                vec![Value::zero(), Value::ratio(1, 2)],
                vec![Value::zero(), Value::ratio(3, 4)],
            )
            .unwrap(),
        )
    }

    #[test]
    fn rigid_rotation_enclosure_is_exact_and_tight() {
        let map = CircleMap::rotation(Value::ratio(1, 3));
        let enc = rotation_enclosure(&map, 300, &default_basepoints()).unwrap();
        assert!(enc.contains(&Value::ratio(1, 3)));
        assert!(enc.width() <= Value::ratio(2, 300));
        assert_eq!(enc.float_slack, 0.0);
        assert!(enc.lo.is_exact() && enc.hi.is_exact());
    }

    #[test]
    fn parabolic_translation_encloses_zero() {
        // The unit translation fixes ∞ (angular 0), so its rotation number
        // is 0; the fractional-linear path evaluates in floating point.
        let map = CircleMap::unit_translation();
        let enc = rotation_enclosure(&map, 100, &default_basepoints()).unwrap();
        assert!(enc.contains_mod_one(&Value::zero()));
        assert!(enc.float_slack > 0.0);
    }

    #[test]
    fn conjugation_preserves_the_enclosed_rotation_number() {
        let rot = CircleMap::rotation(Value::ratio(2, 5));
        let conj = rot.conjugate_by(&pl_conjugator()).unwrap();
        let enc = rotation_enclosure(&conj, 500, &default_basepoints()).unwrap();
        assert!(enc.contains(&Value::ratio(2, 5)));
        assert!(enc.width() <= Value::ratio(2, 500));
        assert_eq!(enc.float_slack, 0.0, "exact PL path stays exact");
    }

    #[test]
    fn doubling_iterations_keeps_the_enclosures_consistent() {
        let conj = CircleMap::rotation(Value::ratio(5, 17))
            .conjugate_by(&pl_conjugator())
            .unwrap();
        let coarse = rotation_enclosure(&conj, 100, &default_basepoints()).unwrap();
        let fine = rotation_enclosure(&conj, 200, &default_basepoints()).unwrap();
        assert!(coarse.meets(&fine));
        assert!(fine.width() <= coarse.width());
    }

    #[test]
    fn inconsistent_oracle_lift_reports_empty_intersection() {
        // Not a homeomorphism lift: the orbit of 0 is fixed (mean
        // displacement 0) while the orbit of 1/3 advances by 1/2 per step,
        // so the basepoint windows at width 2/N cannot overlap.
        let broken = CircleMap::Oracle(OracleMap::new("broken", |x| {
            let fract = x - x.floor();
            if fract < 0.1 {
                x
            } else {
                x + 0.5
            }
        }));
        let err = rotation_enclosure(&broken, 400, &default_basepoints()).unwrap_err();
        assert!(matches!(err, RotationError::EmptyIntersection(_)));
    }

    #[test]
    fn translation_generator_has_l_zero() {
        let f0 = CircleMap::unit_translation();
        let report = rho_rational_form(&f0, 2, 200).unwrap();
        assert_eq!(report.l, 0);
        assert_eq!(report.modulus, 1);
    }

    #[test]
    fn half_rotation_pins_l_one_for_modulus_three() {
        let f = CircleMap::rotation(Value::ratio(1, 2));
        let report = rho_rational_form(&f, 3, 200).unwrap();
        assert_eq!(report.l, 1);
        assert_eq!(report.l_raw, 1);
        assert_eq!(report.modulus, 2);
    }

    #[test]
    fn golden_rotation_admits_no_l() {
        let golden = CircleMap::rotation(Value::approx(0.618_033_988_749_894_9));
        let err = rho_rational_form(&golden, 2, 256).unwrap_err();
        assert!(matches!(err, RotationError::NoAdmissibleL { .. }));
    }

    #[test]
    fn enclosure_too_wide_is_reported() {
        let f = CircleMap::rotation(Value::ratio(1, 7));
        // Width 2/N = 1/2 cannot certify modulus 40 (needs width < 1/78).
        let err = rho_rational_form(&f, 40, 4).unwrap_err();
        assert!(matches!(err, RotationError::EnclosureTooWide { .. }));
    }

    #[test]
    fn detector_confirms_rational_rotations() {
        let half = CircleMap::rotation(Value::ratio(1, 2));
        assert_eq!(
            rational_rotation_detect(&half, DETECT_QMAX, DETECT_TOL),
            Some(Rational::new(1.into(), 2.into()))
        );
        let h0 = CircleMap::scaling(2);
        assert_eq!(
            rational_rotation_detect(&h0, DETECT_QMAX, DETECT_TOL),
            Some(Rational::new(0.into(), 1.into()))
        );
    }

    #[test]
    fn detector_is_inconclusive_on_the_golden_rotation() {
        let golden = CircleMap::rotation(Value::approx(0.618_033_988_749_894_9));
        assert_eq!(rational_rotation_detect(&golden, 50, DETECT_TOL), None);
    }

    #[test]
    fn standard_pair_passes_all_rotation_identities() {
        let f = CircleMap::unit_translation();
        let h = CircleMap::scaling(2);
        let report = conjugacy_invariance_check(&f, &h, 2, 200).unwrap();
        assert!(report.all_consistent());
        assert!(report.rho_f.contains_mod_one(&Value::zero()));
        assert!(report.rho_conjugated.contains_mod_one(&Value::zero()));
        assert!(report.rho_power.contains_mod_one(&Value::zero()));
    }

    #[test]
    fn conjugated_pl_pair_passes_all_rotation_identities() {
        let phi = pl_conjugator();
        let f = CircleMap::unit_translation().conjugate_by(&phi).unwrap();
        let h = CircleMap::scaling(3).conjugate_by(&phi).unwrap();
        let report = conjugacy_invariance_check(&f, &h, 3, 200).unwrap();
        assert!(report.all_consistent());
    }

    #[test]
    fn rotation_with_identity_conjugator_flags_relation_failure() {
        // ρ(hfh⁻¹) = 1/3 but ρ(f²) = 2/3: the pair cannot satisfy the
        // relation, while the two always-true identities still hold.
        let f = CircleMap::rotation(Value::ratio(1, 3));
        let h = CircleMap::identity();
        let report = conjugacy_invariance_check(&f, &h, 2, 300).unwrap();
        assert!(report.conjugation_invariant);
        assert!(report.power_identity);
        assert!(!report.relation_consistent);
        assert!(!report.all_consistent());
    }
}