//! Closed arcs on ℝ/ℤ, stored as a base point plus a length so that wrapping
//! through 0 never needs a special case.

use serde::Serialize;

use crate::value::Value;

use super::{CircleError, CirclePoint};

/// A closed arc `[lo, lo + len]` on ℝ/ℤ, traversed counterclockwise.
///
/// `len = 0` is a single point and `len = 1` is the full circle. The base
/// point is always normalized to [0, 1). Arithmetic on exact endpoints stays
/// exact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcInterval {
    lo: Value,
    len: Value,
}

impl ArcInterval {
    /// Arc from `lo` counterclockwise to `hi` (each taken mod 1). Equal
    /// endpoints give a degenerate point arc, never the full circle.
    pub fn from_endpoints(lo: impl Into<Value>, hi: impl Into<Value>) -> Self {
        let lo = lo.into().frac();
        let hi = hi.into().frac();
        let len = (&hi - &lo).frac();
        ArcInterval { lo, len }
    }

    /// Arc of the given length starting at `lo`.
    pub fn with_length(lo: impl Into<Value>, len: impl Into<Value>) -> Result<Self, CircleError> {
        let lo = lo.into().frac();
        let len = len.into();
        if len < Value::zero() || len > Value::one() {
            return Err(CircleError::InvalidInterval(format!(
                "length {len} outside [0, 1]"
            )));
        }
        Ok(ArcInterval { lo, len })
    }

    pub fn point(p: impl Into<Value>) -> Self {
        ArcInterval {
            lo: p.into().frac(),
            len: Value::zero(),
        }
    }

    pub fn full() -> Self {
        ArcInterval {
            lo: Value::zero(),
            len: Value::one(),
        }
    }

    pub fn lo(&self) -> &Value {
        &self.lo
    }

    /// Upper endpoint reduced mod 1 (coincides with `lo` for the full circle).
    pub fn hi(&self) -> Value {
        (&self.lo + &self.len).frac()
    }

    pub fn length(&self) -> &Value {
        &self.len
    }

    pub fn is_point(&self) -> bool {
        self.len.is_zero()
    }

    pub fn is_full(&self) -> bool {
        self.len == Value::one()
    }

    pub fn midpoint(&self) -> Value {
        (&self.lo + &(&self.len / &Value::from_int(2))).frac()
    }

    pub fn lo_point(&self) -> CirclePoint {
        CirclePoint::Angular(self.lo.clone())
    }

    pub fn hi_point(&self) -> CirclePoint {
        CirclePoint::Angular(self.hi())
    }

    /// Closed containment of an angular coordinate.
    pub fn contains(&self, x: &Value) -> bool {
        if self.is_full() {
            return true;
        }
        (x - &self.lo).frac() <= self.len
    }

    pub fn contains_point(&self, p: &CirclePoint) -> bool {
        self.contains(&p.angular_value())
    }

    /// Open containment (excludes both endpoints; everything for the full circle).
    pub fn interior_contains(&self, x: &Value) -> bool {
        if self.is_full() {
            return true;
        }
        let d = (x - &self.lo).frac();
        !d.is_zero() && d < self.len
    }

    /// Whether the two closed arcs share at least one point.
    pub fn intersects(&self, other: &ArcInterval) -> bool {
        if self.is_full() || other.is_full() {
            return true;
        }
        self.contains(&other.lo)
            || self.contains(&other.hi())
            || other.contains(&self.lo)
            || other.contains(&self.hi())
    }

    /// Whether `other` lies inside this arc (closed containment of arcs).
    pub fn contains_arc(&self, other: &ArcInterval) -> bool {
        if self.is_full() {
            return true;
        }
        if other.is_full() {
            return false;
        }
        let offset = (&other.lo - &self.lo).frac();
        &offset + &other.len <= self.len
    }

    /// `count` evenly spaced points starting at `lo`, spanning the arc
    /// (endpoints included when `count > 1`).
    pub fn sample(&self, count: usize) -> Vec<Value> {
        if count <= 1 {
            return vec![self.midpoint()];
        }
        let step = &self.len / &Value::from_int((count - 1) as i64);
        (0..count)
            .map(|i| (&self.lo + &(&step * &Value::from_int(i as i64))).frac())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping_arc_contains_zero() {
        let arc = ArcInterval::from_endpoints(Value::ratio(9, 10), Value::ratio(1, 10));
        assert_eq!(*arc.length(), Value::ratio(1, 5));
        assert!(arc.contains(&Value::zero()));
        assert!(arc.contains(&Value::ratio(19, 20)));
        assert!(!arc.contains(&Value::ratio(1, 2)));
        assert_eq!(arc.midpoint(), Value::zero());
    }

    #[test]
    fn containment_of_arcs_handles_wrap() {
        let big = ArcInterval::from_endpoints(Value::ratio(3, 4), Value::ratio(1, 2));
        let small = ArcInterval::from_endpoints(Value::ratio(9, 10), Value::ratio(1, 10));
        assert!(big.contains_arc(&small));
        assert!(!small.contains_arc(&big));
        assert!(big.intersects(&small));
    }

    #[test]
    fn sampling_spans_the_arc() {
        let arc = ArcInterval::from_endpoints(Value::zero(), Value::ratio(1, 2));
        let pts = arc.sample(3);
        assert_eq!(
            pts,
            vec![Value::zero(), Value::ratio(1, 4), Value::ratio(1, 2)]
        );
    }
}
