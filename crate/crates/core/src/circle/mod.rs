//! The circle in two charts, and exact representations of its
//! orientation-preserving homeomorphisms.
//!
//! The circle is treated as the real projective line ℝ ∪ {∞} and,
//! equivalently, as ℝ/ℤ. The two charts are glued by
//! `t = tan(π(θ − 1/2))`, which sends the angular point 0 to ∞. The four
//! angular points {0, 1/4, 1/2, 3/4} convert exactly (to {∞, −1, 0, 1});
//! every other conversion is transcendental and demotes to floating point.

mod convert;
mod interval;
mod map;
mod moebius;
mod oracle;
mod pl_circle;
mod pl_line;

pub use interval::ArcInterval;
pub use map::{compose, CircleMap, Side};
pub use moebius::{MoebiusFixedPoints, MoebiusMap};
pub use oracle::OracleMap;
pub use pl_circle::PlCircleMap;
pub use pl_line::{PlLineFixed, PlLineMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::value::Value;

/// Which coordinate system a point or interval lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// ℝ/ℤ, coordinates in [0, 1).
    Angular,
    /// ℝ ∪ {∞}, the real projective line.
    Projective,
}

/// A point of the projective line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProjPoint {
    Finite(Value),
    Infinity,
}

impl ProjPoint {
    pub fn finite(v: impl Into<Value>) -> Self {
        ProjPoint::Finite(v.into())
    }

    pub fn is_exact(&self) -> bool {
        match self {
            ProjPoint::Finite(v) => v.is_exact(),
            ProjPoint::Infinity => true,
        }
    }
}

/// A point on the circle, remembered in the chart it was produced in.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum CirclePoint {
    /// Angular coordinate, always normalized to [0, 1).
    Angular(Value),
    Projective(ProjPoint),
}

#[derive(Debug, Error)]
pub enum CircleError {
    #[error("oracle map rejected input {0}")]
    OracleDomain(f64),
    #[error("derivative requested at a breakpoint (angular {0}); use the one-sided variant")]
    Breakpoint(f64),
    #[error("map has no inverse representation usable here: {0}")]
    Inverse(String),
    #[error("map \"{0}\" exposes no derivative information")]
    NoDerivative(String),
    #[error("invalid map data: {0}")]
    InvalidMap(String),
    #[error("interval endpoints out of order or out of range: {0}")]
    InvalidInterval(String),
    #[error("operation needs a finite projective value but met ∞")]
    UnexpectedInfinity,
}

impl CirclePoint {
    pub fn angular(v: impl Into<Value>) -> Self {
        CirclePoint::Angular(v.into().frac())
    }

    pub fn angular_f64(x: f64) -> Self {
        CirclePoint::Angular(Value::approx(x).frac())
    }

    pub fn projective(v: impl Into<Value>) -> Self {
        CirclePoint::Projective(ProjPoint::Finite(v.into()))
    }

    pub fn infinity() -> Self {
        CirclePoint::Projective(ProjPoint::Infinity)
    }

    pub fn chart(&self) -> Chart {
        match self {
            CirclePoint::Angular(_) => Chart::Angular,
            CirclePoint::Projective(_) => Chart::Projective,
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            CirclePoint::Angular(v) => v.is_exact(),
            CirclePoint::Projective(p) => p.is_exact(),
        }
    }

    /// Converts to the other chart. Exact for the four distinguished points
    /// (angular {0, 1/4, 1/2, 3/4} ↔ projective {∞, −1, 0, 1}); otherwise the
    /// result is a floating-point approximation within ~1e−15.
    pub fn convert(&self, target: Chart) -> CirclePoint {
        if self.chart() == target {
            return self.clone();
        }
        match self {
            CirclePoint::Angular(v) => CirclePoint::Projective(convert::proj_of_angular(v)),
            CirclePoint::Projective(p) => CirclePoint::Angular(convert::angular_of_proj(p)),
        }
    }

    /// Angular coordinate in [0, 1); exact when the point is exact-angular or
    /// a distinguished projective point.
    pub fn angular_value(&self) -> Value {
        match self.convert(Chart::Angular) {
            CirclePoint::Angular(v) => v,
            CirclePoint::Projective(_) => unreachable!(),
        }
    }

    /// Projective coordinate; `None` for the point at infinity.
    pub fn projective_value(&self) -> Option<Value> {
        match self.convert(Chart::Projective) {
            CirclePoint::Projective(ProjPoint::Finite(v)) => Some(v),
            CirclePoint::Projective(ProjPoint::Infinity) => None,
            CirclePoint::Angular(_) => unreachable!(),
        }
    }

    /// Exact equality as circle points (compared in a common chart without
    /// losing exactness when both sides are exact in the same chart).
    pub fn same_point(&self, other: &CirclePoint) -> bool {
        match (self, other) {
            (CirclePoint::Angular(a), CirclePoint::Angular(b)) => a == b,
            (CirclePoint::Projective(a), CirclePoint::Projective(b)) => a == b,
            _ => {
                // Mixed charts: exact only through the distinguished points,
                // otherwise an exact comparison of the float conversion.
                let (a, b) = (self.angular_value(), other.angular_value());
                a == b
            }
        }
    }
}

impl PartialEq for CirclePoint {
    fn eq(&self, other: &Self) -> bool {
        self.same_point(other)
    }
}

/// Distance on ℝ/ℤ: `min(|a−b|, 1−|a−b|)`. Exact (and exactly zero for equal
/// points) whenever both points admit exact angular coordinates or are equal
/// in a shared exact chart.
pub fn angular_distance(p: &CirclePoint, q: &CirclePoint) -> Value {
    if p.same_point(q) {
        return Value::zero();
    }
    let a = p.angular_value();
    let b = q.angular_value();
    let d = (&a - &b).abs();
    let alt = &Value::one() - &d;
    d.min(alt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinguished_points_convert_exactly() {
        let cases = [
            (Value::zero(), None),
            (Value::ratio(1, 2), Some(Value::zero())),
            (Value::ratio(1, 4), Some(Value::from_int(-1))),
            (Value::ratio(3, 4), Some(Value::from_int(1))),
        ];
        for (theta, t) in cases {
            let p = CirclePoint::Angular(theta.clone()).convert(Chart::Projective);
            match (&p, t) {
                (CirclePoint::Projective(ProjPoint::Infinity), None) => {}
                (CirclePoint::Projective(ProjPoint::Finite(v)), Some(expect)) => {
                    assert!(v.is_exact());
                    assert_eq!(*v, expect);
                }
                other => panic!("unexpected conversion {other:?}"),
            }
            // And back, exactly.
            let back = p.convert(Chart::Angular);
            assert_eq!(back.angular_value(), theta);
            assert!(back.angular_value().is_exact());
        }
    }

    #[test]
    fn generic_round_trip_is_close() {
        for i in 1..40 {
            let theta = Value::ratio(i, 41);
            let p = CirclePoint::Angular(theta.clone());
            let round = p.convert(Chart::Projective).convert(Chart::Angular);
            let err = angular_distance(&p, &round).to_f64();
            assert!(err < 1e-12, "round trip error {err} at {theta}");
        }
    }

    #[test]
    fn angular_distance_wraps() {
        let p = CirclePoint::angular(Value::ratio(1, 10));
        let q = CirclePoint::angular(Value::ratio(9, 10));
        assert_eq!(angular_distance(&p, &q), Value::ratio(1, 5));
        assert!(angular_distance(&p, &q).is_exact());
    }

    #[test]
    fn equality_of_exact_projective_points_is_exact() {
        let p = CirclePoint::projective(Value::ratio(1, 3));
        let q = CirclePoint::projective(Value::ratio(1, 3));
        assert!(p.same_point(&q));
        assert!(angular_distance(&p, &q).is_zero());
        assert!(angular_distance(&p, &q).is_exact());
    }
}
