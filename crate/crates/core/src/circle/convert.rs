//! Chart-gluing arithmetic: `t = tan(π(θ − 1/2))`, `θ = 1/2 + atan(t)/π`.
//!
//! Exactness policy: the gluing map is transcendental, so only the four
//! distinguished points are converted exactly, via a lookup table. Everything
//! else goes through `f64`, keeping the result within a few ulp of the true
//! value (the trig functions are correctly rounded to well under 1e−15 here).

use crate::value::Value;

use super::ProjPoint;

/// θ ∈ [0,1) → projective point.
pub fn proj_of_angular(theta: &Value) -> ProjPoint {
    let theta = theta.frac();
    if theta.is_exact() {
        if theta.is_zero() {
            return ProjPoint::Infinity;
        }
        if theta == Value::ratio(1, 2) {
            return ProjPoint::Finite(Value::zero());
        }
        if theta == Value::ratio(1, 4) {
            return ProjPoint::Finite(Value::from_int(-1));
        }
        if theta == Value::ratio(3, 4) {
            return ProjPoint::Finite(Value::from_int(1));
        }
    }
    let x = theta.to_f64();
    if x == 0.0 {
        return ProjPoint::Infinity;
    }
    ProjPoint::Finite(Value::approx(t_of_theta(x)))
}

/// Projective point → θ ∈ [0,1).
pub fn angular_of_proj(p: &ProjPoint) -> Value {
    match p {
        ProjPoint::Infinity => Value::zero(),
        ProjPoint::Finite(v) => {
            if v.is_exact() {
                if v.is_zero() {
                    return Value::ratio(1, 2);
                }
                if *v == Value::from_int(-1) {
                    return Value::ratio(1, 4);
                }
                if *v == Value::from_int(1) {
                    return Value::ratio(3, 4);
                }
            }
            Value::approx(theta_of_t(v.to_f64()))
        }
    }
}

/// Float gluing map. Callers must handle θ = 0 (→ ∞) beforehand.
pub fn t_of_theta(theta: f64) -> f64 {
    (core::f64::consts::PI * (theta - 0.5)).tan()
}

/// Float inverse gluing map; total on ℝ, lands in (0, 1).
pub fn theta_of_t(t: f64) -> f64 {
    0.5 + t.atan() / core::f64::consts::PI
}
