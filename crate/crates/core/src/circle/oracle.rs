//! Black-box circle maps given by a floating-point lift callback.
//!
//! An oracle is the escape hatch for maps with no structured representation:
//! it evaluates through a user-supplied degree-one lift `F: ℝ → ℝ`
//! (increasing, `F(x+1) = F(x)+1`), optionally a derivative callback, and
//! carries declared analytic metadata (a Lipschitz constant and a per-step
//! evaluation error bound) that validated computations must budget for.

use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

pub type LiftFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A circle map evaluated through callbacks, with declared error metadata.
#[derive(Clone)]
pub struct OracleMap {
    label: String,
    lift: LiftFn,
    derivative: Option<LiftFn>,
    lipschitz: f64,
    step_error: f64,
    /// `floor(lift(0))`, subtracted so the canonical lift sends 0 into [0,1).
    offset: f64,
}

impl OracleMap {
    /// Wraps a lift callback. The callback must be increasing and commute
    /// with `x ↦ x+1`; evaluation is normalized so the lift of 0 lands in
    /// [0, 1).
    pub fn new(label: impl Into<String>, lift: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let lift: LiftFn = Arc::new(lift);
        let offset = lift(0.0).floor();
        OracleMap {
            label: label.into(),
            lift,
            derivative: None,
            lipschitz: f64::INFINITY,
            step_error: 1e-12,
            offset,
        }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = l;
        self
    }

    /// Declares the absolute error committed by one lift evaluation.
    pub fn with_step_error(mut self, e: f64) -> Self {
        self.step_error = e;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn step_error(&self) -> f64 {
        self.step_error
    }

    /// Canonical lift value at `x`.
    pub fn lift_at(&self, x: f64) -> f64 {
        (self.lift)(x) - self.offset
    }

    /// Angular evaluation in [0, 1).
    pub fn eval_angular(&self, theta: f64) -> f64 {
        let y = self.lift_at(theta - theta.floor());
        let f = y - y.floor();
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    }

    pub fn derivative_at(&self, theta: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(theta))
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }
}

impl fmt::Debug for OracleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OracleMap")
            .field("label", &self.label)
            .field("lipschitz", &self.lipschitz)
            .field("step_error", &self.step_error)
            .finish()
    }
}

impl PartialEq for OracleMap {
    /// Identity of the underlying callback, not extensional equality.
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.lift, &other.lift) && self.label == other.label
    }
}

impl Serialize for OracleMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("OracleMap", 4)?;
        s.serialize_field("label", &self.label)?;
        s.serialize_field("lipschitz", &self.lipschitz)?;
        s.serialize_field("step_error", &self.step_error)?;
        s.serialize_field("has_derivative", &self.derivative.is_some())?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_normalization_lands_in_unit_interval() {
        let o = OracleMap::new("shifted rotation", |x| x + 7.25);
        assert_eq!(o.lift_at(0.0), 0.25);
        assert_eq!(o.eval_angular(0.5), 0.75);
    }

    #[test]
    fn angular_evaluation_wraps() {
        let o = OracleMap::new("rotation", |x| x + 0.75);
        assert!((o.eval_angular(0.5) - 0.25).abs() < 1e-15);
    }
}
