//! Scalar values that are either exact rationals or floating-point
//! approximations.
//!
//! Exactness is contagious downward only: combining two exact values yields
//! an exact value, and any operation touching an approximate value yields an
//! approximate one. Comparisons are always mathematically exact — a finite
//! f64 is a rational number and is compared as such.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Rational;

/// An exact rational or a finite floating-point number.
#[derive(Clone, Debug)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        Value::Exact(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Value::Exact(Rational::from_integer(BigInt::from(n)))
    }

    /// Exact fraction p/q. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Value::Exact(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// Wraps a float; panics on NaN or infinity, which have no place on the
    /// circle.
    pub fn approx(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite float entered a Value: {x}");
        Value::Approx(x)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational_to_f64(r),
            Value::Approx(x) => *x,
        }
    }

    /// The exact rational this value denotes (a finite f64 is a rational).
    pub fn to_rational(&self) -> Rational {
        match self {
            Value::Exact(r) => r.clone(),
            Value::Approx(x) => BigRational::from_float(*x).expect("finite by construction"),
        }
    }

    /// Exact value if this is one, otherwise `None`.
    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Approx(_) => None,
        }
    }

    pub fn floor(&self) -> BigInt {
        match self {
            Value::Exact(r) => r.floor().to_integer(),
            Value::Approx(x) => BigRational::from_float(x.floor())
                .expect("finite")
                .to_integer(),
        }
    }

    pub fn ceil(&self) -> BigInt {
        match self {
            Value::Exact(r) => r.ceil().to_integer(),
            Value::Approx(x) => BigRational::from_float(x.ceil())
                .expect("finite")
                .to_integer(),
        }
    }

    /// Fractional part in [0, 1): `self − floor(self)`.
    pub fn frac(&self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(r - r.floor()),
            Value::Approx(x) => {
                let f = x - x.floor();
                // Guard the half-open invariant against rounding at the top.
                Value::Approx(if f >= 1.0 { 0.0 } else { f })
            }
        }
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(r.abs()),
            Value::Approx(x) => Value::Approx(x.abs()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Approx(x) => *x == 0.0,
        }
    }

    pub fn min(self, other: Value) -> Value {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Value) -> Value {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Binary operation with exactness promotion.
    fn combine(
        &self,
        other: &Value,
        exact: impl Fn(&Rational, &Rational) -> Rational,
        approx: impl Fn(f64, f64) -> f64,
    ) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(exact(a, b)),
            _ => Value::approx(approx(self.to_f64(), other.to_f64())),
        }
    }
}

/// Exact square root of a nonnegative rational, when it is itself rational.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r < &Rational::zero() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Round-to-nearest conversion that survives rationals far outside f64's
/// integer range (num's `to_f64` handles this, but be explicit about the
/// fallback).
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_positive() {
            f64::MAX
        } else {
            f64::MIN
        }
    })
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a.cmp(b),
            (Value::Approx(a), Value::Approx(b)) => {
                a.partial_cmp(b).expect("finite by construction")
            }
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }
}

impl Add for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        self.combine(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for &Value {
    type Output = Value;
    fn sub(self, rhs: &Value) -> Value {
        self.combine(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl Mul for &Value {
    type Output = Value;
    fn mul(self, rhs: &Value) -> Value {
        self.combine(rhs, |a, b| a * b, |a, b| a * b)
    }
}

impl Div for &Value {
    type Output = Value;
    fn div(self, rhs: &Value) -> Value {
        assert!(!rhs.is_zero(), "division by zero Value");
        self.combine(rhs, |a, b| a / b, |a, b| a / b)
    }
}

impl Neg for &Value {
    type Output = Value;
    fn neg(self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(-r),
            Value::Approx(x) => Value::Approx(-x),
        }
    }
}

macro_rules! owned_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl $trait for Value {
            type Output = Value;
            fn $method(self, rhs: Value) -> Value {
                $trait::$method(&self, &rhs)
            }
        }
    )*};
}
owned_ops!(Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        -&self
    }
}

impl From<Rational> for Value {
    fn from(r: Rational) -> Self {
        Value::Exact(r)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Approx(x) => write!(f, "{x:?}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Exact(r) => s.serialize_str(&crate::serialize::rational_string(r)),
            Value::Approx(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Value::approx(x)),
            Raw::Str(s) => crate::serialize::parse_rational(&s)
                .map(Value::Exact)
                .map_err(serde::de::Error::custom),
        }
    }
}
