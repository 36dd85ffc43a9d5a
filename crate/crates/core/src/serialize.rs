//! Serialization helpers: exact rationals as `"p/q"` strings and validated
//! quantities as outward-rounded decimal strings.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

use crate::{Integer, Rational};

/// `"p/q"` (or `"p"` for integers), the exchange format for exact fractions.
pub fn rational_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"`, `"p"`, or a plain decimal such as `"0.125"`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|e| format!("bad numerator {p:?}: {e}"))?;
        let q = BigInt::from_str(q.trim()).map_err(|e| format!("bad denominator {q:?}: {e}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, fracpart)) = s.split_once('.') {
        let sign = if int.trim_start().starts_with('-') { -1 } else { 1 };
        let int = BigInt::from_str(int.trim()).map_err(|e| format!("bad number {s:?}: {e}"))?;
        let digits = fracpart.trim();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal {s:?}"));
        }
        let num = BigInt::from_str(digits).map_err(|e| format!("bad decimal {s:?}: {e}"))?;
        let den = BigInt::from(10u8).pow(digits.len() as u32);
        return Ok(Rational::from_integer(int) + Rational::new(num, den) * BigInt::from(sign));
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|e| format!("bad number {s:?}: {e}"))
}

/// Decimal string with `digits` places, rounded toward −∞ (a sound lower
/// endpoint for a reported enclosure).
pub fn decimal_floor(r: &Rational, digits: u32) -> String {
    decimal_directed(r, digits, false)
}

/// Decimal string with `digits` places, rounded toward +∞ (a sound upper
/// endpoint for a reported enclosure).
pub fn decimal_ceil(r: &Rational, digits: u32) -> String {
    decimal_directed(r, digits, true)
}

fn decimal_directed(r: &Rational, digits: u32, up: bool) -> String {
    let scale = BigInt::from(10u8).pow(digits);
    let scaled = r * &scale;
    let n = if up {
        scaled.ceil().to_integer()
    } else {
        scaled.floor().to_integer()
    };
    let neg = n.is_negative();
    let mag = n.magnitude().to_string();
    let mag = if mag.len() <= digits as usize {
        format!("{}{}", "0".repeat(digits as usize + 1 - mag.len()), mag)
    } else {
        mag
    };
    let split = mag.len() - digits as usize;
    let (int, frac) = mag.split_at(split);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

/// Serde field helper: big integers as decimal strings (they can exceed
/// every native JSON number width).
pub fn bigint_string<S: serde::Serializer>(x: &Integer, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Digits used when enclosure endpoints are reported as decimals.
pub const ENCLOSURE_DIGITS: u32 = 18;

/// Serde field helper: a lower enclosure endpoint as a decimal string,
/// rounded toward −∞ when the value is an exact rational. Floats are
/// emitted verbatim — their outward padding is applied before storage.
pub fn value_decimal_down<S: serde::Serializer>(
    v: &crate::value::Value,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v.as_exact() {
        Some(r) => s.serialize_str(&decimal_floor(r, ENCLOSURE_DIGITS)),
        None => s.serialize_str(&format!("{}", v.to_f64())),
    }
}

/// Serde field helper: an upper enclosure endpoint as a decimal string,
/// rounded toward +∞ when the value is an exact rational.
pub fn value_decimal_up<S: serde::Serializer>(
    v: &crate::value::Value,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v.as_exact() {
        Some(r) => s.serialize_str(&decimal_ceil(r, ENCLOSURE_DIGITS)),
        None => s.serialize_str(&format!("{}", v.to_f64())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        for s in ["3/7", "-5/2", "12", "0", "-4"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(rational_string(&r), s);
        }
        assert_eq!(parse_rational("0.125").unwrap(), Rational::new(1.into(), 8.into()));
        assert_eq!(parse_rational("-1.5").unwrap(), Rational::new((-3).into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn directed_decimals_bracket_the_value() {
        let r = parse_rational("1/3").unwrap();
        assert_eq!(decimal_floor(&r, 4), "0.3333");
        assert_eq!(decimal_ceil(&r, 4), "0.3334");
        let neg = parse_rational("-1/3").unwrap();
        assert_eq!(decimal_floor(&neg, 4), "-0.3334");
        assert_eq!(decimal_ceil(&neg, 4), "-0.3333");
        // Exact decimals round to themselves on both sides.
        let exact = parse_rational("1/4").unwrap();
        assert_eq!(decimal_floor(&exact, 4), "0.2500");
        assert_eq!(decimal_ceil(&exact, 4), "0.2500");
    }
}
