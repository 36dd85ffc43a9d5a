//! Normal forms for elements of the solvable groups ⟨a, b | a b a⁻¹ = bⁿ⟩.
//!
//! Every element acts on the projective line as `x ↦ nᵏ·x + t` with `k ∈ ℤ`
//! and `t ∈ ℤ[1/n]`, and the pair `(k, t)` is a complete invariant. The
//! translation part is kept as `num / n^exp` with `exp` minimal, so equality
//! of elements is plain field equality.

use std::fmt;

use num_integer::Integer as IntegerOps;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::circle::{CircleError, CircleMap, MoebiusMap};
use crate::serialize::rational_string;
use crate::{Integer, Rational};

use super::word::{Letter, Word};

#[derive(Debug, Error)]
pub enum BsError {
    #[error("base n must be at least 2, got {0}")]
    BadBase(u32),
    #[error("mixed bases {0} and {1} in one operation")]
    BaseMismatch(u32, u32),
    #[error("{0} is not an n-adic rational for n = {1}")]
    NotNAdic(Rational, u32),
    #[error(transparent)]
    Circle(#[from] CircleError),
}

/// A rational of the form `num / n^exp`, with `exp` minimal (`exp = 0` or
/// `n ∤ num`). The base `n` lives in the owning [`BsElement`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NAdic {
    num: Integer,
    exp: u32,
}

impl NAdic {
    pub fn zero() -> Self {
        NAdic {
            num: Integer::zero(),
            exp: 0,
        }
    }

    pub fn from_integer(m: impl Into<Integer>) -> Self {
        NAdic {
            num: m.into(),
            exp: 0,
        }
    }

    fn normalized(mut num: Integer, mut exp: u32, n: u32) -> Self {
        let base = Integer::from(n);
        if num.is_zero() {
            return NAdic::zero();
        }
        while exp > 0 && (&num % &base).is_zero() {
            num /= &base;
            exp -= 1;
        }
        NAdic { num, exp }
    }

    /// Parses a rational as `num / n^exp`; errors when the denominator has a
    /// prime factor outside `n`.
    pub fn from_rational(r: &Rational, n: u32) -> Result<Self, BsError> {
        let base = Integer::from(n);
        let mut denom = r.denom().clone();
        let mut exp: u32 = 0;
        while !denom.is_one() {
            let g = denom.gcd(&base);
            if g.is_one() {
                return Err(BsError::NotNAdic(r.clone(), n));
            }
            denom /= &g;
            exp += 1;
        }
        // r = numer/denom with denom | n^exp: num = numer · n^exp / denom.
        let scale = base.pow(exp);
        let num = r.numer() * (&scale / r.denom());
        Ok(Self::normalized(num, exp, n))
    }

    pub fn to_rational(&self, n: u32) -> Rational {
        Rational::new(self.num.clone(), Integer::from(n).pow(self.exp))
    }

    pub fn numerator(&self) -> &Integer {
        &self.num
    }

    /// Minimal `e` with `n^e · t ∈ ℤ`.
    pub fn depth(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn add(&self, other: &NAdic, n: u32) -> NAdic {
        let base = Integer::from(n);
        let exp = self.exp.max(other.exp);
        let num = &self.num * base.pow(exp - self.exp) + &other.num * base.pow(exp - other.exp);
        Self::normalized(num, exp, n)
    }

    fn neg(&self) -> NAdic {
        NAdic {
            num: -self.num.clone(),
            exp: self.exp,
        }
    }

    /// Multiplication by `n^k` (either sign of `k`).
    fn shift(&self, k: i64, n: u32) -> NAdic {
        if self.num.is_zero() {
            return NAdic::zero();
        }
        let base = Integer::from(n);
        if k >= 0 {
            Self::normalized(&self.num * base.pow(k as u32), self.exp, n)
        } else {
            // Re-normalize: `num` may be divisible by `n` when `exp` was 0.
            Self::normalized(self.num.clone(), self.exp + (-k) as u32, n)
        }
    }
}

/// A group element in normal coordinates: the affine action `x ↦ nᵏ·x + t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BsElement {
    n: u32,
    k: i64,
    t: NAdic,
}

impl BsElement {
    pub fn identity(n: u32) -> Self {
        BsElement {
            n,
            k: 0,
            t: NAdic::zero(),
        }
    }

    /// The generator `a`, acting as `x ↦ n·x`.
    pub fn gen_a(n: u32) -> Self {
        BsElement {
            n,
            k: 1,
            t: NAdic::zero(),
        }
    }

    /// The generator `b`, acting as `x ↦ x + 1`.
    pub fn gen_b(n: u32) -> Self {
        BsElement {
            n,
            k: 0,
            t: NAdic::from_integer(1),
        }
    }

    pub fn new(n: u32, k: i64, t: NAdic) -> Result<Self, BsError> {
        if n < 2 {
            return Err(BsError::BadBase(n));
        }
        let t = NAdic::normalized(t.num, t.exp, n);
        Ok(BsElement { n, k, t })
    }

    pub fn base(&self) -> u32 {
        self.n
    }

    /// The scaling exponent: the element acts as `x ↦ n^k·x + t`.
    pub fn scaling_exponent(&self) -> i64 {
        self.k
    }

    pub fn translation(&self) -> &NAdic {
        &self.t
    }

    pub fn translation_rational(&self) -> Rational {
        self.t.to_rational(self.n)
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0 && self.t.is_zero()
    }

    /// Group law: `(k₁,t₁)·(k₂,t₂) = (k₁+k₂, t₁ + n^{k₁}·t₂)`, i.e. the
    /// composition of the affine maps with `self` outermost.
    pub fn compose(&self, other: &BsElement) -> BsElement {
        assert_eq!(
            self.n, other.n,
            "cannot compose elements over different bases"
        );
        BsElement {
            n: self.n,
            k: self.k + other.k,
            t: self.t.add(&other.t.shift(self.k, self.n), self.n),
        }
    }

    pub fn inverse(&self) -> BsElement {
        // (k,t)⁻¹ = (−k, −n^{−k}·t).
        BsElement {
            n: self.n,
            k: -self.k,
            t: self.t.neg().shift(-self.k, self.n),
        }
    }

    pub fn pow(&self, m: i64) -> BsElement {
        if m < 0 {
            return self.inverse().pow(-m);
        }
        let mut result = BsElement::identity(self.n);
        let mut base = self.clone();
        let mut e = m as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.compose(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base);
            }
        }
        result
    }

    fn letter(n: u32, l: Letter) -> BsElement {
        match l {
            Letter::A => Self::gen_a(n),
            Letter::AInv => Self::gen_a(n).inverse(),
            Letter::B => Self::gen_b(n),
            Letter::BInv => Self::gen_b(n).inverse(),
        }
    }

    /// Evaluates a word (leftmost letter outermost).
    pub fn from_word(n: u32, w: &Word) -> Result<BsElement, BsError> {
        if n < 2 {
            return Err(BsError::BadBase(n));
        }
        let mut acc = BsElement::identity(n);
        for &l in w.letters() {
            acc = acc.compose(&Self::letter(n, l));
        }
        Ok(acc)
    }

    /// The canonical word `a^{−p} b^q a^r` with `p = max(depth(t), −k)`,
    /// `q = t·n^p`, `r = k + p`. Inverse to [`Self::from_word`].
    pub fn canonical_word(&self) -> Word {
        let e = self.t.depth() as i64;
        let p = e.max(-self.k).max(0);
        let q_nadic = self.t.shift(p, self.n);
        debug_assert_eq!(q_nadic.depth(), 0, "t·n^p must be an integer");
        let q = q_nadic.num.clone();
        let r = self.k + p;
        let mut w = Word::power(Letter::A, -p);
        // b^q with q a big integer: expand literally (words are for display
        // and small exponents; the element form is the compact one).
        let q_i64 = i64::try_from(&q).unwrap_or_else(|_| {
            panic!("canonical word exponent {q} too large to expand")
        });
        w = w.concat(&Word::power(Letter::B, q_i64));
        w.concat(&Word::power(Letter::A, r))
    }

    /// The element as a fractional-linear map `x ↦ n^k·x + t`.
    pub fn to_moebius(&self) -> MoebiusMap {
        let n_big = Integer::from(self.n);
        let scale = if self.k >= 0 {
            Rational::from(n_big.pow(self.k as u32))
        } else {
            Rational::new(Integer::one(), n_big.pow((-self.k) as u32))
        };
        MoebiusMap::from_affine(&scale, &self.translation_rational())
            .expect("positive scale is always valid")
    }

    pub fn to_circle_map(&self) -> CircleMap {
        CircleMap::Moebius(self.to_moebius())
    }

    /// Substitutes concrete circle maps for the generators (`a ↦ h`,
    /// `b ↦ f`) in the canonical word of this element.
    pub fn realize(&self, h: &CircleMap, f: &CircleMap) -> Result<CircleMap, CircleError> {
        realize_word(&self.canonical_word(), h, f)
    }
}

/// Substitutes `a ↦ h`, `b ↦ f` into a word (leftmost letter outermost).
pub fn realize_word(
    w: &Word,
    h: &CircleMap,
    f: &CircleMap,
) -> Result<CircleMap, CircleError> {
    let mut acc = CircleMap::identity();
    for &l in w.letters() {
        let factor = match l {
            Letter::A => h.clone(),
            Letter::AInv => h.inverse()?,
            Letter::B => f.clone(),
            Letter::BInv => f.inverse()?,
        };
        acc = acc.compose(&factor);
    }
    Ok(acc)
}

impl fmt::Display for BsElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x ↦ {}^{}·x + {}",
            self.n,
            self.k,
            rational_string(&self.translation_rational())
        )
    }
}

impl Serialize for BsElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("BsElement", 4)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("k", &self.k)?;
        s.serialize_field("t", &rational_string(&self.translation_rational()))?;
        s.serialize_field("word", &self.canonical_word().to_string())?;
        s.end()
    }
}
