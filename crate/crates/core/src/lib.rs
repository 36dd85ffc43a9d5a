//! Exact and validated numerics for the affine actions of the solvable
//! Baumslag–Solitar groups BS(1,n) = ⟨a, b | a b a⁻¹ = bⁿ⟩ on the circle.
//!
//! The crate provides:
//!
//! - [`circle`]: circle points in two charts (angular ℝ/ℤ and projective
//!   ℝ ∪ {∞}), exact circle homeomorphism representations (Möbius,
//!   piecewise-linear in either chart, rigid rotations, oracles), lifts,
//!   and arcs with exact lengths;
//! - [`bs`]: words and normal forms in BS(1,n), exact group arithmetic over
//!   ℤ[1/n], and realization of words as circle maps;
//! - [`rotation`]: rotation-number enclosures with the a-priori width bound
//!   2/N, rational detection, and the n·ρ = ρ + l integer extraction;
//! - [`orbit`]: certified fixed-point enclosures and the common-fixed-point
//!   iteration for pairs satisfying h f h⁻¹ = fⁿ;
//! - [`obstruction`]: the length-growth obstruction to C¹ wandering
//!   dynamics — ε-admissibility, wandering/derivative preconditions, the
//!   2^(m+1)-member word family, the per-factor length ledger, the growth
//!   certificate, and a synthetic finite-depth wandering pair generator;
//! - [`semiconjugacy`]: monotone sample tables transporting a given action
//!   onto the standard affine model, with order checks and sup-defect
//!   measurement.
//!
//! All structural arithmetic (group elements, piecewise-linear data, Möbius
//! matrices, arc endpoints) is exact over arbitrary-precision rationals;
//! floating point appears only where a chart change is transcendental, and
//! every validated quantity tracks the slack it incurred.

pub mod bs;
pub mod circle;
pub mod fixtures;
pub mod obstruction;
pub mod orbit;
pub mod rotation;
pub mod semiconjugacy;
pub mod serialize;
pub mod value;

pub use circle::{CircleMap, CirclePoint, Chart};
pub use value::Value;

/// Crate-wide rational type: arbitrary-precision fractions.
pub type Rational = num_rational::BigRational;
/// Crate-wide integer type backing [`Rational`].
pub type Integer = num_bigint::BigInt;

#[cfg(test)]
mod thread_safety {
    use super::*;

    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn maps_and_points_are_send_sync() {
        assert_send_sync::<CircleMap>();
        assert_send_sync::<CirclePoint>();
        assert_send_sync::<bs::BsElement>();
    }
}
