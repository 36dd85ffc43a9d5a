//! Reproducible example actions.
//!
//! Everything here is deterministic in an explicit seed: the affine pair
//! itself, piecewise-linear conjugators in either chart, and conjugated
//! copies of the affine pair.  These are the stock ingredients for tests
//! and for the scenario runner's generator keywords.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circle::{CircleError, CircleMap, PlCircleMap, PlLineMap};
use crate::value::Value;

/// The affine pair `(f0, h0)` = (x ↦ x + 1, x ↦ n·x) acting on ℝ ∪ {∞}.
pub fn affine_pair(n: u32) -> (CircleMap, CircleMap) {
    (CircleMap::unit_translation(), CircleMap::scaling(i64::from(n)))
}

/// Conjugate the affine pair into new coordinates: returns
/// `(φ⁻¹∘f0∘φ, φ⁻¹∘h0∘φ)`, so that `φ` itself is the (semi)conjugacy back
/// onto the affine pair.
pub fn conjugated_pair(n: u32, phi: &CircleMap) -> Result<(CircleMap, CircleMap), CircleError> {
    let (f0, h0) = affine_pair(n);
    let phi_inv = phi.inverse()?;
    let f = f0.conjugate_by(&phi_inv)?;
    let h = h0.conjugate_by(&phi_inv)?;
    Ok((f, h))
}

/// A seeded piecewise-linear circle homeomorphism in the angular chart,
/// with dyadic knots and values on the grid ℤ/256.
///
/// The result has 3–6 pieces, is exactly representable, and is orientation
/// preserving; seed 0, 1, 2, … give distinct maps.
pub fn random_angular_conjugator(seed: u64) -> CircleMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pieces = rng.gen_range(3usize..=6);
    // Interior knots: distinct dyadics in (0, 1); knot 0 is always present.
    let mut grid: Vec<i64> = (1..256).collect();
    grid.shuffle(&mut rng);
    let mut knot_ticks: Vec<i64> = grid[..pieces - 1].to_vec();
    knot_ticks.sort_unstable();
    let mut knots = vec![Value::zero()];
    knots.extend(knot_ticks.iter().map(|&t| Value::ratio(t, 256)));
    // Values: the images of the knots, any strictly increasing dyadic list
    // inside one period.
    let mut grid: Vec<i64> = (0..256).collect();
    grid.shuffle(&mut rng);
    let mut val_ticks: Vec<i64> = grid[..pieces].to_vec();
    val_ticks.sort_unstable();
    let vals: Vec<Value> = val_ticks.iter().map(|&t| Value::ratio(t, 256)).collect();
    let map = PlCircleMap::from_knot_values(knots, vals)
        .expect("distinct sorted dyadic knots and values always form a homeomorphism");
    CircleMap::PlCircle(map)
}

/// A seeded piecewise-linear homeomorphism of ℝ ∪ {∞} in the projective
/// chart that is the identity outside `[-3, 3]`.
///
/// Corner abscissas are dyadics on the grid ℤ/8; corner values are chosen
/// from the points `q / n^p` with `p + |q| ≤ value_depth`, which is exactly
/// the set of translation parts reachable from 0 by group words of length
/// ≤ `value_depth` in the affine pair.  Conjugating by such a map keeps the
/// whole distinguished orbit piecewise-affine-compatible with the sample
/// tables built at that depth.
pub fn random_projective_conjugator(seed: u64, n: u32, value_depth: u32) -> CircleMap {
    assert!(n >= 2 && value_depth >= 4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corners = rng.gen_range(3usize..=5);

    // Candidate corner values: q / n^p in (-3, 3) reachable at value_depth.
    let mut pool: Vec<crate::Rational> = Vec::new();
    let three = crate::Rational::from_integer(3.into());
    for p in 0..value_depth {
        let budget = (value_depth - p) as i64;
        let scale = crate::Rational::new(1.into(), num_traits::pow::pow(crate::Integer::from(n), p as usize));
        for q in -budget..=budget {
            if q == 0 && p > 0 {
                continue;
            }
            let y = crate::Rational::from_integer(q.into()) * &scale;
            if y > -&three && y < three && !pool.contains(&y) {
                pool.push(y);
            }
        }
    }
    pool.shuffle(&mut rng);
    let mut values: Vec<crate::Rational> = pool[..corners].to_vec();
    values.sort();

    // Corner abscissas: distinct dyadics on ℤ/8 strictly inside (-3, 3).
    let mut ticks: Vec<i64> = (-23..=23).collect();
    ticks.shuffle(&mut rng);
    let mut xs: Vec<i64> = ticks[..corners].to_vec();
    xs.sort_unstable();

    let mut pairs: Vec<(Value, Value)> = vec![(Value::from_int(-3), Value::from_int(-3))];
    pairs.extend(
        xs.iter()
            .zip(values)
            .map(|(&x, y)| (Value::ratio(x, 8), Value::Exact(y))),
    );
    pairs.push((Value::from_int(3), Value::from_int(3)));
    let map = PlLineMap::new(pairs)
        .expect("sorted distinct corners with increasing values form a homeomorphism");
    CircleMap::PlLine(map)
}
