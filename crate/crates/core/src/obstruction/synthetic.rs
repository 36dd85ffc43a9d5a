//! A finite-depth Denjoy-like candidate pair that the growth certificate
//! refutes.
//!
//! The pair is built to satisfy every configuration-level precondition on
//! the nose — `h` is a rigid rotation (distortion-free), `f` is a
//! piecewise-linear bump supported on the disjoint windows
//! `J_s = h^{−s}(J)`, and the conjugation relation `h∘f∘h⁻¹ = fⁿ` holds
//! exactly on the constructed windows up to the chosen depth — while no
//! genuine C¹ action can extend it.  The certificate exposes this: beyond
//! the construction depth the word family piles up duplicate images and the
//! measured lengths outgrow `|J|`.
//!
//! Design:
//!
//! * `h` = rotation by `21/34`. The backward offsets `s·13/34 (mod 1)` are
//!   pairwise distinct with gaps ≥ `1/34` for `s ≤ 20`, so windows of width
//!   `1/48 < 1/34` are pairwise disjoint to every depth used here.
//! * On the unit window, the seed bump is the 2-piece map with slopes
//!   `1/λ` on `[0, a]` and `λ` on `[a, 1]`, `a = λ/(1+λ)`, with
//!   `λ = (8K−1)/(8K)` and `K = n^depth`.  Its `K`-th power has minimum
//!   slope `λ^K`, so the measured distortion is `ε = 1 − λ^K ≈ 1 − e^{−1/8}`
//!   and `(1−ε)² = (1 − 1/(8K))^{2K} > 3/4` for every `K ≥ 1` — the
//!   admissibility margin is built in.
//! * Window `J_s` carries the local model of `f₀^{nˢ}` (scaled into it), so
//!   `h∘f∘h⁻¹ = fⁿ` holds exactly on `J_s` for `s < depth` and breaks
//!   beyond — the honest finite-depth scope.
//! * The base interval `I = (x₀, f(x₀))` starts at the orbit point
//!   `x₀ = c + W·a·λ^K`, whose forward `f`-orbit inside `J` hits the corner
//!   `a` exactly and telescopes: the `2^{depth+1}` first orbit arcs tile
//!   `(x₀, x₀ + W·ε)` with total length exactly `ε·W`.
//!
//! The seed only shifts the window anchor `c`; the combinatorial structure
//! is deterministic.

use num_traits::pow::pow as rat_pow;

use crate::circle::{ArcInterval, CircleError, CircleMap, PlCircleMap};
use crate::value::Value;

use super::{ObsInterval, ObstructionConfig, ObstructionError};

/// Rotation amount for `h`.
pub const ROTATION_NUM: i64 = 21;
pub const ROTATION_DEN: i64 = 34;

/// Window width `W = 1/48`.
const WINDOW_DEN: i64 = 48;

/// Budget on `K = n^depth`: the assembled map carries `O(K)` knots per
/// window, with knot coordinates of `O(K log K)` digits, so construction
/// and certificate cost grow quadratically in `K`.
const MAX_LOCAL_POWER: u64 = 1024;

/// Beyond this depth the windows would cross the angular wrap and the knot
/// assembly below would be invalid.
const MAX_DEPTH: u32 = 12;

/// Recommended certificate budget returned in the config: the standard
/// `n = 2` construction contradicts at `m = depth + 4`.
const RECOMMENDED_M_SLACK: u32 = 6;

/// Build the candidate pair `(f, h)` together with the obstruction
/// configuration (measured `ε`, the window `J`, the base interval `I`, and
/// depth budgets) that makes the growth certificate refute it.
pub fn synthetic_denjoy_pair(
    n: u32,
    depth: u32,
    seed: u64,
) -> Result<(CircleMap, CircleMap, ObstructionConfig), ObstructionError> {
    if n < 2 {
        return Err(ObstructionError::ConstructionFailed(format!(
            "scaling exponent must be at least 2, got {n}"
        )));
    }
    if depth == 0 || depth > MAX_DEPTH {
        return Err(ObstructionError::ConstructionFailed(format!(
            "depth must be in 1..={MAX_DEPTH}, got {depth}"
        )));
    }
    let local_power = (u64::from(n))
        .checked_pow(depth)
        .filter(|&p| p <= MAX_LOCAL_POWER)
        .ok_or_else(|| {
            ObstructionError::ConstructionFailed(format!(
                "n^depth = {n}^{depth} exceeds the knot budget {MAX_LOCAL_POWER}"
            ))
        })?;

    // λ = (8K−1)/(8K), a = λ/(1+λ): gentle enough that even the K-th power
    // keeps its minimum slope λ^K above 1 − ε with (1−ε)² > 3/4.
    let eight_k = i64::try_from(8 * local_power).expect("8K fits in i64");
    let lambda = Value::ratio(eight_k - 1, eight_k);
    let a = &lambda / &(&Value::one() + &lambda);

    // Local seed bump on the unit window: slopes 1/λ then λ, fixing 0.
    let local_value_at_a = &a / &lambda;
    let local_bump = PlCircleMap::from_knot_values(
        vec![Value::zero(), a.clone()],
        vec![Value::zero(), local_value_at_a],
    )?;

    // powers[s] = (local bump)^{n^s}, via powers[s+1] = powers[s]^n.
    let mut powers: Vec<PlCircleMap> = vec![local_bump];
    for s in 1..=depth {
        let prev = &powers[(s - 1) as usize];
        let mut acc = prev.clone();
        for _ in 1..n {
            acc = acc.compose(prev);
        }
        powers.push(acc);
    }

    // Window anchors: J_s = h^{−s}(J) sits at c + s·13/34 (mod 1); the
    // chosen c keeps every window used here clear of the wrap.
    let w = Value::ratio(1, WINDOW_DEN);
    let c_base = &Value::ratio(1, 100)
        + &Value::ratio(i64::try_from(seed % 64).expect("small"), 2000);
    let mut anchors: Vec<(Value, u32)> = (0..=depth)
        .map(|s| {
            let offset = Value::ratio(
                (i64::from(s) * (ROTATION_DEN - ROTATION_NUM)).rem_euclid(ROTATION_DEN),
                ROTATION_DEN,
            );
            (&c_base + &offset, s)
        })
        .collect();
    anchors.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite values"));
    let top = &anchors.last().expect("nonempty").0 + &w;
    if top >= Value::one() {
        return Err(ObstructionError::ConstructionFailed(format!(
            "window at anchor {} crosses the wrap",
            anchors.last().expect("nonempty").0
        )));
    }

    // Assemble f: identity outside the windows, window s carrying the
    // local n^s-power scaled into it.
    let mut knots: Vec<Value> = vec![Value::zero()];
    let mut vals: Vec<Value> = vec![Value::zero()];
    for (anchor, s) in &anchors {
        let local = &powers[*s as usize];
        for (kappa, val) in local.knots().iter().zip(local.lift_values()) {
            knots.push(anchor + &(&w * kappa));
            vals.push(anchor + &(&w * val));
        }
        knots.push(anchor + &w);
        vals.push(anchor + &w);
    }
    let f_pl = PlCircleMap::from_knot_values(knots, vals).map_err(|e: CircleError| {
        ObstructionError::ConstructionFailed(format!("window assembly: {e}"))
    })?;
    let f = CircleMap::PlCircle(f_pl);
    let h = CircleMap::rotation(Value::ratio(ROTATION_NUM, ROTATION_DEN));

    // Measured distortion: min f′ over all windows is λ^K exactly.
    let lambda_k = Value::Exact(rat_pow(
        match lambda.as_exact() {
            Some(r) => r.clone(),
            None => unreachable!("lambda is exact by construction"),
        },
        usize::try_from(local_power).expect("local power fits usize"),
    ));
    let epsilon = &Value::one() - &lambda_k;

    // Base interval: x₀ = c + W·a·λ^K sits on the forward orbit of the
    // corner, so the first 2·K orbit arcs telescope to ε·W exactly.
    let x0 = &c_base + &(&w * &(&a * &lambda_k));
    let fx0 = f.evaluate(&crate::circle::CirclePoint::angular(x0.clone()));
    let i_arc = ArcInterval::from_endpoints(x0, fx0.angular_value());
    let j_arc = ArcInterval::from_endpoints(c_base.clone(), &c_base + &w);

    let cfg = ObstructionConfig {
        epsilon,
        j: ObsInterval::circle(j_arc),
        i: ObsInterval::circle(i_arc),
        m_max: depth + RECOMMENDED_M_SLACK,
        s_max: depth,
    };
    Ok((f, h, cfg))
}
