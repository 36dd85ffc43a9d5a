//! Certified fixed-point enclosures and the common-fixed-point iteration.
//!
//! A pair `(f, h)` with `h∘f∘h⁻¹ = fⁿ` pushes fixed points around:
//! if `q` is fixed by `f^k` then `h(q)` is fixed by `f^{n·k}`, and when
//! `ρ(h^m) = 0` the iterates `h^{m·l}(q)` accumulate on a common fixed
//! point of `f^{n−1}` and `h^m`.  This module locates fixed points (exactly
//! where the representation allows, by grid-plus-bisection otherwise),
//! checks the invariance identity on them, finds the smallest power of `h`
//! with rotation number zero, and runs the accumulation iteration with a
//! post-hoc verification of both displacement tests.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::circle::{angular_distance, ArcInterval, CircleError, CircleMap, CirclePoint};
use crate::rotation::{rational_rotation_detect, DETECT_QMAX, DETECT_TOL};
use crate::value::Value;

/// Default sampling resolution for the numeric fixed-point search.
pub const DEFAULT_GRID: usize = 2048;
/// Default width/displacement tolerance for numeric enclosures.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum OrbitError {
    /// The map moved every sampled point by more than the tolerance and no
    /// displacement sign change was seen: consistent with an irrational
    /// rotation at this resolution.
    #[error("no fixed point found (min sampled |displacement| = {min_displacement:.3e})")]
    NoFixedPoint { min_displacement: f64 },
    /// The accumulation iteration never produced a verified common fixed
    /// point: either the tolerance is too tight or the hypothesis
    /// (`ρ(h^m) = 0` with `f`-fixed points) fails for this pair.
    #[error("iteration produced no verified common fixed point in {iterations} steps")]
    NotConverged { iterations: u32 },
    #[error(transparent)]
    Circle(#[from] CircleError),
}

/// Disjoint sorted arcs, each certified to contain a fixed point of the
/// analyzed map (which is the `power`-th iterate of the caller's map when
/// built through [`fixed_point_enclosures_of_power`]).
#[derive(Debug, Clone, Serialize)]
pub struct FixedPointSet {
    pub intervals: Vec<ArcInterval>,
    /// Width tolerance the numeric refinement was run to; exact enclosures
    /// (width 0, endpoints exact) ignore it.
    pub tol: f64,
    /// The iterate whose fixed points these are, relative to the caller's
    /// base map: `intervals` certify fixed points of `f^power`.
    pub power: u32,
}

impl FixedPointSet {
    /// A representative point of each enclosure: the exact endpoint for
    /// point enclosures, the midpoint otherwise.
    pub fn representatives(&self) -> Vec<CirclePoint> {
        self.intervals
            .iter()
            .map(|arc| {
                if arc.is_point() || arc.is_full() {
                    arc.lo_point()
                } else {
                    CirclePoint::angular(arc.midpoint())
                }
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Locate fixed points of `map`: exactly for rotations, Möbius,
/// piecewise-linear and identity-conjugated composite maps; by
/// grid-plus-bisection on the lift displacement otherwise.
pub fn fixed_point_enclosures(
    map: &CircleMap,
    grid: usize,
    tol: f64,
) -> Result<FixedPointSet, OrbitError> {
    assert!(grid >= 2, "need at least two grid points");
    let intervals = enclosure_intervals(map, grid, tol)?;
    Ok(FixedPointSet {
        intervals,
        tol,
        power: 1,
    })
}

/// Locate fixed points of `f^power` (so the set's `power` field carries the
/// analyzed iterate for later invariance checks).
pub fn fixed_point_enclosures_of_power(
    f: &CircleMap,
    power: u32,
    grid: usize,
    tol: f64,
) -> Result<FixedPointSet, OrbitError> {
    assert!(power >= 1);
    let iterate = f.pow(i64::from(power))?;
    let mut set = fixed_point_enclosures(&iterate, grid, tol)?;
    set.power = power;
    Ok(set)
}

fn enclosure_intervals(
    map: &CircleMap,
    grid: usize,
    tol: f64,
) -> Result<Vec<ArcInterval>, OrbitError> {
    match map {
        CircleMap::Rotation(c) => {
            let d = c.frac();
            if d.is_zero() {
                // The identity fixes everything.
                return Ok(vec![ArcInterval::full()]);
            }
            let df = d.to_f64().min(1.0 - d.to_f64());
            Err(OrbitError::NoFixedPoint {
                min_displacement: df,
            })
        }
        CircleMap::Moebius(mo) => {
            use crate::circle::MoebiusFixedPoints;
            match mo.fixed_points() {
                MoebiusFixedPoints::Identity => Ok(vec![ArcInterval::full()]),
                MoebiusFixedPoints::None => Err(OrbitError::NoFixedPoint {
                    min_displacement: numeric_min_displacement(map, grid),
                }),
                MoebiusFixedPoints::Points(pts) => {
                    let mut arcs: Vec<ArcInterval> = pts
                        .into_iter()
                        .map(|p| ArcInterval::point(point_angular(&proj_to_point(p))))
                        .collect();
                    sort_arcs(&mut arcs);
                    Ok(arcs)
                }
            }
        }
        CircleMap::PlCircle(pl) => {
            let mut arcs = pl.fixed_point_arcs();
            if arcs.is_empty() {
                return Err(OrbitError::NoFixedPoint {
                    min_displacement: numeric_min_displacement(map, grid),
                });
            }
            sort_arcs(&mut arcs);
            Ok(arcs)
        }
        CircleMap::PlLine(pl) => {
            use crate::circle::PlLineFixed;
            if pl.is_identity() {
                return Ok(vec![ArcInterval::full()]);
            }
            let fixed = pl.fixed_points();
            if fixed.is_empty() {
                return Err(OrbitError::NoFixedPoint {
                    min_displacement: numeric_min_displacement(map, grid),
                });
            }
            let mut arcs: Vec<ArcInterval> = fixed
                .into_iter()
                .map(|fx| match fx {
                    PlLineFixed::Point(p) => ArcInterval::point(point_angular(&proj_to_point(p))),
                    PlLineFixed::Segment(lo, hi) => ArcInterval::from_endpoints(
                        point_angular(&CirclePoint::projective(lo)),
                        point_angular(&CirclePoint::projective(hi)),
                    ),
                    // [hi, +∞] ∪ [−∞, lo]: one arc through the point ∞.
                    PlLineFixed::SegmentThroughInfinity(hi, lo) => ArcInterval::from_endpoints(
                        point_angular(&CirclePoint::projective(hi)),
                        point_angular(&CirclePoint::projective(lo)),
                    ),
                })
                .collect();
            sort_arcs(&mut arcs);
            Ok(arcs)
        }
        CircleMap::Composite(fs) if fs.len() >= 3 => {
            // Conjugation-aware path: for P ∘ (middle) ∘ Q with P∘Q = id,
            // fixed sets transport exactly: Fix(P∘mid∘P⁻¹) = P(Fix(mid)).
            let p = &fs[0];
            let q = &fs[fs.len() - 1];
            if p.compose(q).is_identity() {
                let middle = if fs.len() == 3 {
                    fs[1].clone()
                } else {
                    CircleMap::Composite(fs[1..fs.len() - 1].to_vec())
                };
                let inner = enclosure_intervals(&middle, grid, tol)?;
                let mut arcs: Vec<ArcInterval> =
                    inner.iter().map(|arc| p.image_arc(arc)).collect();
                sort_arcs(&mut arcs);
                return Ok(arcs);
            }
            numeric_enclosures(map, grid, tol)
        }
        _ => numeric_enclosures(map, grid, tol),
    }
}

fn proj_to_point(p: crate::circle::ProjPoint) -> CirclePoint {
    match p {
        crate::circle::ProjPoint::Infinity => CirclePoint::infinity(),
        crate::circle::ProjPoint::Finite(v) => CirclePoint::projective(v),
    }
}

fn point_angular(p: &CirclePoint) -> Value {
    p.angular_value()
}

fn sort_arcs(arcs: &mut [ArcInterval]) {
    arcs.sort_by(|a, b| {
        a.lo()
            .partial_cmp(b.lo())
            .expect("angular coordinates are totally ordered")
    });
}

/// Minimum of |displacement| over the sample grid, for diagnostics.
fn numeric_min_displacement(map: &CircleMap, grid: usize) -> f64 {
    (0..grid)
        .map(|i| {
            let x = i as f64 / grid as f64;
            let d = map.lift_eval_f64(x) - x;
            (d - d.round()).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Grid scan of the continuous lift displacement D(x) = F(x) − x for
/// integer crossings, refined by bisection to width `tol`.
fn numeric_enclosures(
    map: &CircleMap,
    grid: usize,
    tol: f64,
) -> Result<Vec<ArcInterval>, OrbitError> {
    let disp = |x: f64| map.lift_eval_f64(x) - x;
    let xs: Vec<f64> = (0..=grid).map(|i| i as f64 / grid as f64).collect();
    let ds: Vec<f64> = xs.iter().map(|&x| disp(x)).collect();
    let mut arcs = Vec::new();
    let mut min_abs = f64::INFINITY;
    for i in 0..grid {
        let (mut a, mut b) = (xs[i], xs[i + 1]);
        let (da, db) = (ds[i], ds[i + 1]);
        min_abs = min_abs.min((da - da.round()).abs());
        if da == da.round() {
            // Exactly on an integer level at the left endpoint.
            arcs.push(ArcInterval::point(Value::approx(a)));
            continue;
        }
        if db == db.round() {
            // The root sits exactly at the right edge; the next cell's left
            // endpoint owns it (the wrap cell defers to the cell at 0).
            continue;
        }
        // A fixed point in the cell means D crosses an integer level; with
        // both endpoint values off-level, the floors differ exactly when a
        // crossing exists and the bracketing signs below are strict.
        let level = if da.floor() < db.floor() {
            db.floor()
        } else if db.floor() < da.floor() {
            da.floor()
        } else {
            continue;
        };
        let mut ga = da - level;
        while b - a > tol {
            let mid = 0.5 * (a + b);
            let gm = disp(mid) - level;
            if gm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if (gm > 0.0) == (ga > 0.0) {
                a = mid;
                ga = gm;
            } else {
                b = mid;
            }
        }
        arcs.push(ArcInterval::from_endpoints(
            Value::approx(a),
            Value::approx(b),
        ));
    }
    if arcs.is_empty() {
        return Err(OrbitError::NoFixedPoint {
            min_displacement: min_abs,
        });
    }
    Ok(arcs)
}

/// One row of [`fix_invariance_check`]: the fixed-point representative `q`,
/// the distance between `f^{n·power}(h(q))` and `h(q)`, and the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct FixInvarianceCheck {
    pub point: CirclePoint,
    pub image_distance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixInvarianceReport {
    pub checks: Vec<FixInvarianceCheck>,
    pub all_pass: bool,
}

/// For each certified fixed point `q` of `f^power`, verify that `h(q)` is
/// fixed by `f^{n·power}` to within `tol` (closed comparison, so exact
/// matches pass at `tol = 0`).
pub fn fix_invariance_check(
    f: &CircleMap,
    h: &CircleMap,
    n: u32,
    fixset: &FixedPointSet,
    tol: f64,
) -> Result<FixInvarianceReport, CircleError> {
    let big_power = f.pow(i64::from(n) * i64::from(fixset.power))?;
    let mut checks = Vec::new();
    for q in fixset.representatives() {
        let hq = h.evaluate(&q);
        let moved = big_power.evaluate(&hq);
        let dist = angular_distance(&moved, &hq);
        let pass = dist.to_f64() <= tol;
        checks.push(FixInvarianceCheck {
            point: q,
            image_distance: dist.to_f64(),
            pass,
        });
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(FixInvarianceReport { checks, all_pass })
}

/// The smallest `m ≤ mmax` whose iterate `h^m` is detected to have rotation
/// number 0 (so `h^m` has fixed points), if any.
pub fn minimal_power_m(h: &CircleMap, mmax: u32) -> Option<u32> {
    use num_traits::Zero;
    assert!(mmax >= 1);
    for m in 1..=mmax {
        let iterate = h.pow(i64::from(m)).ok()?;
        if let Some(r) = rational_rotation_detect(&iterate, DETECT_QMAX, DETECT_TOL) {
            if r.is_zero() {
                return Some(m);
            }
        }
    }
    None
}

/// Accumulation iteration: starting from a certified fixed point of
/// `f^{n−1}`, iterate `h^m` until the orbit tail settles (Cauchy window of
/// the last 10 iterates below `tol/2`), then verify both displacement
/// tests at the candidate.  The returned point always satisfies
/// `dist(f^{n−1}(u), u) ≤ tol` and `dist(h^m(u), u) ≤ tol`.
pub fn common_fixed_point(
    f: &CircleMap,
    h: &CircleMap,
    n: u32,
    m: u32,
    iters: u32,
    tol: f64,
) -> Result<CirclePoint, OrbitError> {
    assert!(n >= 2 && m >= 1);
    let fpow = f.pow(i64::from(n) - 1)?;
    let fixset = fixed_point_enclosures(&fpow, DEFAULT_GRID, tol.min(DEFAULT_TOL))?;
    let hm = h.pow(i64::from(m))?;

    let verified = |u: &CirclePoint| {
        angular_distance(&fpow.evaluate(u), u).to_f64() <= tol
            && angular_distance(&hm.evaluate(u), u).to_f64() <= tol
    };

    let start = fixset.representatives().remove(0);
    let mut p = start;
    let mut window: VecDeque<CirclePoint> = VecDeque::with_capacity(10);
    for _ in 0..=iters {
        window.push_back(p.clone());
        if window.len() > 10 {
            window.pop_front();
        }
        if window.len() == 10 && window_is_cauchy(&window, tol / 2.0) && verified(&p) {
            return Ok(p);
        }
        p = hm.evaluate(&p);
    }
    // Small iteration budgets never fill the window; still accept a
    // verified endpoint.
    if verified(&p) {
        return Ok(p);
    }
    Err(OrbitError::NotConverged { iterations: iters })
}

fn window_is_cauchy(window: &VecDeque<CirclePoint>, tol: f64) -> bool {
    for (i, a) in window.iter().enumerate() {
        for b in window.iter().skip(i + 1) {
            if angular_distance(a, b).to_f64() >= tol {
                return false;
            }
        }
    }
    true
}
