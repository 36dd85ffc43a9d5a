//! Piecewise-linear circle homeomorphisms in the angular chart.
//!
//! A map is stored as its canonical lift `F: ℝ → ℝ` (increasing, with
//! `F(x+1) = F(x)+1` and `F(0) ∈ [0,1)`), sampled at its breakpoints in
//! `[0,1)`. The breakpoint 0 is always present as an anchor, interior
//! collinear knots are merged, and the vertical offset is normalized, so two
//! equal maps have identical representations and `==` decides equality of
//! maps. Composition, inversion, evaluation, and fixed-point location are
//! exact on exact data; approximate inputs route through cached `f64`
//! shadows of the knot arrays.

use std::sync::OnceLock;

use serde::Serialize;

use crate::value::Value;
use crate::Integer;

use super::{ArcInterval, CircleError, Side};

#[derive(Clone, Debug, Default)]
struct Shadow {
    knots: Vec<f64>,
    vals: Vec<f64>,
    slopes: Vec<f64>,
}

/// A piecewise-linear, orientation-preserving circle homeomorphism.
#[derive(Clone, Debug, Serialize)]
pub struct PlCircleMap {
    /// Breakpoints, strictly ascending in [0,1), always starting with 0.
    knots: Vec<Value>,
    /// Lift values at the breakpoints; `vals[0] ∈ [0,1)`, strictly
    /// increasing, with the wrap piece closing up to `vals[0] + 1` at 1.
    vals: Vec<Value>,
    #[serde(skip)]
    shadow: OnceLock<Shadow>,
    /// Exact per-piece slopes, seeded at construction (or filled on first
    /// demand) so repeated slope queries never redo big-rational divisions.
    #[serde(skip)]
    slopes: OnceLock<Vec<Value>>,
}

impl PartialEq for PlCircleMap {
    fn eq(&self, other: &Self) -> bool {
        self.knots == other.knots && self.vals == other.vals
    }
}

impl PlCircleMap {
    /// Builds the map from any set of points `(x, F(x))` on the graph of any
    /// lift: coordinates are folded into the base period, a knot at 0 is
    /// interpolated if missing, the vertical offset is normalized, and
    /// collinear interior knots are merged.
    pub fn from_lift_graph(
        pairs: impl IntoIterator<Item = (Value, Value)>,
    ) -> Result<Self, CircleError> {
        let mut folded: Vec<(Value, Value)> = pairs
            .into_iter()
            .map(|(x, y)| {
                let shift = x.floor();
                let shift_value = Value::Exact(crate::Rational::from(shift));
                (&x - &shift_value, &y - &shift_value)
            })
            .collect();
        if folded.is_empty() {
            return Err(CircleError::InvalidMap("empty lift graph".into()));
        }
        folded.sort_by(|p, q| p.0.cmp(&q.0));
        let mut pairs: Vec<(Value, Value)> = Vec::with_capacity(folded.len());
        for (x, y) in folded {
            match pairs.last() {
                Some((px, py)) if *px == x => {
                    if *py != y {
                        return Err(CircleError::InvalidMap(format!(
                            "inconsistent lift values {py} and {y} at {x}"
                        )));
                    }
                }
                _ => pairs.push((x, y)),
            }
        }
        // Interpolate the missing knot at 0 across the wrap piece.
        if !pairs[0].0.is_zero() {
            let (first_x, first_y) = pairs.first().cloned().expect("nonempty");
            let (last_x, last_y) = pairs.last().cloned().expect("nonempty");
            let one = Value::one();
            let (prev_x, prev_y) = (&last_x - &one, &last_y - &one);
            let run = &first_x - &prev_x;
            if run <= Value::zero() {
                return Err(CircleError::InvalidMap(
                    "wrap piece has nonpositive width".into(),
                ));
            }
            let slope = &(&first_y - &prev_y) / &run;
            let at_zero = &prev_y + &(&slope * &(-&prev_x));
            pairs.insert(0, (Value::zero(), at_zero));
        }
        let offset = pairs[0].1.floor();
        let offset_value = Value::Exact(crate::Rational::from(offset));
        let knots: Vec<Value> = pairs.iter().map(|(x, _)| x.clone()).collect();
        let vals: Vec<Value> = pairs.iter().map(|(_, y)| y - &offset_value).collect();
        Self::from_canonical_arrays(knots, vals)
    }

    /// Direct constructor from already-normalized arrays (validated).
    pub fn from_knot_values(knots: Vec<Value>, vals: Vec<Value>) -> Result<Self, CircleError> {
        Self::from_canonical_arrays(knots, vals)
    }

    fn from_canonical_arrays(knots: Vec<Value>, vals: Vec<Value>) -> Result<Self, CircleError> {
        if knots.is_empty() || knots.len() != vals.len() {
            return Err(CircleError::InvalidMap(
                "knot and value arrays must be nonempty and equal-length".into(),
            ));
        }
        if !knots[0].is_zero() {
            return Err(CircleError::InvalidMap(
                "canonical knot array must start at 0".into(),
            ));
        }
        if vals[0] < Value::zero() || vals[0] >= Value::one() {
            return Err(CircleError::InvalidMap(format!(
                "lift value at 0 must lie in [0,1), got {}",
                vals[0]
            )));
        }
        let one = Value::one();
        for i in 0..knots.len() {
            let (next_knot, next_val) = if i + 1 < knots.len() {
                (knots[i + 1].clone(), vals[i + 1].clone())
            } else {
                (one.clone(), &vals[0] + &one)
            };
            if next_knot <= knots[i] || knots[i] < Value::zero() || next_knot > one {
                return Err(CircleError::InvalidMap(
                    "knots must be strictly ascending within [0,1)".into(),
                ));
            }
            if next_val <= vals[i] {
                return Err(CircleError::InvalidMap(
                    "lift values must be strictly increasing (orientation-preserving)".into(),
                ));
            }
        }
        let map = PlCircleMap {
            knots,
            vals,
            shadow: OnceLock::new(),
            slopes: OnceLock::new(),
        };
        Ok(map.merged())
    }

    /// Removes interior knots whose two adjacent pieces share a slope. The
    /// anchor knot 0 is always kept.
    fn merged(self) -> Self {
        let k = self.knots.len();
        if k <= 1 {
            return self;
        }
        let slopes: Vec<Value> = (0..k).map(|i| self.slope(i)).collect();
        let mut knots = Vec::with_capacity(k);
        let mut vals = Vec::with_capacity(k);
        let mut kept_slopes = Vec::with_capacity(k);
        for i in 0..k {
            if i == 0 || slopes[i - 1] != slopes[i] {
                knots.push(self.knots[i].clone());
                vals.push(self.vals[i].clone());
                // A merged run of collinear pieces keeps its common slope.
                kept_slopes.push(slopes[i].clone());
            }
        }
        let slope_cache = OnceLock::new();
        slope_cache.set(kept_slopes).ok();
        PlCircleMap {
            knots,
            vals,
            shadow: OnceLock::new(),
            slopes: slope_cache,
        }
    }

    pub fn identity() -> Self {
        let slopes = OnceLock::new();
        slopes.set(vec![Value::one()]).ok();
        PlCircleMap {
            knots: vec![Value::zero()],
            vals: vec![Value::zero()],
            shadow: OnceLock::new(),
            slopes,
        }
    }

    /// The rigid rotation by `c` (mod 1).
    pub fn rotation(c: impl Into<Value>) -> Self {
        let slopes = OnceLock::new();
        slopes.set(vec![Value::one()]).ok();
        PlCircleMap {
            knots: vec![Value::zero()],
            vals: vec![c.into().frac()],
            shadow: OnceLock::new(),
            slopes,
        }
    }

    pub fn knots(&self) -> &[Value] {
        &self.knots
    }

    pub fn lift_values(&self) -> &[Value] {
        &self.vals
    }

    pub fn piece_count(&self) -> usize {
        self.knots.len()
    }

    pub fn is_identity(&self) -> bool {
        self.knots.len() == 1 && self.knots[0].is_zero() && self.vals[0].is_zero()
    }

    /// Slope of piece `i` (the piece starting at `knots[i]`; the last piece
    /// wraps up to lift value `vals[0] + 1` at 1).
    pub fn slope(&self, i: usize) -> Value {
        if let Some(cache) = self.slopes.get() {
            return cache[i].clone();
        }
        let one = Value::one();
        let (next_knot, next_val) = if i + 1 < self.knots.len() {
            (self.knots[i + 1].clone(), self.vals[i + 1].clone())
        } else {
            (one.clone(), &self.vals[0] + &one)
        };
        &(&next_val - &self.vals[i]) / &(&next_knot - &self.knots[i])
    }

    /// Index of the piece containing angular coordinate `theta ∈ [0,1)`.
    fn piece_index(&self, theta: &Value) -> usize {
        // Largest i with knots[i] <= theta.
        let mut lo = 0usize;
        let mut hi = self.knots.len();
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.knots[mid] <= *theta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn shadow(&self) -> &Shadow {
        self.shadow.get_or_init(|| Shadow {
            knots: self.knots.iter().map(Value::to_f64).collect(),
            vals: self.vals.iter().map(Value::to_f64).collect(),
            slopes: (0..self.knots.len())
                .map(|i| self.slope(i).to_f64())
                .collect(),
        })
    }

    /// Canonical-lift evaluation at any real `x`, exact on exact input.
    pub fn lift_at(&self, x: &Value) -> Value {
        if let Value::Approx(xf) = x {
            return Value::approx(self.lift_at_f64(*xf));
        }
        let shift = x.floor();
        let shift_value = Value::Exact(crate::Rational::from(shift));
        let theta = x - &shift_value;
        let i = self.piece_index(&theta);
        let y = &self.vals[i] + &(&self.slope(i) * &(&theta - &self.knots[i]));
        &y + &shift_value
    }

    /// Float lift evaluation through the cached shadow arrays.
    pub fn lift_at_f64(&self, x: f64) -> f64 {
        let s = self.shadow();
        let shift = x.floor();
        let theta = x - shift;
        let i = match s.knots.partition_point(|k| *k <= theta) {
            0 => 0,
            j => j - 1,
        };
        s.vals[i] + s.slopes[i] * (theta - s.knots[i]) + shift
    }

    /// Angular evaluation: `frac(F(frac(x)))`.
    pub fn eval_angular(&self, theta: &Value) -> Value {
        self.lift_at(&theta.frac()).frac()
    }

    /// Exact inverse of the canonical lift at any real `y`.
    pub fn lift_inverse_at(&self, y: &Value) -> Value {
        if let Value::Approx(yf) = y {
            return Value::approx(self.lift_inverse_at_f64(*yf));
        }
        let shift = (y - &self.vals[0]).floor();
        let shift_value = Value::Exact(crate::Rational::from(shift));
        let base = y - &shift_value; // in [vals[0], vals[0] + 1)
        let mut lo = 0usize;
        let mut hi = self.vals.len();
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.vals[mid] <= base {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = &self.knots[lo] + &(&(&base - &self.vals[lo]) / &self.slope(lo));
        &x + &shift_value
    }

    fn lift_inverse_at_f64(&self, y: f64) -> f64 {
        let s = self.shadow();
        let shift = (y - s.vals[0]).floor();
        let base = y - shift;
        let i = match s.vals.partition_point(|v| *v <= base) {
            0 => 0,
            j => j - 1,
        };
        s.knots[i] + (base - s.vals[i]) / s.slopes[i] + shift
    }

    /// Exact composition `self ∘ other`.
    pub fn compose(&self, other: &PlCircleMap) -> PlCircleMap {
        let mut breakpoints: Vec<Value> = other.knots.clone();
        for k in &self.knots {
            // The unique preimage of (k + m) under other's lift inside [0, 1).
            let m = (&other.vals[0] - k).ceil();
            let target = k + &Value::Exact(crate::Rational::from(m));
            let x = other.lift_inverse_at(&target);
            debug_assert!(x >= Value::zero() && x < Value::one());
            breakpoints.push(x.frac());
        }
        breakpoints.sort();
        breakpoints.dedup();
        let pairs: Vec<(Value, Value)> = breakpoints
            .into_iter()
            .map(|x| {
                let y = self.lift_at(&other.lift_at(&x));
                (x, y)
            })
            .collect();
        Self::from_lift_graph(pairs).expect("composition of valid maps is valid")
    }

    /// Exact inverse map.
    pub fn inverse(&self) -> PlCircleMap {
        let pairs: Vec<(Value, Value)> = self
            .knots
            .iter()
            .zip(&self.vals)
            .map(|(x, y)| (y.clone(), x.clone()))
            .collect();
        Self::from_lift_graph(pairs).expect("inverse of a valid map is valid")
    }

    /// Derivative at an interior point of a piece; errs at true breakpoints.
    pub fn derivative_at(&self, theta: &Value) -> Result<Value, CircleError> {
        let theta = theta.frac();
        let i = self.piece_index(&theta);
        if self.knots[i] == theta && !self.left_right_equal(i) {
            return Err(CircleError::Breakpoint(theta.to_f64()));
        }
        Ok(self.slope(i))
    }

    fn left_right_equal(&self, knot_index: usize) -> bool {
        let left = if knot_index == 0 {
            self.slope(self.knots.len() - 1)
        } else {
            self.slope(knot_index - 1)
        };
        left == self.slope(knot_index)
    }

    /// One-sided derivative (left limit or right limit) at any point.
    pub fn one_sided_derivative(&self, theta: &Value, side: Side) -> Value {
        let theta = theta.frac();
        let i = self.piece_index(&theta);
        match side {
            Side::Right => self.slope(i),
            Side::Left => {
                if self.knots[i] == theta {
                    if i == 0 {
                        self.slope(self.knots.len() - 1)
                    } else {
                        self.slope(i - 1)
                    }
                } else {
                    self.slope(i)
                }
            }
        }
    }

    /// Arc covered by piece `i` on the circle.
    fn piece_arc(&self, i: usize) -> ArcInterval {
        if self.knots.len() == 1 {
            return ArcInterval::full();
        }
        let next = if i + 1 < self.knots.len() {
            self.knots[i + 1].clone()
        } else {
            Value::zero()
        };
        ArcInterval::from_endpoints(self.knots[i].clone(), next)
    }

    /// Minimum slope over a closed arc, with an angular witness coordinate
    /// inside the minimizing piece. Exact.
    ///
    /// Only the pieces the arc can touch are examined: the contiguous index
    /// range from the piece holding `arc.lo()` to the piece holding
    /// `arc.hi()` (split in two when the arc wraps through 0), plus the
    /// piece ending exactly at `arc.lo()` when the arc starts on a knot.
    pub fn min_slope_on(&self, arc: &ArcInterval) -> (Value, Value) {
        let n = self.knots.len();
        let mut candidates: Vec<usize> = Vec::new();
        if n == 1 || arc.is_full() {
            candidates.extend(0..n);
        } else {
            let lo_theta = arc.lo().frac();
            let lo_idx = self.piece_index(&lo_theta);
            let hi_theta = arc.hi();
            let hi_idx = self.piece_index(&hi_theta);
            if arc.lo() + arc.length() >= Value::one() {
                candidates.extend(lo_idx..n);
                candidates.extend(0..=hi_idx);
            } else {
                candidates.extend(lo_idx..=hi_idx);
            }
            if lo_theta == self.knots[lo_idx] {
                candidates.push((lo_idx + n - 1) % n);
            }
            candidates.sort_unstable();
            candidates.dedup();
        }
        let mut best: Option<(Value, Value)> = None;
        for i in candidates {
            let piece = self.piece_arc(i);
            if !arc.intersects(&piece) {
                continue;
            }
            // A point witnessing the intersection: one of the four endpoints
            // always lies in both closed arcs.
            let witness = if arc.contains(&self.knots[i]) {
                self.knots[i].clone()
            } else if piece.contains(arc.lo()) {
                arc.lo().clone()
            } else if piece.contains(&arc.hi()) {
                arc.hi()
            } else {
                piece.hi()
            };
            let slope = self.slope(i);
            if best.as_ref().map_or(true, |(bs, _)| slope < *bs) {
                best = Some((slope, witness));
            }
        }
        best.expect("every arc meets at least one piece")
    }

    /// All fixed-point loci: isolated fixed points as degenerate arcs,
    /// pointwise-fixed pieces as full-width arcs. Exact.
    pub fn fixed_point_arcs(&self) -> Vec<ArcInterval> {
        let one = Value::one();
        let mut arcs: Vec<ArcInterval> = Vec::new();
        for i in 0..self.knots.len() {
            let (next_knot, _) = if i + 1 < self.knots.len() {
                (self.knots[i + 1].clone(), self.vals[i + 1].clone())
            } else {
                (one.clone(), &self.vals[0] + &one)
            };
            let s = self.slope(i);
            for m in [Integer::from(0), Integer::from(1)] {
                let m_value = Value::Exact(crate::Rational::from(m));
                if s == Value::one() {
                    // Identity piece iff the offset matches m exactly.
                    if &self.vals[i] - &self.knots[i] == m_value {
                        arcs.push(ArcInterval::from_endpoints(
                            self.knots[i].clone(),
                            next_knot.frac(),
                        ));
                    }
                    continue;
                }
                // Solve vals[i] + s·(x − knots[i]) = x + m on the piece.
                let num = &(&self.vals[i] - &(&s * &self.knots[i])) - &m_value;
                let den = &Value::one() - &s;
                let x = &num / &den;
                if x >= self.knots[i] && x < next_knot {
                    arcs.push(ArcInterval::point(x));
                }
            }
        }
        arcs.sort_by(|a, b| a.lo().cmp(b.lo()));
        arcs.dedup();
        arcs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_piece() -> PlCircleMap {
        PlCircleMap::from_knot_values(
            vec![Value::zero(), Value::ratio(1, 2)],
            vec![Value::zero(), Value::ratio(3, 4)],
        )
        .unwrap()
    }

    #[test]
    fn evaluation_is_exact() {
        let f = two_piece();
        assert_eq!(f.eval_angular(&Value::ratio(1, 4)), Value::ratio(3, 8));
        assert_eq!(f.eval_angular(&Value::ratio(3, 4)), Value::ratio(7, 8));
        assert!(f.eval_angular(&Value::ratio(3, 4)).is_exact());
    }

    #[test]
    fn lift_has_degree_one() {
        let f = two_piece();
        for i in 0..10 {
            let x = Value::ratio(i, 7);
            let shifted = f.lift_at(&(&x + &Value::one()));
            assert_eq!(shifted, &f.lift_at(&x) + &Value::one());
        }
    }

    #[test]
    fn inverse_round_trips_exactly() {
        let f = two_piece();
        let g = f.inverse();
        assert_eq!(
            g.knots(),
            &[Value::zero(), Value::ratio(3, 4)],
            "inverse breakpoints are the images of the original ones"
        );
        for i in 0..12 {
            let x = Value::ratio(i, 12);
            assert_eq!(g.eval_angular(&f.eval_angular(&x)), x.frac());
        }
        assert!(f.compose(&g).is_identity());
        assert!(g.compose(&f).is_identity());
    }

    #[test]
    fn composition_matches_pointwise_evaluation() {
        let f = two_piece();
        let r = PlCircleMap::rotation(Value::ratio(1, 3));
        let fr = f.compose(&r);
        for i in 0..24 {
            let x = Value::ratio(i, 24);
            assert_eq!(fr.eval_angular(&x), f.eval_angular(&r.eval_angular(&x)));
        }
    }

    #[test]
    fn rotation_composition_adds_angles() {
        let r1 = PlCircleMap::rotation(Value::ratio(1, 3));
        let r2 = PlCircleMap::rotation(Value::ratio(5, 6));
        let r = r1.compose(&r2);
        assert_eq!(r, PlCircleMap::rotation(Value::ratio(1, 6)));
    }

    #[test]
    fn collinear_knots_merge() {
        let f = PlCircleMap::from_knot_values(
            vec![Value::zero(), Value::ratio(1, 4), Value::ratio(1, 2)],
            vec![Value::zero(), Value::ratio(3, 8), Value::ratio(3, 4)],
        )
        .unwrap();
        assert_eq!(f, two_piece());
        assert_eq!(f.piece_count(), 2);
    }

    #[test]
    fn zero_knot_is_interpolated() {
        let f = PlCircleMap::from_lift_graph(vec![
            (Value::ratio(1, 4), Value::ratio(1, 2)),
            (Value::ratio(3, 4), Value::ratio(7, 8)),
        ])
        .unwrap();
        assert_eq!(
            f.knots(),
            &[Value::zero(), Value::ratio(1, 4), Value::ratio(3, 4)]
        );
        assert_eq!(f.lift_values()[0], Value::ratio(3, 16));
    }

    #[test]
    fn derivative_detects_breakpoints() {
        let f = two_piece();
        assert!(matches!(
            f.derivative_at(&Value::ratio(1, 2)),
            Err(CircleError::Breakpoint(_))
        ));
        assert_eq!(f.derivative_at(&Value::ratio(1, 4)).unwrap(), Value::ratio(3, 2));
        assert_eq!(
            f.one_sided_derivative(&Value::ratio(1, 2), Side::Left),
            Value::ratio(3, 2)
        );
        assert_eq!(
            f.one_sided_derivative(&Value::ratio(1, 2), Side::Right),
            Value::ratio(1, 2)
        );
    }

    #[test]
    fn fixed_points_of_two_piece_map() {
        let f = two_piece();
        let arcs = f.fixed_point_arcs();
        assert_eq!(arcs, vec![ArcInterval::point(Value::zero())]);
    }

    #[test]
    fn identity_pieces_become_fixed_arcs() {
        // Identity on [0, 1/2], a bump on [1/2, 1].
        let f = PlCircleMap::from_knot_values(
            vec![Value::zero(), Value::ratio(1, 2), Value::ratio(3, 4)],
            vec![Value::zero(), Value::ratio(1, 2), Value::ratio(7, 8)],
        )
        .unwrap();
        let arcs = f.fixed_point_arcs();
        assert!(arcs
            .iter()
            .any(|a| *a == ArcInterval::from_endpoints(Value::zero(), Value::ratio(1, 2))));
    }

    #[test]
    fn min_slope_is_found_on_subarc() {
        let f = two_piece();
        let (slope, _) = f.min_slope_on(&ArcInterval::from_endpoints(
            Value::ratio(1, 8),
            Value::ratio(3, 8),
        ));
        assert_eq!(slope, Value::ratio(3, 2));
        let (slope, _) = f.min_slope_on(&ArcInterval::full());
        assert_eq!(slope, Value::ratio(1, 2));
    }

    #[test]
    fn float_shadow_tracks_exact_path() {
        let f = two_piece();
        for i in 0..50 {
            let x = i as f64 / 50.0;
            let exact = f.lift_at(&Value::ratio(i, 50)).to_f64();
            let float = f.lift_at_f64(x);
            assert!((exact - float).abs() < 1e-12);
        }
    }
}
