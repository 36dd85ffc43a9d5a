//! Piecewise-affine circle homeomorphisms in the projective chart, fixing ∞.
//!
//! A map is stored as its corner list `(t_i, y_i)` (both coordinates strictly
//! ascending). Between consecutive corners the map is affine; outside the
//! corner range — the single piece running through ∞ — it is the affine map
//! through the two extreme corners, which is forced for any piecewise-affine
//! circle homeomorphism with finitely many corners. Composition, inversion,
//! evaluation, and fixed points are exact on exact data.
//!
//! These maps compose exactly with affine fractional-linear maps, which makes
//! them the representation of choice for conjugating the affine standard
//! action without leaving exact arithmetic.

use serde::Serialize;

use crate::value::{exact_sqrt, Value};

use super::{ArcInterval, Chart, CircleError, CirclePoint, ProjPoint};

/// A piecewise-affine, orientation-preserving circle homeomorphism fixing ∞.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlLineMap {
    /// Corners `(t_i, y_i)`, strictly ascending in both coordinates, ≥ 2
    /// entries; only essential corners are kept.
    pairs: Vec<(Value, Value)>,
}

/// A connected component of the fixed-point set of a [`PlLineMap`].
#[derive(Clone, Debug, PartialEq)]
pub enum PlLineFixed {
    Point(ProjPoint),
    /// A closed segment `[lo, hi]` of the line, pointwise fixed.
    Segment(Value, Value),
    /// The closed set `[hi, +∞] ∪ [−∞, lo]` through ∞, pointwise fixed
    /// (stored as the pair of finite ends `(hi, lo)`).
    SegmentThroughInfinity(Value, Value),
}

impl PlLineMap {
    pub fn new(pairs: Vec<(Value, Value)>) -> Result<Self, CircleError> {
        let mut pairs = pairs;
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        pairs.dedup();
        if pairs.len() < 2 {
            return Err(CircleError::InvalidMap(
                "a corner list needs at least two distinct corners".into(),
            ));
        }
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(CircleError::InvalidMap(format!(
                    "two corners share coordinate {}",
                    w[0].0
                )));
            }
            if w[0].1 >= w[1].1 {
                return Err(CircleError::InvalidMap(
                    "corner values must be strictly increasing (orientation-preserving)".into(),
                ));
            }
        }
        Ok(Self::canonical(pairs))
    }

    /// Keeps only corners where the slope actually changes (the piece through
    /// ∞ participates in the cyclic comparison); affine maps normalize to
    /// corners at 0 and 1.
    fn canonical(pairs: Vec<(Value, Value)>) -> Self {
        let l = pairs.len();
        let slope = |i: usize, j: usize| -> Value {
            &(&pairs[j].1 - &pairs[i].1) / &(&pairs[j].0 - &pairs[i].0)
        };
        let outside = slope(0, l - 1);
        let mut kept: Vec<(Value, Value)> = Vec::with_capacity(l);
        for i in 0..l {
            let before = if i == 0 { outside.clone() } else { slope(i - 1, i) };
            let after = if i == l - 1 { outside.clone() } else { slope(i, i + 1) };
            if before != after {
                kept.push(pairs[i].clone());
            }
        }
        if kept.len() >= 2 {
            return PlLineMap { pairs: kept };
        }
        // All slopes equal: the map is affine y = s·t + c.
        debug_assert!(kept.is_empty(), "a single essential corner cannot exist");
        let s = outside;
        let c = &pairs[0].1 - &(&s * &pairs[0].0);
        PlLineMap {
            pairs: vec![(Value::zero(), c.clone()), (Value::one(), &s + &c)],
        }
    }

    pub fn identity() -> Self {
        PlLineMap {
            pairs: vec![
                (Value::zero(), Value::zero()),
                (Value::one(), Value::one()),
            ],
        }
    }

    /// The affine map `t ↦ slope·t + offset` (slope must be positive).
    pub fn from_affine(slope: impl Into<Value>, offset: impl Into<Value>) -> Result<Self, CircleError> {
        let s = slope.into();
        let c = offset.into();
        if s <= Value::zero() {
            return Err(CircleError::InvalidMap(format!(
                "affine slope {s} must be positive"
            )));
        }
        PlLineMap::new(vec![(Value::zero(), c.clone()), (Value::one(), &s + &c)])
    }

    pub fn corners(&self) -> &[(Value, Value)] {
        &self.pairs
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.len() == 2
            && self.pairs[0] == (Value::zero(), Value::zero())
            && self.pairs[1] == (Value::one(), Value::one())
    }

    /// Slope and offset of the piece through ∞.
    pub fn outside_affine(&self) -> (Value, Value) {
        let first = &self.pairs[0];
        let last = &self.pairs[self.pairs.len() - 1];
        let slope = &(&last.1 - &first.1) / &(&last.0 - &first.0);
        let offset = &first.1 - &(&slope * &first.0);
        (slope, offset)
    }

    fn piece_affine(&self, i: usize) -> (Value, Value) {
        let (a, b) = (&self.pairs[i], &self.pairs[i + 1]);
        let slope = &(&b.1 - &a.1) / &(&b.0 - &a.0);
        let offset = &a.1 - &(&slope * &a.0);
        (slope, offset)
    }

    /// Affine data (slope, offset) of the piece containing `t`, corners going
    /// to their right piece, outside pieces sharing the wrap data.
    fn affine_at(&self, t: &Value) -> (Value, Value) {
        let first = &self.pairs[0].0;
        let last = &self.pairs[self.pairs.len() - 1].0;
        if t < first || t >= last {
            return self.outside_affine();
        }
        // Largest i with pairs[i].0 <= t.
        let mut lo = 0usize;
        let mut hi = self.pairs.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.pairs[mid].0 <= *t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.piece_affine(lo)
    }

    pub fn eval(&self, p: &ProjPoint) -> ProjPoint {
        match p {
            ProjPoint::Infinity => ProjPoint::Infinity,
            ProjPoint::Finite(t) => {
                let (s, c) = self.affine_at(t);
                ProjPoint::Finite(&(&s * t) + &c)
            }
        }
    }

    /// Exact composition `self ∘ other`.
    pub fn compose(&self, other: &PlLineMap) -> PlLineMap {
        let other_inv = other.inverse_unchecked();
        let mut ts: Vec<Value> = other.pairs.iter().map(|(t, _)| t.clone()).collect();
        for (t, _) in &self.pairs {
            if let ProjPoint::Finite(x) = other_inv.eval(&ProjPoint::Finite(t.clone())) {
                ts.push(x);
            }
        }
        ts.sort();
        ts.dedup();
        let pairs: Vec<(Value, Value)> = ts
            .into_iter()
            .map(|t| {
                let y = match self.eval(&other.eval(&ProjPoint::Finite(t.clone()))) {
                    ProjPoint::Finite(y) => y,
                    ProjPoint::Infinity => unreachable!("finite points stay finite"),
                };
                (t, y)
            })
            .collect();
        PlLineMap::new(pairs).expect("composition of valid maps is valid")
    }

    pub fn inverse(&self) -> PlLineMap {
        self.inverse_unchecked()
    }

    fn inverse_unchecked(&self) -> PlLineMap {
        let pairs: Vec<(Value, Value)> = self
            .pairs
            .iter()
            .map(|(t, y)| (y.clone(), t.clone()))
            .collect();
        PlLineMap::new(pairs).expect("inverse of a valid map is valid")
    }

    /// Derivative in the projective chart at finite `t` (the piece slope);
    /// corners take their right slope — use [`Self::angular_derivative`] for
    /// chart-correct values on the circle.
    pub fn projective_slope_at(&self, t: &Value) -> Value {
        self.affine_at(t).0
    }

    /// Derivative in the angular chart. At finite `t` with image `y` and
    /// piece slope `s` this is `s·(1+t²)/(1+y²)`; at ∞ it is the reciprocal
    /// of the slope through ∞. Exact on exact input.
    pub fn angular_derivative(&self, p: &ProjPoint) -> Value {
        match p {
            ProjPoint::Infinity => {
                let (s, _) = self.outside_affine();
                &Value::one() / &s
            }
            ProjPoint::Finite(t) => {
                let (s, c) = self.affine_at(t);
                let y = &(&s * t) + &c;
                let one = Value::one();
                &(&s * &(&one + &(t * t))) / &(&one + &(&y * &y))
            }
        }
    }

    /// Connected components of the fixed-point set. Exact.
    pub fn fixed_points(&self) -> Vec<PlLineFixed> {
        let mut out: Vec<PlLineFixed> = Vec::new();
        let (alpha, beta) = self.outside_affine();
        let first = &self.pairs[0].0;
        let last = &self.pairs[self.pairs.len() - 1].0;
        let one = Value::one();
        if alpha == one && beta.is_zero() {
            out.push(PlLineFixed::SegmentThroughInfinity(
                last.clone(),
                first.clone(),
            ));
        } else {
            out.push(PlLineFixed::Point(ProjPoint::Infinity));
            if alpha != one {
                let t = &beta / &(&one - &alpha);
                if &t <= first || &t >= last {
                    out.push(PlLineFixed::Point(ProjPoint::Finite(t)));
                }
            }
        }
        for i in 0..self.pairs.len() - 1 {
            let (s, c) = self.piece_affine(i);
            let (lo, hi) = (&self.pairs[i].0, &self.pairs[i + 1].0);
            if s == one {
                if c.is_zero() {
                    out.push(PlLineFixed::Segment(lo.clone(), hi.clone()));
                }
                continue;
            }
            let t = &c / &(&one - &s);
            if &t >= lo && &t <= hi {
                out.push(PlLineFixed::Point(ProjPoint::Finite(t)));
            }
        }
        out.dedup();
        out
    }

    /// Lower bound for the angular derivative over an angular arc, with a
    /// projective witness. Candidates: arc endpoints, ∞ when the arc crosses
    /// angular 0, corners inside the arc, and interior critical points of the
    /// derivative on each piece (membership resolved inclusively, so the
    /// bound only ever errs downward).
    pub fn min_angular_derivative_on(&self, arc: &ArcInterval) -> (Value, ProjPoint) {
        let mut candidates: Vec<ProjPoint> = Vec::new();
        for endpoint in [
            CirclePoint::Angular(arc.lo().clone()),
            CirclePoint::Angular(arc.hi()),
        ] {
            match endpoint.convert(Chart::Projective) {
                CirclePoint::Projective(p) => candidates.push(p),
                CirclePoint::Angular(_) => unreachable!(),
            }
        }
        if arc.contains(&Value::zero()) {
            candidates.push(ProjPoint::Infinity);
        }
        let margin = 1e-9;
        let push_if_in_arc = |t: Value, candidates: &mut Vec<ProjPoint>| {
            let theta = CirclePoint::Projective(ProjPoint::Finite(t.clone()))
                .angular_value()
                .to_f64();
            let inside = arc.contains(&Value::approx(theta))
                || arc.contains(&Value::approx(theta + margin).frac())
                || arc.contains(&Value::approx(theta - margin).frac());
            if inside {
                candidates.push(ProjPoint::Finite(t));
            }
        };
        for (t, _) in &self.pairs {
            push_if_in_arc(t.clone(), &mut candidates);
        }
        // Critical points of s(1+t²)/(1+(st+c)²) per piece:
        // s·c·t² + (1 + c² − s²)·t − s·c = 0.
        let mut pieces: Vec<(Value, Value)> =
            (0..self.pairs.len() - 1).map(|i| self.piece_affine(i)).collect();
        pieces.push(self.outside_affine());
        for (s, c) in pieces {
            let sc = &s * &c;
            let one = Value::one();
            let lin = &(&one + &(&c * &c)) - &(&s * &s);
            let roots: Vec<Value> = if sc.is_zero() {
                if lin.is_zero() {
                    vec![]
                } else {
                    vec![Value::zero()]
                }
            } else {
                let disc = &(&lin * &lin) + &(&Value::from_int(4) * &(&sc * &sc));
                let two_sc = &Value::from_int(2) * &sc;
                match disc.as_exact().and_then(exact_sqrt) {
                    Some(root) => {
                        let root = Value::Exact(root);
                        vec![
                            &(&(-&lin) + &root) / &two_sc,
                            &(&(-&lin) - &root) / &two_sc,
                        ]
                    }
                    None => {
                        let d = disc.to_f64().sqrt();
                        let l = lin.to_f64();
                        let q = two_sc.to_f64();
                        vec![
                            Value::approx((-l + d) / q),
                            Value::approx((-l - d) / q),
                        ]
                    }
                }
            };
            for t in roots {
                push_if_in_arc(t, &mut candidates);
            }
        }
        let mut best: Option<(Value, ProjPoint)> = None;
        for cand in candidates {
            let v = self.angular_derivative(&cand);
            if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
                best = Some((v, cand));
            }
        }
        best.expect("at least the endpoints are candidates")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Identity outside [−1, 1], with a corner pulling 0 up to 1/2.
    fn bump() -> PlLineMap {
        PlLineMap::new(vec![
            (Value::from_int(-1), Value::from_int(-1)),
            (Value::zero(), Value::ratio(1, 2)),
            (Value::one(), Value::one()),
        ])
        .unwrap()
    }

    #[test]
    fn evaluation_inside_and_outside() {
        let f = bump();
        assert_eq!(
            f.eval(&ProjPoint::finite(Value::ratio(-1, 2))),
            ProjPoint::finite(Value::ratio(-1, 4))
        );
        assert_eq!(
            f.eval(&ProjPoint::finite(Value::from_int(7))),
            ProjPoint::finite(Value::from_int(7)),
            "outside the corners the map is the identity here"
        );
        assert_eq!(f.eval(&ProjPoint::Infinity), ProjPoint::Infinity);
    }

    #[test]
    fn affine_maps_canonicalize() {
        let f = PlLineMap::new(vec![
            (Value::from_int(-5), Value::from_int(-9)),
            (Value::from_int(2), Value::from_int(5)),
            (Value::from_int(3), Value::from_int(7)),
        ])
        .unwrap();
        // All slopes are 2: y = 2t + 1.
        assert_eq!(f, PlLineMap::from_affine(Value::from_int(2), Value::one()).unwrap());
    }

    #[test]
    fn inverse_round_trips_exactly() {
        let f = bump();
        let g = f.inverse();
        for i in -20..20 {
            let t = ProjPoint::finite(Value::ratio(i, 7));
            assert_eq!(g.eval(&f.eval(&t)), t);
        }
        assert!(f.compose(&g).is_identity());
    }

    #[test]
    fn composition_matches_pointwise_evaluation() {
        let f = bump();
        let g = PlLineMap::from_affine(Value::from_int(2), Value::ratio(1, 3)).unwrap();
        let fg = f.compose(&g);
        for i in -30..30 {
            let t = ProjPoint::finite(Value::ratio(i, 11));
            assert_eq!(fg.eval(&t), f.eval(&g.eval(&t)));
        }
    }

    #[test]
    fn translation_fixes_only_infinity() {
        let f = PlLineMap::from_affine(Value::one(), Value::one()).unwrap();
        assert_eq!(f.fixed_points(), vec![PlLineFixed::Point(ProjPoint::Infinity)]);
    }

    #[test]
    fn scaling_fixes_zero_and_infinity() {
        let f = PlLineMap::from_affine(Value::from_int(2), Value::zero()).unwrap();
        let fixed = f.fixed_points();
        assert!(fixed.contains(&PlLineFixed::Point(ProjPoint::Infinity)));
        assert!(fixed.contains(&PlLineFixed::Point(ProjPoint::finite(Value::zero()))));
    }

    #[test]
    fn identity_outside_region_gives_segment_through_infinity() {
        let f = bump();
        let fixed = f.fixed_points();
        assert!(fixed.contains(&PlLineFixed::SegmentThroughInfinity(
            Value::one(),
            Value::from_int(-1)
        )));
    }

    #[test]
    fn angular_derivative_matches_scaling_reference() {
        // t ↦ 2t: angular derivative at ∞ is 1/2, at 0 it is 2.
        let f = PlLineMap::from_affine(Value::from_int(2), Value::zero()).unwrap();
        assert_eq!(f.angular_derivative(&ProjPoint::Infinity), Value::ratio(1, 2));
        assert_eq!(
            f.angular_derivative(&ProjPoint::finite(Value::zero())),
            Value::from_int(2)
        );
        let (min, _) = f.min_angular_derivative_on(&ArcInterval::full());
        assert_eq!(min, Value::ratio(1, 2));
    }

    #[test]
    fn corners_absorb_affine_composition() {
        let f = bump();
        let a = PlLineMap::from_affine(Value::from_int(2), Value::zero()).unwrap();
        let fa = f.compose(&a);
        // Still piecewise-affine with corner preimages at ±1/2 and 0.
        let corner_ts: Vec<Value> = fa.corners().iter().map(|(t, _)| t.clone()).collect();
        assert!(corner_ts.contains(&Value::ratio(-1, 2)));
        assert!(corner_ts.contains(&Value::zero()));
        assert!(corner_ts.contains(&Value::ratio(1, 2)));
    }
}
