//! The unified circle-map type: one enum over all representations, with
//! composition that merges exactly whenever the algebra allows it.
//!
//! Composites are kept as explicit factor lists (outermost factor first) and
//! simplified eagerly: nested composites are flattened, identity factors are
//! dropped, and adjacent factors that compose exactly within one
//! representation — or between a piecewise-affine line map and an affine
//! fractional-linear map — are merged. This is what keeps conjugated maps in
//! the shape `[φ, core, φ⁻¹]` closed under composition and powers: the inner
//! `φ⁻¹ ∘ φ` cancels exactly and the cores merge.

use serde::Serialize;

use crate::value::Value;

use super::{
    ArcInterval, Chart, CircleError, CirclePoint, MoebiusMap, OracleMap, PlCircleMap, PlLineMap,
    ProjPoint,
};

/// Which one-sided limit to take at a corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// An orientation-preserving homeomorphism of the circle, in whichever
/// representation suits it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CircleMap {
    /// Fractional-linear map in the projective chart.
    Moebius(MoebiusMap),
    /// Piecewise-linear map in the angular chart.
    PlCircle(PlCircleMap),
    /// Piecewise-affine map of the projective line fixing ∞.
    PlLine(PlLineMap),
    /// Rigid rotation in the angular chart.
    Rotation(Value),
    /// Composition, outermost factor first: `[f, g]` is `f ∘ g`.
    Composite(Vec<CircleMap>),
    /// Black-box map through callbacks.
    Oracle(OracleMap),
}

/// Convenience free function: `compose(f, g) = f ∘ g`.
pub fn compose(f: &CircleMap, g: &CircleMap) -> CircleMap {
    f.compose(g)
}

impl CircleMap {
    pub fn identity() -> Self {
        CircleMap::Rotation(Value::zero())
    }

    pub fn moebius(a: i64, b: i64, c: i64, d: i64) -> Result<Self, CircleError> {
        Ok(CircleMap::Moebius(MoebiusMap::new(a, b, c, d)?))
    }

    /// The projective scaling `t ↦ n·t`.
    pub fn scaling(n: i64) -> Self {
        CircleMap::Moebius(MoebiusMap::new(n, 0, 0, 1).expect("positive scaling"))
    }

    /// The projective translation `t ↦ t + 1`.
    pub fn unit_translation() -> Self {
        CircleMap::Moebius(MoebiusMap::new(1, 1, 0, 1).expect("translation"))
    }

    pub fn rotation(c: impl Into<Value>) -> Self {
        CircleMap::Rotation(c.into().frac())
    }

    /// The chart in which this representation naturally evaluates.
    pub fn natural_chart(&self) -> Chart {
        match self {
            CircleMap::Moebius(_) | CircleMap::PlLine(_) => Chart::Projective,
            CircleMap::PlCircle(_) | CircleMap::Rotation(_) | CircleMap::Oracle(_) => {
                Chart::Angular
            }
            CircleMap::Composite(fs) => fs
                .first()
                .map(CircleMap::natural_chart)
                .unwrap_or(Chart::Angular),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            CircleMap::Moebius(m) => m.is_identity(),
            CircleMap::PlCircle(f) => f.is_identity(),
            CircleMap::PlLine(f) => f.is_identity(),
            CircleMap::Rotation(c) => c.frac().is_zero(),
            CircleMap::Composite(fs) => fs.is_empty(),
            CircleMap::Oracle(_) => false,
        }
    }

    pub fn evaluate(&self, p: &CirclePoint) -> CirclePoint {
        match self {
            CircleMap::Moebius(m) => {
                let pp = match p.convert(Chart::Projective) {
                    CirclePoint::Projective(pp) => pp,
                    CirclePoint::Angular(_) => unreachable!(),
                };
                CirclePoint::Projective(m.eval(&pp))
            }
            CircleMap::PlLine(f) => {
                let pp = match p.convert(Chart::Projective) {
                    CirclePoint::Projective(pp) => pp,
                    CirclePoint::Angular(_) => unreachable!(),
                };
                CirclePoint::Projective(f.eval(&pp))
            }
            CircleMap::PlCircle(f) => CirclePoint::Angular(f.eval_angular(&p.angular_value())),
            CircleMap::Rotation(c) => CirclePoint::Angular((&p.angular_value() + c).frac()),
            CircleMap::Oracle(o) => {
                CirclePoint::Angular(Value::approx(o.eval_angular(p.angular_value().to_f64())))
            }
            CircleMap::Composite(fs) => fs
                .iter()
                .rev()
                .fold(p.clone(), |q, f| f.evaluate(&q)),
        }
    }

    /// Iterated evaluation `self^k(p)` without building the power map.
    pub fn evaluate_iter(&self, p: &CirclePoint, k: u32) -> CirclePoint {
        let mut q = p.clone();
        for _ in 0..k {
            q = self.evaluate(&q);
        }
        q
    }

    /// Image of an arc (orientation-preserving: endpoints map to endpoints).
    pub fn image_arc(&self, arc: &ArcInterval) -> ArcInterval {
        if arc.is_full() {
            return ArcInterval::full();
        }
        let lo = self.evaluate(&arc.lo_point()).angular_value();
        let hi = self.evaluate(&arc.hi_point()).angular_value();
        ArcInterval::from_endpoints(lo, hi)
    }

    /// Composition `self ∘ other` with eager exact simplification.
    pub fn compose(&self, other: &CircleMap) -> CircleMap {
        simplify(vec![self.clone(), other.clone()])
    }

    /// Conjugation `phi ∘ self ∘ phi⁻¹`.
    pub fn conjugate_by(&self, phi: &CircleMap) -> Result<CircleMap, CircleError> {
        Ok(simplify(vec![phi.clone(), self.clone(), phi.inverse()?]))
    }

    pub fn inverse(&self) -> Result<CircleMap, CircleError> {
        match self {
            CircleMap::Moebius(m) => Ok(CircleMap::Moebius(m.inverse())),
            CircleMap::PlCircle(f) => Ok(CircleMap::PlCircle(f.inverse())),
            CircleMap::PlLine(f) => Ok(CircleMap::PlLine(f.inverse())),
            CircleMap::Rotation(c) => Ok(CircleMap::Rotation((-c).frac())),
            CircleMap::Composite(fs) => {
                let mut inv = Vec::with_capacity(fs.len());
                for f in fs.iter().rev() {
                    inv.push(f.inverse()?);
                }
                Ok(simplify(inv))
            }
            CircleMap::Oracle(o) => Err(CircleError::Inverse(format!(
                "oracle \"{}\" has no inverse callback",
                o.label()
            ))),
        }
    }

    /// Power `self^k` (negative powers through the inverse).
    pub fn pow(&self, k: i64) -> Result<CircleMap, CircleError> {
        if k < 0 {
            return self.inverse()?.pow(-k);
        }
        let mut result = CircleMap::identity();
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.compose(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base);
            }
        }
        Ok(result)
    }

    /// Whether angular evaluation (and hence the canonical lift) is exact on
    /// exact inputs for this representation.
    pub fn has_exact_lift(&self) -> bool {
        match self {
            CircleMap::PlCircle(f) => {
                f.knots().iter().all(Value::is_exact) && f.lift_values().iter().all(Value::is_exact)
            }
            CircleMap::Rotation(c) => c.is_exact(),
            CircleMap::Composite(fs) => fs.iter().all(CircleMap::has_exact_lift),
            CircleMap::Moebius(_) | CircleMap::PlLine(_) | CircleMap::Oracle(_) => false,
        }
    }

    /// Canonical lift `F` (increasing, `F(x+1) = F(x)+1`, `F(0) ∈ [0,1)`),
    /// evaluated at `x`. Exact when [`Self::has_exact_lift`] holds and `x`
    /// is exact.
    pub fn lift_eval(&self, x: &Value) -> Value {
        match self {
            CircleMap::PlCircle(f) => f.lift_at(x),
            CircleMap::Rotation(c) => x + &c.frac(),
            CircleMap::Oracle(o) => Value::approx(o.lift_at(x.to_f64())),
            _ => {
                let y0 = self
                    .evaluate(&CirclePoint::Angular(Value::zero()))
                    .angular_value();
                let shift = x.floor();
                let shift_value = Value::Exact(crate::Rational::from(shift));
                let y = self
                    .evaluate(&CirclePoint::Angular((x - &shift_value).frac()))
                    .angular_value();
                let wind = if y < y0 { Value::one() } else { Value::zero() };
                &(&y + &wind) + &shift_value
            }
        }
    }

    /// Float fast path for the canonical lift.
    pub fn lift_eval_f64(&self, x: f64) -> f64 {
        match self {
            CircleMap::PlCircle(f) => f.lift_at_f64(x),
            CircleMap::Rotation(c) => x + c.frac().to_f64(),
            CircleMap::Oracle(o) => o.lift_at(x - x.floor()) + x.floor(),
            _ => self.lift_eval(&Value::approx(x)).to_f64(),
        }
    }

    /// Per-evaluation absolute error to budget on the float path. Zero for
    /// exact-lift maps evaluated exactly; oracles declare their own.
    pub fn step_error(&self) -> f64 {
        match self {
            CircleMap::Oracle(o) => o.step_error(),
            CircleMap::Composite(fs) => fs.iter().map(CircleMap::step_error).sum(),
            // Structured maps evaluate to correctly-rounded f64 up to a few ulp.
            _ => 1e-14,
        }
    }

    /// Two-sided derivative in the angular chart; errs at genuine corners
    /// (use [`Self::derivative_one_sided`] there) and on oracles without a
    /// derivative callback.
    pub fn derivative(&self, p: &CirclePoint) -> Result<Value, CircleError> {
        match self {
            CircleMap::Moebius(m) => {
                let pp = match p.convert(Chart::Projective) {
                    CirclePoint::Projective(pp) => pp,
                    _ => unreachable!(),
                };
                Ok(m.angular_derivative(&pp))
            }
            CircleMap::PlCircle(f) => f.derivative_at(&p.angular_value()),
            CircleMap::PlLine(f) => {
                let pp = match p.convert(Chart::Projective) {
                    CirclePoint::Projective(pp) => pp,
                    _ => unreachable!(),
                };
                if let ProjPoint::Finite(t) = &pp {
                    if f.corners().iter().any(|(ct, _)| ct == t) {
                        return Err(CircleError::Breakpoint(p.angular_value().to_f64()));
                    }
                }
                Ok(f.angular_derivative(&pp))
            }
            CircleMap::Rotation(_) => Ok(Value::one()),
            CircleMap::Oracle(o) => o
                .derivative_at(p.angular_value().to_f64())
                .map(Value::approx)
                .ok_or_else(|| CircleError::NoDerivative(o.label().to_string())),
            CircleMap::Composite(fs) => {
                let mut product = Value::one();
                let mut q = p.clone();
                for f in fs.iter().rev() {
                    product = &product * &f.derivative(&q)?;
                    q = f.evaluate(&q);
                }
                Ok(product)
            }
        }
    }

    /// One-sided derivative in the angular chart. Orientation preservation
    /// makes the side invariant along the chain rule.
    pub fn derivative_one_sided(&self, p: &CirclePoint, side: Side) -> Result<Value, CircleError> {
        match self {
            CircleMap::PlCircle(f) => Ok(f.one_sided_derivative(&p.angular_value(), side)),
            CircleMap::PlLine(f) => {
                let pp = match p.convert(Chart::Projective) {
                    CirclePoint::Projective(pp) => pp,
                    _ => unreachable!(),
                };
                if let ProjPoint::Finite(t) = &pp {
                    if let Some(i) = f.corners().iter().position(|(ct, _)| ct == t) {
                        return Ok(pl_line_one_sided(f, i, side));
                    }
                }
                Ok(f.angular_derivative(&pp))
            }
            CircleMap::Composite(fs) => {
                let mut product = Value::one();
                let mut q = p.clone();
                for f in fs.iter().rev() {
                    product = &product * &f.derivative_one_sided(&q, side)?;
                    q = f.evaluate(&q);
                }
                Ok(product)
            }
            _ => self.derivative(p),
        }
    }

    /// Verified lower bound for the angular derivative over a closed arc,
    /// with a witness point where a (one-sided) derivative close to the bound
    /// is attained. For single representations the bound is the exact
    /// minimum; for composites it is the product of factor minima over the
    /// successive image arcs, a lower bound that is tight when all but one
    /// factor is affine on the relevant range.
    pub fn min_derivative_on(
        &self,
        arc: &ArcInterval,
    ) -> Result<(Value, CirclePoint), CircleError> {
        match self {
            CircleMap::Moebius(m) => {
                let (v, w) = m.min_angular_derivative_on(arc);
                Ok((v, CirclePoint::Projective(w)))
            }
            CircleMap::PlLine(f) => {
                let (v, w) = f.min_angular_derivative_on(arc);
                Ok((v, CirclePoint::Projective(w)))
            }
            CircleMap::PlCircle(f) => {
                let (v, w) = f.min_slope_on(arc);
                Ok((v, CirclePoint::Angular(w)))
            }
            CircleMap::Rotation(_) => Ok((Value::one(), arc.lo_point())),
            CircleMap::Oracle(o) => Err(CircleError::NoDerivative(o.label().to_string())),
            CircleMap::Composite(fs) => {
                let mut bound = Value::one();
                let mut current = arc.clone();
                // Track the factor whose minimum is sharpest, together with
                // how many innermost factors precede it, so its witness can
                // be pulled back into the original arc.
                let mut best: Option<(Value, CirclePoint, usize)> = None;
                for (rev_idx, f) in fs.iter().rev().enumerate() {
                    let (v, w) = f.min_derivative_on(&current)?;
                    if best.as_ref().map_or(true, |(bv, _, _)| v < *bv) {
                        best = Some((v.clone(), w, rev_idx));
                    }
                    bound = &bound * &v;
                    current = f.image_arc(&current);
                }
                let witness = best
                    .and_then(|(_, w, rev_idx)| pull_back_witness(fs, w, rev_idx))
                    .unwrap_or_else(|| arc.lo_point());
                Ok((bound, witness))
            }
        }
    }

    /// Structural equality after canonicalization: composites are
    /// simplified, rotations are compared as angular data, and affine maps
    /// are compared across the fractional-linear and piecewise-affine
    /// representations. A `false` answer means "not recognizably equal", not
    /// a proof of inequality.
    pub fn canonical_eq(&self, other: &CircleMap) -> bool {
        let a = simplify(vec![self.clone()]);
        let b = simplify(vec![other.clone()]);
        canonical_eq_simplified(&a, &b)
    }
}

/// Map a witness found in the domain of the factor `rev_idx` steps from the
/// innermost end of `fs` back to the domain of the whole composite by undoing
/// the `rev_idx` innermost factors. `None` when any of them is not invertible.
fn pull_back_witness(
    fs: &[CircleMap],
    w: CirclePoint,
    rev_idx: usize,
) -> Option<CirclePoint> {
    let inner: Vec<&CircleMap> = fs.iter().rev().take(rev_idx).collect();
    let mut q = w;
    for g in inner.into_iter().rev() {
        q = g.inverse().ok()?.evaluate(&q);
    }
    Some(q)
}

fn pl_line_one_sided(f: &PlLineMap, corner_index: usize, side: Side) -> Value {
    let corners = f.corners();
    let (t, y) = &corners[corner_index];
    let one = Value::one();
    let slope = match side {
        Side::Right => {
            if corner_index + 1 < corners.len() {
                let (nt, ny) = &corners[corner_index + 1];
                &(ny - y) / &(nt - t)
            } else {
                f.outside_affine().0
            }
        }
        Side::Left => {
            if corner_index > 0 {
                let (pt, py) = &corners[corner_index - 1];
                &(y - py) / &(t - pt)
            } else {
                f.outside_affine().0
            }
        }
    };
    &(&slope * &(&one + &(t * t))) / &(&one + &(y * y))
}

fn canonical_eq_simplified(a: &CircleMap, b: &CircleMap) -> bool {
    if a.is_identity() && b.is_identity() {
        return true;
    }
    match (a, b) {
        (CircleMap::Moebius(x), CircleMap::Moebius(y)) => x == y,
        (CircleMap::PlCircle(x), CircleMap::PlCircle(y)) => x == y,
        (CircleMap::PlLine(x), CircleMap::PlLine(y)) => x == y,
        (CircleMap::Rotation(x), CircleMap::Rotation(y)) => x.frac() == y.frac(),
        (CircleMap::Oracle(x), CircleMap::Oracle(y)) => x == y,
        (CircleMap::Rotation(x), CircleMap::PlCircle(y))
        | (CircleMap::PlCircle(y), CircleMap::Rotation(x)) => {
            *y == PlCircleMap::rotation(x.clone())
        }
        (CircleMap::Moebius(m), CircleMap::PlLine(p))
        | (CircleMap::PlLine(p), CircleMap::Moebius(m)) => match m.affine_parts() {
            Some((s, c)) => {
                let affine =
                    PlLineMap::from_affine(Value::Exact(s), Value::Exact(c)).expect("slope > 0");
                *p == affine
            }
            None => false,
        },
        (CircleMap::Composite(xs), CircleMap::Composite(ys)) => {
            xs.len() == ys.len()
                && xs
                    .iter()
                    .zip(ys)
                    .all(|(x, y)| canonical_eq_simplified(x, y))
        }
        _ => false,
    }
}

/// Flattens, drops identities, and merges adjacent factors exactly.
fn simplify(factors: Vec<CircleMap>) -> CircleMap {
    let mut flat: Vec<CircleMap> = Vec::with_capacity(factors.len());
    fn flatten_into(out: &mut Vec<CircleMap>, f: CircleMap) {
        match f {
            CircleMap::Composite(fs) => {
                for g in fs {
                    flatten_into(out, g);
                }
            }
            other => {
                if !other.is_identity() {
                    out.push(other);
                }
            }
        }
    }
    for f in factors {
        flatten_into(&mut flat, f);
    }
    let mut i = 0;
    while flat.len() > 1 && i + 1 <= flat.len() {
        if i + 1 == flat.len() {
            break;
        }
        match try_merge(&flat[i], &flat[i + 1]) {
            Some(merged) => {
                flat[i] = merged;
                flat.remove(i + 1);
                if flat[i].is_identity() {
                    flat.remove(i);
                }
                i = i.saturating_sub(1);
            }
            None => i += 1,
        }
    }
    match flat.len() {
        0 => CircleMap::identity(),
        1 => flat.pop().expect("nonempty"),
        _ => CircleMap::Composite(flat),
    }
}

/// Exact merge of `a ∘ b` within or across compatible representations.
fn try_merge(a: &CircleMap, b: &CircleMap) -> Option<CircleMap> {
    use CircleMap::*;
    match (a, b) {
        (Moebius(x), Moebius(y)) => Some(Moebius(x.compose(y))),
        (PlCircle(x), PlCircle(y)) => Some(PlCircle(x.compose(y))),
        (PlLine(x), PlLine(y)) => Some(PlLine(x.compose(y))),
        (Rotation(x), Rotation(y)) => Some(Rotation((x + y).frac())),
        (PlCircle(x), Rotation(y)) => Some(PlCircle(x.compose(&PlCircleMap::rotation(y.clone())))),
        (Rotation(x), PlCircle(y)) => Some(PlCircle(PlCircleMap::rotation(x.clone()).compose(y))),
        (PlLine(x), Moebius(y)) => {
            let (s, c) = y.affine_parts()?;
            let affine = PlLineMap::from_affine(Value::Exact(s), Value::Exact(c)).ok()?;
            Some(PlLine(x.compose(&affine)))
        }
        (Moebius(x), PlLine(y)) => {
            let (s, c) = x.affine_parts()?;
            let affine = PlLineMap::from_affine(Value::Exact(s), Value::Exact(c)).ok()?;
            Some(PlLine(affine.compose(y)))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::angular_distance;

    fn phi_pl() -> CircleMap {
        CircleMap::PlCircle(
            PlCircleMap::from_knot_values(
                vec![Value::zero(), Value::ratio(1, 2)],
                vec![Value::zero(), Value::ratio(3, 4)],
            )
            .unwrap(),
        )
    }

    #[test]
    fn scaling_conjugates_translation_to_its_power() {
        // The defining relation of the affine standard pair: a b a⁻¹ = bⁿ.
        let h = CircleMap::scaling(2);
        let f = CircleMap::unit_translation();
        let lhs = h.compose(&f).compose(&h.inverse().unwrap());
        let rhs = f.pow(2).unwrap();
        assert!(lhs.canonical_eq(&rhs));
    }

    #[test]
    fn conjugated_maps_keep_sandwich_shape() {
        let phi = phi_pl();
        let m = CircleMap::scaling(2);
        let conj = m.conjugate_by(&phi).unwrap();
        match &conj {
            CircleMap::Composite(fs) => assert_eq!(fs.len(), 3),
            other => panic!("expected a 3-factor composite, got {other:?}"),
        }
        let square = conj.compose(&conj);
        match &square {
            CircleMap::Composite(fs) => {
                assert_eq!(fs.len(), 3, "inner conjugators must cancel exactly");
                assert!(fs[1].canonical_eq(&CircleMap::scaling(4)));
            }
            other => panic!("expected a 3-factor composite, got {other:?}"),
        }
        assert!(square.canonical_eq(&m.pow(2).unwrap().conjugate_by(&phi).unwrap()));
    }

    #[test]
    fn composite_of_inverse_is_identity() {
        let phi = phi_pl();
        let conj = CircleMap::scaling(3).conjugate_by(&phi).unwrap();
        let prod = conj.compose(&conj.inverse().unwrap());
        assert!(prod.is_identity(), "got {prod:?}");
    }

    #[test]
    fn rotation_powers_add() {
        let r = CircleMap::rotation(Value::ratio(3, 8));
        let r5 = r.pow(5).unwrap();
        assert!(r5.canonical_eq(&CircleMap::rotation(Value::ratio(15, 8))));
        let back = r.pow(-3).unwrap();
        assert!(back.canonical_eq(&CircleMap::rotation(Value::ratio(-9, 8))));
    }

    #[test]
    fn affine_cross_representation_equality() {
        let moebius = CircleMap::unit_translation();
        let pl = CircleMap::PlLine(PlLineMap::from_affine(Value::one(), Value::one()).unwrap());
        assert!(moebius.canonical_eq(&pl));
        assert!(pl.canonical_eq(&moebius));
        assert!(!moebius.canonical_eq(&CircleMap::scaling(2)));
    }

    #[test]
    fn lift_is_degree_one_for_moebius() {
        let m = CircleMap::moebius(3, 1, 1, 2).unwrap();
        for i in 0..12 {
            let x = Value::approx(i as f64 / 12.0);
            let a = m.lift_eval(&(&x + &Value::one())).to_f64();
            let b = m.lift_eval(&x).to_f64() + 1.0;
            assert!((a - b).abs() < 1e-12);
        }
        // Canonical normalization: F(0) ∈ [0,1).
        let at0 = m.lift_eval(&Value::zero()).to_f64();
        assert!((0.0..1.0).contains(&at0));
    }

    #[test]
    fn lift_of_exact_composite_is_exact() {
        let f = phi_pl();
        let r = CircleMap::rotation(Value::ratio(1, 3));
        let comp = CircleMap::Composite(vec![f, r]);
        assert!(comp.has_exact_lift());
        let y = comp.lift_eval(&Value::ratio(5, 7));
        assert!(y.is_exact());
    }

    #[test]
    fn chain_rule_matches_difference_quotient() {
        let phi = phi_pl();
        let conj = CircleMap::scaling(2).conjugate_by(&phi).unwrap();
        let p = CirclePoint::angular(Value::ratio(1, 5));
        let d = conj.derivative(&p).unwrap().to_f64();
        let h = 1e-7;
        let x0 = 0.2f64;
        let y1 = conj.lift_eval_f64(x0 + h);
        let y0 = conj.lift_eval_f64(x0);
        let quotient = (y1 - y0) / h;
        assert!(
            (d - quotient).abs() < 1e-5,
            "chain rule {d} vs quotient {quotient}"
        );
    }

    #[test]
    fn exactness_flows_through_the_distinguished_point() {
        // Conjugate the affine standard pair by an angular PL map; the common
        // fixed point ∞ (angular 0) lands on φ(0) and stays exact.
        let phi = phi_pl();
        let f = CircleMap::unit_translation().conjugate_by(&phi).unwrap();
        let fixed = phi.evaluate(&CirclePoint::angular(Value::zero()));
        let image = f.evaluate(&fixed);
        assert!(image.is_exact());
        assert!(image.same_point(&fixed));
        assert!(angular_distance(&image, &fixed).is_zero());
    }

    #[test]
    fn one_sided_derivatives_at_pl_corner() {
        let phi = phi_pl();
        let p = CirclePoint::angular(Value::ratio(1, 2));
        assert!(phi.derivative(&p).is_err());
        assert_eq!(
            phi.derivative_one_sided(&p, Side::Left).unwrap(),
            Value::ratio(3, 2)
        );
        assert_eq!(
            phi.derivative_one_sided(&p, Side::Right).unwrap(),
            Value::ratio(1, 2)
        );
    }

    #[test]
    fn min_derivative_bound_is_below_sampled_derivatives() {
        // Conjugating t ↦ 2t by t ↦ t + 5 merges into one fractional-linear
        // map whose angular derivative dips well below 1/2 near the witness.
        let shift = CircleMap::Moebius(MoebiusMap::new(1, 5, 0, 1).unwrap());
        let conj = CircleMap::scaling(2).conjugate_by(&shift).unwrap();
        assert!(matches!(conj, CircleMap::Moebius(_)));
        let (min, witness) = conj.min_derivative_on(&ArcInterval::full()).unwrap();
        assert_eq!(conj.derivative(&witness).unwrap(), min);
        for i in 0..64 {
            let p = CirclePoint::angular(Value::ratio(i, 64));
            assert!(conj.derivative(&p).unwrap() >= min);
        }
    }

    #[test]
    fn min_derivative_of_composite_is_tight_for_rotation_conjugators() {
        // Rotations are angular isometries, so conjugating the two-piece PL
        // map by one preserves the exact minimum slope 1/2 and the bound is
        // attained at the pulled-back witness. Build the composite directly:
        // `compose` would merge the rotations into the PL factor.
        let pl = phi_pl();
        let rot = CircleMap::rotation(Value::ratio(1, 4));
        let composite = CircleMap::Composite(vec![
            rot.clone(),
            pl,
            rot.inverse().unwrap(),
        ]);
        let (min, witness) = composite
            .min_derivative_on(&ArcInterval::full())
            .unwrap();
        assert_eq!(min, Value::ratio(1, 2));
        assert_eq!(
            witness.angular_value(),
            Value::ratio(3, 4),
            "witness pulls back through the inner rotation"
        );
        assert_eq!(
            composite.derivative_one_sided(&witness, Side::Right).unwrap(),
            min
        );
    }

    #[test]
    fn oracle_composites_evaluate() {
        let o = CircleMap::Oracle(OracleMap::new("third", |x| x + 1.0 / 3.0));
        let r = CircleMap::rotation(Value::ratio(1, 3));
        let comp = o.compose(&r);
        let y = comp.evaluate(&CirclePoint::angular(Value::zero()));
        assert!((y.angular_value().to_f64() - 2.0 / 3.0).abs() < 1e-12);
        assert!(comp.inverse().is_err());
    }
}
