//! The length-growth obstruction to C¹ wandering dynamics.
//!
//! Given a pair `(f, h)` with `h∘f∘h⁻¹ = fⁿ`, an `h`-wandering interval
//! `J` with `f`-fixed endpoints, and an `ε` with `(1−ε)² > 3/4` bounding
//! the derivative distortion of `f` and `h` on the backward images
//! `h^{−s}(J)`, the `2^{m+1}` compositions
//!
//! ```text
//! Ψ(α₀,…,α_m) = (h^m f^{α_m} h^{−m}) ∘ ⋯ ∘ (h f^{α₁} h^{−1}) ∘ f^{α₀}
//! ```
//!
//! map a fundamental interval `I ⊂ J` onto arcs whose total length grows
//! like `2^{m+1}(3/4)^{m+1}|I| = (3/2)^{m+1}|I|` — eventually exceeding
//! `|J|`, which is impossible while the arcs stay disjoint inside `J`.
//! This module makes each step of that argument executable: the
//! ε-admissibility test, the wandering and derivative preconditions, the
//! word family with explicit factors, a per-factor derivative ledger with
//! witness points, and the aggregated growth certificate.
//!
//! Intervals come in two charts: angular arcs for genuinely circular data,
//! and projective-line intervals when the whole family lives in ℝ (the
//! affine pair), where every endpoint stays an exact rational.

pub mod synthetic;

use serde::Serialize;
use thiserror::Error;

use crate::bs::BitWord;
use crate::circle::{ArcInterval, CircleError, CircleMap, CirclePoint};
use crate::value::Value;
use crate::Rational;

/// Hard cap on family size: `2^{m+1}` members must not exceed this.
pub const DEFAULT_FAMILY_CAP: u64 = 1 << 21;

/// Sampling resolution used when a derivative bound must fall back to
/// pointwise sampling (oracle maps).
pub const DERIVATIVE_GRID: usize = 64;

#[derive(Debug, Error)]
pub enum ObstructionError {
    #[error("family of 2^{{m+1}} = {size} intervals exceeds the cap {cap}")]
    DepthLimit { size: u64, cap: u64 },
    #[error("inconsistent pattern decomposition: {0} (implementation bug)")]
    DecompositionError(String),
    #[error("synthetic construction infeasible: {0}")]
    ConstructionFailed(String),
    #[error("operation needs {needed} intervals/maps but got {got}")]
    ChartMismatch { needed: &'static str, got: &'static str },
    #[error("interval image crossed ∞ or collapsed: {0}")]
    BadImage(String),
    #[error(transparent)]
    Circle(#[from] CircleError),
}

/// An interval in one of the two charts.
#[derive(Debug, Clone, Serialize)]
pub enum ObsInterval {
    /// `(lo, hi)` in the projective coordinate, `lo < hi`, away from ∞.
    Line { lo: Value, hi: Value },
    /// An angular arc.
    Circle(ArcInterval),
}

impl ObsInterval {
    pub fn line(lo: impl Into<Value>, hi: impl Into<Value>) -> Self {
        let (lo, hi) = (lo.into(), hi.into());
        assert!(lo < hi, "line interval endpoints must be ordered");
        ObsInterval::Line { lo, hi }
    }

    pub fn circle(arc: ArcInterval) -> Self {
        ObsInterval::Circle(arc)
    }

    pub fn chart_name(&self) -> &'static str {
        match self {
            ObsInterval::Line { .. } => "line",
            ObsInterval::Circle(_) => "circle",
        }
    }

    pub fn length(&self) -> Value {
        match self {
            ObsInterval::Line { lo, hi } => hi - lo,
            ObsInterval::Circle(arc) => arc.length().clone(),
        }
    }

    pub fn lo_point(&self) -> CirclePoint {
        match self {
            ObsInterval::Line { lo, .. } => CirclePoint::projective(lo.clone()),
            ObsInterval::Circle(arc) => arc.lo_point(),
        }
    }

    pub fn hi_point(&self) -> CirclePoint {
        match self {
            ObsInterval::Line { hi, .. } => CirclePoint::projective(hi.clone()),
            ObsInterval::Circle(arc) => arc.hi_point(),
        }
    }

    pub fn midpoint_point(&self) -> CirclePoint {
        match self {
            ObsInterval::Line { lo, hi } => {
                CirclePoint::projective(&(lo + hi) * &Value::ratio(1, 2))
            }
            ObsInterval::Circle(arc) => CirclePoint::angular(arc.midpoint()),
        }
    }

    /// The image interval under an orientation-preserving map.
    pub fn image(&self, map: &CircleMap) -> Result<ObsInterval, ObstructionError> {
        match self {
            ObsInterval::Line { lo, hi } => {
                let lo2 = line_eval(map, lo)?;
                let hi2 = line_eval(map, hi)?;
                if lo2 >= hi2 {
                    return Err(ObstructionError::BadImage(format!(
                        "image of ({lo}, {hi}) reversed or crossed ∞"
                    )));
                }
                Ok(ObsInterval::Line { lo: lo2, hi: hi2 })
            }
            ObsInterval::Circle(arc) => Ok(ObsInterval::Circle(map.image_arc(arc))),
        }
    }

    /// Containment `other ⊂ self` (closed comparison on endpoints).
    pub fn contains(&self, other: &ObsInterval) -> bool {
        match (self, other) {
            (ObsInterval::Line { lo, hi }, ObsInterval::Line { lo: l2, hi: h2 }) => {
                lo <= l2 && h2 <= hi
            }
            (ObsInterval::Circle(a), ObsInterval::Circle(b)) => a.contains_arc(b),
            _ => false,
        }
    }

    /// Whether the two intervals are disjoint as open sets (sharing an
    /// endpoint counts as disjoint).
    pub fn disjoint_open(&self, other: &ObsInterval) -> bool {
        match (self, other) {
            (ObsInterval::Line { lo, hi }, ObsInterval::Line { lo: l2, hi: h2 }) => {
                hi <= l2 || h2 <= lo
            }
            (ObsInterval::Circle(a), ObsInterval::Circle(b)) => {
                if a.is_full() || b.is_full() {
                    return a.length().is_zero() || b.length().is_zero();
                }
                let (alo, ahi) = (a.lo().clone(), a.lo() + a.length());
                let (blo, bhi) = (b.lo().clone(), b.lo() + b.length());
                for k in [-1i64, 0, 1] {
                    let shift = Value::from_int(k);
                    if &alo < &(&bhi + &shift) && &(&blo + &shift) < &ahi {
                        return false;
                    }
                }
                true
            }
            _ => false,
        }
    }

    /// Sort key: the lower endpoint in the interval's own chart.
    fn sort_key(&self) -> Value {
        match self {
            ObsInterval::Line { lo, .. } => lo.clone(),
            ObsInterval::Circle(arc) => arc.lo().clone(),
        }
    }
}

/// Evaluate a map on a finite projective coordinate, requiring a finite
/// image.
fn line_eval(map: &CircleMap, t: &Value) -> Result<Value, ObstructionError> {
    let image = map.evaluate(&CirclePoint::projective(t.clone()));
    image
        .projective_value()
        .ok_or_else(|| ObstructionError::BadImage(format!("{t} maps to ∞")))
}

/// Experiment parameters for the growth certificate.
#[derive(Debug, Clone, Serialize)]
pub struct ObstructionConfig {
    /// Derivative-distortion budget; must satisfy `(1−ε)² > 3/4`.
    pub epsilon: Value,
    /// The candidate wandering interval `J = (c, d)`.
    pub j: ObsInterval,
    /// The fundamental interval `I ⊂ J` whose images are measured.
    pub i: ObsInterval,
    /// Largest `m` the certificate explores.
    pub m_max: u32,
    /// Depth for the wandering/derivative preconditions.
    pub s_max: u32,
}

/// `(1−ε)² > 3/4`, evaluated exactly on rationals and with a guard band on
/// floats.
pub fn epsilon_admissible(epsilon: &Value) -> bool {
    if epsilon.to_f64() < 0.0 {
        return false;
    }
    match epsilon.as_exact() {
        Some(e) => {
            let one = Rational::from_integer(1.into());
            let q = &one - e;
            &q * &q > Rational::new(3.into(), 4.into())
        }
        None => {
            let q = 1.0 - epsilon.to_f64();
            q * q > 0.75 + 4.0 * f64::EPSILON
        }
    }
}

/// True iff `J, h⁻¹(J), …, h^{−s_max}(J)` are pairwise disjoint (open).
pub fn wandering_depth_check(
    h: &CircleMap,
    j: &ObsInterval,
    s_max: u32,
) -> Result<bool, ObstructionError> {
    assert!(s_max >= 1);
    let back = h.inverse()?;
    let mut images = vec![j.clone()];
    for _ in 0..s_max {
        let prev = images.last().expect("nonempty");
        images.push(prev.image(&back)?);
    }
    for (i, a) in images.iter().enumerate() {
        for b in images.iter().skip(i + 1) {
            if !a.disjoint_open(b) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Minimum derivative of `map` on an interval, in the interval's chart.
/// Exact for structured maps; sampled on `grid` points for oracles.
fn min_derivative_on_interval(
    map: &CircleMap,
    interval: &ObsInterval,
    grid: usize,
) -> Result<(Value, CirclePoint), ObstructionError> {
    match interval {
        ObsInterval::Circle(arc) => match map.min_derivative_on(arc) {
            Ok(pair) => Ok(pair),
            Err(_) => {
                // Sampled fallback (oracle maps): no certification, just
                // the minimum over the grid.
                let mut best: Option<(Value, CirclePoint)> = None;
                for v in arc.sample(grid.max(2)) {
                    let p = CirclePoint::angular(v);
                    let d = map.derivative(&p)?;
                    if best.as_ref().map_or(true, |(b, _)| &d < b) {
                        best = Some((d, p));
                    }
                }
                Ok(best.expect("grid is nonempty"))
            }
        },
        ObsInterval::Line { lo, hi } => line_min_derivative(map, lo, hi),
    }
}

/// Minimum of the projective-coordinate derivative over `[lo, hi]`, with a
/// witness point.  Supports Möbius (monotone derivative between poles),
/// piecewise-linear line maps (finitely many slopes), and compositions
/// (chain rule over successive images).
fn line_min_derivative(
    map: &CircleMap,
    lo: &Value,
    hi: &Value,
) -> Result<(Value, CirclePoint), ObstructionError> {
    match map {
        CircleMap::Moebius(mo) => {
            let (a, b, c, d) = mo.coefficients();
            let det = Value::Exact(Rational::from_integer(mo.det()));
            let denom = |t: &Value| {
                let ct = &Value::Exact(Rational::from_integer(c.clone())) * t;
                &ct + &Value::Exact(Rational::from_integer(d.clone()))
            };
            let _ = (a, b);
            let dlo = denom(lo);
            let dhi = denom(hi);
            if dlo.is_zero() || dhi.is_zero() || (dlo < Value::zero()) != (dhi < Value::zero()) {
                return Err(ObstructionError::BadImage(format!(
                    "pole inside ({lo}, {hi})"
                )));
            }
            // d/dt (at+b)/(ct+d) = det/(ct+d)²: monotone on a pole-free
            // interval, so the minimum sits at an endpoint.
            let at = |t: &Value| {
                let q = denom(t);
                &det / &(&q * &q)
            };
            let (vlo, vhi) = (at(lo), at(hi));
            if vlo <= vhi {
                Ok((vlo, CirclePoint::projective(lo.clone())))
            } else {
                Ok((vhi, CirclePoint::projective(hi.clone())))
            }
        }
        CircleMap::PlLine(pl) => {
            let mut best: Option<(Value, CirclePoint)> = None;
            let mut consider = |slope: Value, point: Value| {
                if best.as_ref().map_or(true, |(b, _)| &slope < b) {
                    best = Some((slope, CirclePoint::projective(point)));
                }
            };
            consider(pl.projective_slope_at(lo), lo.clone());
            for (x, _) in pl.corners() {
                if x > lo && x < hi {
                    consider(pl.projective_slope_at(x), x.clone());
                }
            }
            // The slope on the final piece is already sampled at its left
            // end (either `lo` or the last interior corner).
            Ok(best.expect("at least the left endpoint was considered"))
        }
        CircleMap::Rotation(_) | CircleMap::PlCircle(_) | CircleMap::Oracle(_) => {
            Err(ObstructionError::ChartMismatch {
                needed: "projective-line map (Möbius, PlLine, Composite)",
                got: "angular-chart map",
            })
        }
        CircleMap::Composite(fs) => {
            let mut bound = Value::one();
            let mut cur = ObsInterval::Line {
                lo: lo.clone(),
                hi: hi.clone(),
            };
            let mut best: Option<(Value, CirclePoint)> = None;
            for g in fs.iter().rev() {
                let (lo_c, hi_c) = match &cur {
                    ObsInterval::Line { lo, hi } => (lo.clone(), hi.clone()),
                    _ => unreachable!("line images stay line intervals"),
                };
                let (v, w) = line_min_derivative(g, &lo_c, &hi_c)?;
                if best.as_ref().map_or(true, |(b, _)| &v < b) {
                    best = Some((v.clone(), w));
                }
                bound = &bound * &v;
                cur = cur.image(g)?;
            }
            let witness = best.map(|(_, w)| w).unwrap_or_else(|| {
                CirclePoint::projective(lo.clone())
            });
            Ok((bound, witness))
        }
    }
}

/// Maximum derivative on an interval, via the inverse map on the image:
/// `max g′ on A = 1 / min (g⁻¹)′ on g(A)`.
fn max_derivative_on_interval(
    map: &CircleMap,
    interval: &ObsInterval,
    grid: usize,
) -> Result<Value, ObstructionError> {
    let inverse = map.inverse()?;
    let image = interval.image(map)?;
    let (min_inv, _) = min_derivative_on_interval(&inverse, &image, grid)?;
    if min_inv.is_zero() {
        return Err(ObstructionError::BadImage(
            "inverse derivative vanished".into(),
        ));
    }
    Ok(&Value::one() / &min_inv)
}

/// True iff on every `h^{−s}(J)`, `s = 0..s_max`: `min f′ ≥ 1−ε` and
/// `min h′ / max h′ ≥ 1−ε`.
pub fn derivative_bounds_check(
    f: &CircleMap,
    h: &CircleMap,
    j: &ObsInterval,
    s_max: u32,
    epsilon: &Value,
    grid: usize,
) -> Result<bool, ObstructionError> {
    let one_minus_eps = &Value::one() - epsilon;
    let back = h.inverse()?;
    let mut current = j.clone();
    for _ in 0..=s_max {
        let (min_f, _) = min_derivative_on_interval(f, &current, grid)?;
        if min_f < one_minus_eps {
            return Ok(false);
        }
        let (min_h, _) = min_derivative_on_interval(h, &current, grid)?;
        let max_h = max_derivative_on_interval(h, &current, grid)?;
        if &min_h / &max_h < one_minus_eps {
            return Ok(false);
        }
        current = current.image(&back)?;
    }
    Ok(true)
}

/// The `2^{m+1}` image intervals `Ψ(α)(I)`, built by composing the explicit
/// factors `hⁱ ∘ f^{αᵢ} ∘ h^{−i}` (never the `f^β` shortcut), in pattern
/// index order.
pub fn psi_interval_family(
    f: &CircleMap,
    h: &CircleMap,
    i: &ObsInterval,
    m: u32,
) -> Result<Vec<(BitWord, ObsInterval)>, ObstructionError> {
    let size = 1u64 << (m + 1);
    if size > DEFAULT_FAMILY_CAP {
        return Err(ObstructionError::DepthLimit {
            size,
            cap: DEFAULT_FAMILY_CAP,
        });
    }
    // factor[i] = hⁱ ∘ f ∘ h^{−i}; the α_i = 0 factor is the identity.
    let mut factors = Vec::with_capacity(m as usize + 1);
    for idx in 0..=m {
        let hi = h.pow(i64::from(idx))?;
        let hmi = h.pow(-i64::from(idx))?;
        factors.push(hi.compose(f).compose(&hmi));
    }
    let mut family = Vec::with_capacity(size as usize);
    for alpha in BitWord::all_of_degree(m as usize) {
        let mut image = i.clone();
        for pos in alpha.set_positions() {
            image = image.image(&factors[pos as usize])?;
        }
        family.push((alpha, image));
    }
    Ok(family)
}

/// True iff the family members are pairwise disjoint (open intervals;
/// endpoint contact allowed) and, when `j` is supplied, all contained in it.
pub fn disjointness_check(family: &[ObsInterval], j: Option<&ObsInterval>) -> bool {
    if let Some(j) = j {
        if !family.iter().all(|member| j.contains(member)) {
            return false;
        }
    }
    let mut order: Vec<usize> = (0..family.len()).collect();
    order.sort_by(|&a, &b| {
        family[a]
            .sort_key()
            .partial_cmp(&family[b].sort_key())
            .expect("interval endpoints are totally ordered")
    });
    for w in order.windows(2) {
        if !family[w[0]].disjoint_open(&family[w[1]]) {
            return false;
        }
    }
    if family.len() >= 2 {
        let (first, last) = (order[0], order[order.len() - 1]);
        if !family[first].disjoint_open(&family[last]) {
            return false;
        }
    }
    true
}

/// One derivative witness: the factor it belongs to, the point where the
/// factor's minimum derivative over the traversed interval is attained, and
/// that minimum.
#[derive(Debug, Clone, Serialize)]
pub struct LedgerWitness {
    pub factor: String,
    pub point: CirclePoint,
    pub min_derivative: Value,
}

/// One ledger row: the pattern, its `h^k ∘ f ∘ h^{−l₁} ∘ ⋯ ∘ f ∘ h^{−l_r}`
/// decomposition, the measured image, and the derivative-product bound with
/// its per-factor witnesses.
#[derive(Debug, Clone, Serialize)]
pub struct LedgerEntry {
    pub pattern: BitWord,
    pub r: u32,
    pub k: u32,
    pub gaps: Vec<u32>,
    pub image: ObsInterval,
    pub measured_length: Value,
    /// `|I| · ∏ (per-factor min derivative)` — the sharp product bound.
    pub product_bound: Value,
    /// `|I| (1−ε)^{r+k}` — the distortion bound actually attained here.
    pub epsilon_bound: Value,
    pub witnesses: Vec<LedgerWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LengthLedger {
    pub m: u32,
    pub base_length: Value,
    pub epsilon: Value,
    /// `|I| (1−ε)^{2m+2}` — the depth-uniform distortion bound, a floor for
    /// every entry's `epsilon_bound`.
    pub epsilon_worst_bound: Value,
    /// `|I| (3/4)^{m+1}` — what ε-admissibility guarantees the previous
    /// column exceeds.
    pub three_quarters_bound: Value,
    pub entries: Vec<LedgerEntry>,
    pub total_measured: Value,
}

impl LengthLedger {
    /// Indices of entries whose measured length fails the product bound —
    /// must be empty whenever the derivative preconditions held.
    pub fn soundness_violations(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.measured_length < e.product_bound)
            .map(|(i, _)| i)
            .collect()
    }
}

fn value_pow(v: &Value, e: u32) -> Value {
    if e == 0 {
        return Value::one();
    }
    match v.as_exact() {
        // A reduced fraction stays reduced under powers, so skip the
        // gcd-reducing constructor: the exponents here reach thousands of
        // bits and reduction would dominate the whole ledger.
        Some(r) => Value::Exact(Rational::new_raw(r.numer().pow(e), r.denom().pow(e))),
        None => Value::approx(v.to_f64().powi(e as i32)),
    }
}

/// Shared state for the depth-first ledger walk.
struct LedgerWalk<'a> {
    f: &'a CircleMap,
    hpow: &'a [CircleMap],
    hneg: &'a [CircleMap],
    m: u32,
    bits: Vec<bool>,
    witnesses: Vec<LedgerWitness>,
    /// `(pattern index, entry)`, collected in walk order and sorted later.
    out: Vec<(u64, LedgerEntry)>,
    base_length: Value,
    /// `|I| (1−ε)^e` for `e = 0..=2m+2`.
    eps_bounds: Vec<Value>,
}

/// One ledger step: record the factor's minimum derivative over the
/// current interval (with witness) and advance to the image.
fn ledger_step(
    g: &CircleMap,
    label: String,
    current: &ObsInterval,
    product: &Value,
    witnesses: &mut Vec<LedgerWitness>,
) -> Result<(ObsInterval, Value), ObstructionError> {
    let (min_d, point) = min_derivative_on_interval(g, current, DERIVATIVE_GRID)?;
    let product = product * &min_d;
    witnesses.push(LedgerWitness {
        factor: label,
        point,
        min_derivative: min_d,
    });
    Ok((current.image(g)?, product))
}

impl LedgerWalk<'_> {
    /// Walk positions `pos..=m`.  The interval/product state lives in the
    /// frame right after the `f`-step at `last_set` (before the closing
    /// `h^{last_set}`), so sibling patterns share every common prefix of
    /// their factor walks — the factor sequence per pattern is
    /// `h^{−l_r}, f, h^{−l_{r−1}}, f, …, h^{−l₁}, f, h^k` exactly as in the
    /// naive per-pattern expansion.
    fn walk(
        &mut self,
        pos: u32,
        last_set: Option<u32>,
        state: &ObsInterval,
        product: &Value,
    ) -> Result<(), ObstructionError> {
        if pos > self.m {
            return self.finalize(last_set, state, product);
        }
        self.bits.push(false);
        self.walk(pos + 1, last_set, state, product)?;
        self.bits.pop();

        let gap = (pos - last_set.unwrap_or(0)) as usize;
        let before = self.witnesses.len();
        let (state1, product1) = if gap > 0 {
            ledger_step(
                &self.hneg[gap],
                format!("h^-{gap}"),
                state,
                product,
                &mut self.witnesses,
            )?
        } else {
            (state.clone(), product.clone())
        };
        let (state2, product2) = ledger_step(
            self.f,
            "f".to_string(),
            &state1,
            &product1,
            &mut self.witnesses,
        )?;
        self.bits.push(true);
        self.walk(pos + 1, Some(pos), &state2, &product2)?;
        self.bits.pop();
        self.witnesses.truncate(before);
        Ok(())
    }

    fn finalize(
        &mut self,
        last_set: Option<u32>,
        state: &ObsInterval,
        product: &Value,
    ) -> Result<(), ObstructionError> {
        let pattern = BitWord::new(self.bits.clone());
        let index = self
            .bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .fold(0u64, |acc, (j, _)| acc | (1 << j));
        let entry = match last_set {
            None => LedgerEntry {
                pattern,
                r: 0,
                k: 0,
                gaps: Vec::new(),
                image: state.clone(),
                measured_length: self.base_length.clone(),
                product_bound: self.base_length.clone(),
                epsilon_bound: self.eps_bounds[0].clone(),
                witnesses: Vec::new(),
            },
            Some(top) => {
                let shape = pattern.shape().ok_or_else(|| {
                    ObstructionError::DecompositionError(
                        "set position recorded for an all-zero pattern".into(),
                    )
                })?;
                let (r, k) = (shape.ones, shape.top);
                if k != top || shape.gaps.iter().sum::<u32>() != k {
                    return Err(ObstructionError::DecompositionError(format!(
                        "pattern {:?}: shape {:?} against top {top}",
                        pattern.bits(),
                        shape.gaps
                    )));
                }
                let before = self.witnesses.len();
                let (image, full_product) = if k > 0 {
                    ledger_step(
                        &self.hpow[k as usize],
                        format!("h^{k}"),
                        state,
                        product,
                        &mut self.witnesses,
                    )?
                } else {
                    (state.clone(), product.clone())
                };
                let witnesses = self.witnesses.clone();
                self.witnesses.truncate(before);
                LedgerEntry {
                    pattern,
                    r,
                    k,
                    gaps: shape.gaps,
                    measured_length: image.length(),
                    product_bound: &self.base_length * &full_product,
                    epsilon_bound: self.eps_bounds[(r + k) as usize].clone(),
                    witnesses,
                    image,
                }
            }
        };
        self.out.push((index, entry));
        Ok(())
    }
}

/// Build the per-pattern length ledger at degree `m`.
pub fn length_ledger(
    f: &CircleMap,
    h: &CircleMap,
    i: &ObsInterval,
    m: u32,
    epsilon: &Value,
) -> Result<LengthLedger, ObstructionError> {
    let size = 1u64 << (m + 1);
    if size > DEFAULT_FAMILY_CAP {
        return Err(ObstructionError::DepthLimit {
            size,
            cap: DEFAULT_FAMILY_CAP,
        });
    }
    let base_length = i.length();
    let one_minus_eps = &Value::one() - epsilon;
    let eps_bounds: Vec<Value> = (0..=(2 * m + 2))
        .map(|e| &base_length * &value_pow(&one_minus_eps, e))
        .collect();
    let floor34 = &base_length * &value_pow(&Value::ratio(3, 4), m + 1);

    // Cache h powers: the closing exponent and the gaps are all ≤ m.
    let mut hpow = Vec::with_capacity(m as usize + 1);
    let mut hneg = Vec::with_capacity(m as usize + 1);
    for idx in 0..=m {
        hpow.push(h.pow(i64::from(idx))?);
        hneg.push(h.pow(-i64::from(idx))?);
    }

    let mut walk = LedgerWalk {
        f,
        hpow: &hpow,
        hneg: &hneg,
        m,
        bits: Vec::with_capacity(m as usize + 1),
        witnesses: Vec::with_capacity(2 * m as usize + 2),
        out: Vec::with_capacity(size as usize),
        base_length: base_length.clone(),
        eps_bounds,
    };
    walk.walk(0, None, i, &Value::one())?;
    let worst = walk.eps_bounds[walk.eps_bounds.len() - 1].clone();
    let mut indexed = walk.out;
    indexed.sort_by_key(|(idx, _)| *idx);
    let mut total = Value::zero();
    let entries: Vec<LedgerEntry> = indexed
        .into_iter()
        .map(|(_, e)| {
            total = &total + &e.measured_length;
            e
        })
        .collect();
    Ok(LengthLedger {
        m,
        base_length,
        epsilon: epsilon.clone(),
        epsilon_worst_bound: worst,
        three_quarters_bound: floor34,
        entries,
        total_measured: total,
    })
}

/// The aggregated verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// At this degree the measured total exceeded `|J|` while the
    /// configuration-level preconditions held: the pair cannot extend to a
    /// genuine C¹ action with these constants.
    ContradictionAt(u32),
    /// No degree up to `m_max` produced the contradiction.
    BoundsNotViolated,
    PreconditionFailed(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct PreconditionReport {
    pub epsilon_admissible: bool,
    pub j_endpoints_fixed: bool,
    pub f_nontrivial_on_j: bool,
    pub wandering: bool,
    pub derivative_bounds: bool,
}

impl PreconditionReport {
    pub fn all_green(&self) -> bool {
        self.epsilon_admissible
            && self.j_endpoints_fixed
            && self.f_nontrivial_on_j
            && self.wandering
            && self.derivative_bounds
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateRow {
    pub m: u32,
    pub count: u64,
    pub total_measured: Value,
    /// `2^{m+1} (3/4)^{m+1} |I| = (3/2)^{m+1} |I|`, exactly.
    pub theoretical_bound: Value,
    pub disjoint: bool,
    pub contained_in_j: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub j_length: Value,
    pub preconditions: PreconditionReport,
    pub rows: Vec<CertificateRow>,
}

/// Endpoint-fixedness tolerance for inexact representations.
const ENDPOINT_TOL: f64 = 1e-12;

/// Run the whole argument: verify the configuration-level preconditions,
/// then walk `m = 1..m_max` building family and ledger, and report the
/// first degree whose measured total exceeds `|J|`.
///
/// Disjointness and containment are recorded per degree as data: on
/// finite-depth synthetic pairs the relation breaks beyond the construction
/// depth and duplicate images appear exactly when the totals blow up —
/// that breakdown is the content of the certificate, not an error.
pub fn growth_certificate(
    f: &CircleMap,
    h: &CircleMap,
    cfg: &ObstructionConfig,
) -> Result<Certificate, ObstructionError> {
    if cfg.j.chart_name() != cfg.i.chart_name() {
        return Err(ObstructionError::ChartMismatch {
            needed: "J and I in the same chart",
            got: "mixed charts",
        });
    }
    let eps_ok = epsilon_admissible(&cfg.epsilon);
    let lo_fixed = point_is_fixed(f, &cfg.j.lo_point());
    let hi_fixed = point_is_fixed(f, &cfg.j.hi_point());
    let endpoints_fixed = lo_fixed && hi_fixed;
    let f_nontrivial = !point_is_fixed(f, &cfg.i.lo_point());
    let wandering = if endpoints_fixed {
        wandering_depth_check(h, &cfg.j, cfg.s_max)?
    } else {
        false
    };
    let derivative_bounds = if wandering {
        derivative_bounds_check(f, h, &cfg.j, cfg.s_max, &cfg.epsilon, DERIVATIVE_GRID)?
    } else {
        false
    };
    let preconditions = PreconditionReport {
        epsilon_admissible: eps_ok,
        j_endpoints_fixed: endpoints_fixed,
        f_nontrivial_on_j: f_nontrivial,
        wandering,
        derivative_bounds,
    };
    let j_length = cfg.j.length();
    if !preconditions.all_green() {
        let reason = precondition_failure_reason(&preconditions);
        return Ok(Certificate {
            verdict: Verdict::PreconditionFailed(reason),
            j_length,
            preconditions,
            rows: Vec::new(),
        });
    }

    let mut rows = Vec::new();
    let mut verdict = Verdict::BoundsNotViolated;
    for m in 1..=cfg.m_max {
        // The ledger images ARE the word family (same explicit factor
        // walks), so disjointness and containment are read off the ledger
        // rather than recomputed.
        let ledger = length_ledger(f, h, &cfg.i, m, &cfg.epsilon)?;
        let images: Vec<ObsInterval> =
            ledger.entries.iter().map(|e| e.image.clone()).collect();
        let contained = images.iter().all(|img| cfg.j.contains(img));
        let disjoint = disjointness_check(&images, Some(&cfg.j));
        let theoretical = &cfg.i.length()
            * &value_pow(&Value::ratio(3, 2), m + 1);
        let exceeded = ledger.total_measured > j_length;
        rows.push(CertificateRow {
            m,
            count: 1 << (m + 1),
            total_measured: ledger.total_measured.clone(),
            theoretical_bound: theoretical,
            disjoint,
            contained_in_j: contained,
        });
        if exceeded {
            verdict = Verdict::ContradictionAt(m);
            break;
        }
    }
    Ok(Certificate {
        verdict,
        j_length,
        preconditions,
        rows,
    })
}

fn point_is_fixed(f: &CircleMap, p: &CirclePoint) -> bool {
    let image = f.evaluate(p);
    if image.same_point(p) {
        return true;
    }
    crate::circle::angular_distance(&image, p).to_f64() <= ENDPOINT_TOL
}

fn precondition_failure_reason(report: &PreconditionReport) -> String {
    if !report.epsilon_admissible {
        return "epsilon fails (1-eps)^2 > 3/4".to_string();
    }
    if !report.j_endpoints_fixed {
        return "endpoints of J are not fixed by f".to_string();
    }
    if !report.f_nontrivial_on_j {
        return "f restricted to J is trivial at the base interval".to_string();
    }
    if !report.wandering {
        return "backward images of J under h are not pairwise disjoint".to_string();
    }
    "derivative bounds fail on some h^-s(J)".to_string()
}
