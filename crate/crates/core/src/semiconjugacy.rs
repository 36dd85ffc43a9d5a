//! Constructive semiconjugacy onto the affine model.
//!
//! Given a pair of circle maps `(f, h)` satisfying the Baumslag–Solitar
//! relation `h∘f∘h⁻¹ = fⁿ`, this module builds a monotone degree-one sample
//! table φ with `φ∘f = f₀∘φ` and `φ∘h = h₀∘φ` on an enumerated orbit, where
//! `(f₀, h₀)` is the affine model `x ↦ x + 1`, `x ↦ n·x` on ℝ ∪ {∞}. The
//! orbit of a base point is enumerated group-theoretically (one sample per
//! group element, deduplicated through the normal form), the known common
//! fixed point is pinned to ∞, and the defining order constraints are
//! checked during assembly: any violation is reported with a witness pair
//! instead of silently producing a non-monotone table. A defect functional
//! measures how far the interpolated table is from an exact semiconjugacy.
//!
//! When generator-level matching fails, the theorem-level fallback retries
//! with the finite-index pair `(f^{n−1}, h^m)`, which generates a copy of
//! BS(1, nᵐ) translating by `n − 1`; both attempts are reported side by
//! side without guessing a canonical renormalization of the subgroup model.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::bs::{BsElement, BsError, NAdic};
use crate::circle::{angular_distance, CircleError, CircleMap, CirclePoint};
use crate::orbit::minimal_power_m;
use crate::value::Value;
use crate::{Integer, Rational};

/// The affine model pair: `f0: x ↦ x + 1` and `h0: x ↦ n·x` as exact
/// Möbius maps in the projective chart.
#[derive(Clone, Debug, Serialize)]
pub struct AffineModel {
    pub n: u32,
    pub f0: CircleMap,
    pub h0: CircleMap,
}

/// Builds the affine model for base `n ≥ 2`. The relation
/// `h0∘f0∘h0⁻¹ = f0ⁿ` holds exactly by construction.
pub fn standard_model(n: u32) -> AffineModel {
    assert!(n >= 2, "affine model needs base n >= 2, got {n}");
    AffineModel {
        n,
        f0: BsElement::gen_b(n).to_circle_map(),
        h0: BsElement::gen_a(n).to_circle_map(),
    }
}

/// One sample of a candidate semiconjugacy: a point of the studied action's
/// orbit and the model point it must map to.
#[derive(Clone, Debug, Serialize)]
pub struct TableSample {
    pub source: CirclePoint,
    pub target: CirclePoint,
}

#[derive(Debug, Error)]
pub enum SemiconjugacyError {
    /// The action's orbit order is incompatible with the affine model's:
    /// either two group elements land on orbit points whose circle order
    /// contradicts the model order, or one orbit point would need two
    /// different targets. Carries the witness sample pair.
    #[error("orbit order violation: {reason}")]
    OrderViolation {
        reason: String,
        first: TableSample,
        second: TableSample,
    },
    #[error("semiconjugacy construction failed: {0}")]
    Construction(String),
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error(transparent)]
    Algebra(#[from] BsError),
}

/// A sampled nondecreasing degree-one circle map: the candidate
/// semiconjugacy φ. `samples[0]` is always the anchor pair
/// `(u ↦ ∞)`; the remaining sources are strictly increasing in circle
/// order starting at the anchor, with nondecreasing targets.
#[derive(Clone, Debug, Serialize)]
pub struct MonotoneMapTable {
    anchor: CirclePoint,
    samples: Vec<TableSample>,
    degree: u32,
    /// True when every sample maps a point to itself; evaluation is then
    /// the exact identity and the defect vanishes identically.
    identity_like: bool,
}

/// Circle order of `p` vs `q` as seen from `anchor`: compares the
/// counterclockwise offsets from the anchor. When the anchor is ∞ and both
/// points carry projective coordinates this is the exact real order of
/// those coordinates; otherwise angular offsets are compared (exact for
/// exact angular data, float-backed across chart conversions).
fn circle_cmp_from(anchor: &CirclePoint, p: &CirclePoint, q: &CirclePoint) -> Ordering {
    if anchor.projective_value().is_none() {
        if let (Some(pv), Some(qv)) = (p.projective_value(), q.projective_value()) {
            return pv.partial_cmp(&qv).unwrap_or(Ordering::Equal);
        }
        // One of the points is the anchor itself (∞): it precedes everything.
        return match (p.projective_value(), q.projective_value()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            _ => unreachable!(),
        };
    }
    let a = anchor.angular_value();
    let po = (&p.angular_value() - &a).frac();
    let qo = (&q.angular_value() - &a).frac();
    po.partial_cmp(&qo).unwrap_or(Ordering::Equal)
}

impl MonotoneMapTable {
    /// Wraps raw samples without validating the order invariants;
    /// [`monotone_check`] decides whether the result is a genuine monotone
    /// table. The first sample must be the anchor pair.
    pub fn from_raw_samples(anchor: CirclePoint, samples: Vec<TableSample>) -> Self {
        let identity_like = !samples.is_empty()
            && samples.iter().all(|s| s.source.same_point(&s.target));
        MonotoneMapTable {
            anchor,
            samples,
            degree: 1,
            identity_like,
        }
    }

    pub fn samples(&self) -> &[TableSample] {
        &self.samples
    }

    pub fn anchor(&self) -> &CirclePoint {
        &self.anchor
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Whether every sample is a fixed pair (source = target), making the
    /// table the exact identity map.
    pub fn is_identity_like(&self) -> bool {
        self.identity_like
    }

    /// Evaluates the interpolated table at any circle point.
    ///
    /// Exact behavior: sample sources return their stored targets exactly;
    /// identity-like tables return the input unchanged. Between samples the
    /// map interpolates monotonically — linearly in the projective chart
    /// when the whole segment lives among finite projective coordinates
    /// (which reproduces piecewise-affine conjugators exactly on segments
    /// free of their corners), and linearly in angular offsets otherwise
    /// (in particular on the two segments adjacent to the anchor, whose
    /// model side reaches ∞).
    pub fn evaluate(&self, x: &CirclePoint) -> CirclePoint {
        if self.identity_like {
            return x.clone();
        }
        if x.same_point(&self.anchor) {
            return CirclePoint::infinity();
        }
        if self.samples.len() <= 1 {
            // Only the anchor is sampled: interpolate the full wrap segment,
            // i.e. rotate offsets-from-anchor onto offsets-from-∞.
            let off = (&x.angular_value() - &self.anchor.angular_value()).frac();
            return CirclePoint::angular(off);
        }
        let idx = self
            .samples
            .partition_point(|s| {
                circle_cmp_from(&self.anchor, &s.source, x) != Ordering::Greater
            })
            .saturating_sub(1);
        let lo = &self.samples[idx];
        if lo.source.same_point(x) {
            return lo.target.clone();
        }
        let wrap = idx + 1 == self.samples.len();
        let (hi_source, hi_target) = if wrap {
            (self.anchor.clone(), CirclePoint::infinity())
        } else {
            let s = &self.samples[idx + 1];
            (s.source.clone(), s.target.clone())
        };

        // Projective-linear interior segment, exact on exact data.
        if let (Some(sl), Some(sh), Some(px), Some(tl), Some(th)) = (
            lo.source.projective_value(),
            hi_source.projective_value(),
            x.projective_value(),
            lo.target.projective_value(),
            hi_target.projective_value(),
        ) {
            if sl < px && px < sh {
                let ratio = &(&px - &sl) / &(&sh - &sl);
                let t = &tl + &(&(&th - &tl) * &ratio);
                return CirclePoint::projective(t);
            }
        }

        // Angular fallback: source offsets from the anchor against target
        // angular coordinates (which are offsets from ∞, the anchor's
        // target). Handles the two anchor-adjacent segments uniformly.
        let anchor_theta = self.anchor.angular_value();
        let ox = (&x.angular_value() - &anchor_theta).frac();
        let ol = if idx == 0 {
            Value::zero()
        } else {
            (&lo.source.angular_value() - &anchor_theta).frac()
        };
        let (oh, th_ang) = if wrap {
            (Value::one(), Value::one())
        } else {
            (
                (&hi_source.angular_value() - &anchor_theta).frac(),
                hi_target.angular_value(),
            )
        };
        let tl_ang = if idx == 0 {
            Value::zero()
        } else {
            lo.target.angular_value()
        };
        let progress = &(&ox - &ol) / &(&oh - &ol);
        let tau = &tl_ang + &(&(&th_ang - &tl_ang) * &progress);
        CirclePoint::angular(tau.frac())
    }
}

/// Enumerates the ball of radius `depth` in the group generated by the
/// model letters, tracking each element's realized orbit point. Elements
/// are deduplicated by normal form; reaching the same element along two
/// routes with different realized points proves the action does not satisfy
/// the presented relations and is reported as an order violation.
fn enumerate_orbit_samples(
    b_map: &CircleMap,
    a_map: &CircleMap,
    b_elem: &BsElement,
    a_elem: &BsElement,
    base: &CirclePoint,
    depth: u32,
) -> Result<Vec<(BsElement, CirclePoint)>, SemiconjugacyError> {
    let a_inv = a_map.inverse()?;
    let b_inv = b_map.inverse()?;
    let gens: Vec<(BsElement, &CircleMap)> = vec![
        (a_elem.clone(), a_map),
        (a_elem.inverse(), &a_inv),
        (b_elem.clone(), b_map),
        (b_elem.inverse(), &b_inv),
    ];
    let identity = BsElement::identity(b_elem.base());
    let mut seen: HashMap<BsElement, CirclePoint> = HashMap::new();
    seen.insert(identity.clone(), base.clone());
    let mut frontier: Vec<(BsElement, CirclePoint)> = vec![(identity, base.clone())];
    for _ in 0..depth {
        let mut next: Vec<(BsElement, CirclePoint)> = Vec::new();
        for (w, src) in &frontier {
            for (g_elem, g_map) in &gens {
                let w2 = g_elem.compose(w);
                let src2 = g_map.evaluate(src);
                match seen.get(&w2) {
                    Some(prev) if prev.same_point(&src2) => {}
                    Some(prev) => {
                        let t = Value::Exact(w2.translation_rational());
                        return Err(SemiconjugacyError::OrderViolation {
                            reason: format!(
                                "group element {w2} is realized at two different \
                                 orbit points, so the action violates the \
                                 presented relations"
                            ),
                            first: TableSample {
                                source: prev.clone(),
                                target: CirclePoint::projective(t.clone()),
                            },
                            second: TableSample {
                                source: src2,
                                target: CirclePoint::projective(t),
                            },
                        });
                    }
                    None => {
                        seen.insert(w2.clone(), src2.clone());
                        next.push((w2, src2));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(seen.into_iter().collect())
}

/// Sorts the enumerated rows in circle order from the anchor, collapses
/// duplicate sources (their targets must agree), verifies the model order,
/// and wraps everything into a table headed by the anchor pair.
fn assemble_table(
    rows: Vec<(Rational, CirclePoint)>,
    anchor: &CirclePoint,
) -> Result<MonotoneMapTable, SemiconjugacyError> {
    let mut rows = rows;
    for (t, src) in &rows {
        if src.same_point(anchor) {
            return Err(SemiconjugacyError::OrderViolation {
                reason: "an orbit point with a finite target coincides with the \
                         anchor, which must map to ∞"
                    .into(),
                first: TableSample {
                    source: anchor.clone(),
                    target: CirclePoint::infinity(),
                },
                second: TableSample {
                    source: src.clone(),
                    target: CirclePoint::projective(Value::Exact(t.clone())),
                },
            });
        }
    }
    rows.sort_by(|p, q| circle_cmp_from(anchor, &p.1, &q.1));

    let mut unique: Vec<(Rational, CirclePoint)> = Vec::with_capacity(rows.len());
    for (t, src) in rows {
        match unique.last() {
            Some((pt, ps)) if ps.same_point(&src) => {
                if *pt != t {
                    return Err(SemiconjugacyError::OrderViolation {
                        reason: "one orbit point would need two different model \
                                 targets"
                            .into(),
                        first: TableSample {
                            source: ps.clone(),
                            target: CirclePoint::projective(Value::Exact(pt.clone())),
                        },
                        second: TableSample {
                            source: src.clone(),
                            target: CirclePoint::projective(Value::Exact(t.clone())),
                        },
                    });
                }
            }
            _ => unique.push((t, src)),
        }
    }

    for pair in unique.windows(2) {
        if pair[1].0 < pair[0].0 {
            return Err(SemiconjugacyError::OrderViolation {
                reason: "circle order of the orbit contradicts the real order \
                         of the model targets"
                    .into(),
                first: TableSample {
                    source: pair[0].1.clone(),
                    target: CirclePoint::projective(Value::Exact(pair[0].0.clone())),
                },
                second: TableSample {
                    source: pair[1].1.clone(),
                    target: CirclePoint::projective(Value::Exact(pair[1].0.clone())),
                },
            });
        }
    }

    let mut samples = Vec::with_capacity(unique.len() + 1);
    samples.push(TableSample {
        source: anchor.clone(),
        target: CirclePoint::infinity(),
    });
    samples.extend(unique.into_iter().map(|(t, src)| TableSample {
        source: src,
        target: CirclePoint::projective(Value::Exact(t)),
    }));
    Ok(MonotoneMapTable::from_raw_samples(anchor.clone(), samples))
}

/// Builds the candidate semiconjugacy for the action `(f, h)` of the group
/// with parameter `n`, sampling the orbit of `base` over all group elements
/// of word length ≤ `depth`. `anchor` is the known common fixed point of
/// the action (typically from the orbit module); it is pinned to ∞.
///
/// Each element `w` contributes the pair `w(f,h)(base) ↦ w(f₀,h₀)(0)`; the
/// model side of `w` is its translation part, exactly. Errors with
/// [`SemiconjugacyError::OrderViolation`] when no monotone table can match
/// the two orders.
pub fn build_semiconjugacy(
    f: &CircleMap,
    h: &CircleMap,
    n: u32,
    base: &CirclePoint,
    anchor: &CirclePoint,
    depth: u32,
) -> Result<MonotoneMapTable, SemiconjugacyError> {
    if n < 2 {
        return Err(SemiconjugacyError::Construction(format!(
            "group parameter must be at least 2, got {n}"
        )));
    }
    if base.same_point(anchor) {
        return Err(SemiconjugacyError::Construction(
            "base point must differ from the anchor fixed point".into(),
        ));
    }
    let samples = enumerate_orbit_samples(
        f,
        h,
        &BsElement::gen_b(n),
        &BsElement::gen_a(n),
        base,
        depth,
    )?;
    let rows = samples
        .into_iter()
        .map(|(w, src)| (w.translation_rational(), src))
        .collect();
    assemble_table(rows, anchor)
}

/// The finite-index variant: runs the same construction for the subgroup
/// generated by `(f^{n−1}, h^m)`, a copy of BS(1, nᵐ) whose translation
/// generator moves by `n − 1`. Model targets are the exact translation
/// parts of the subgroup elements — deliberately not rescaled, so the
/// caller sees the subgroup's own normalization.
pub fn build_subgroup_semiconjugacy(
    f: &CircleMap,
    h: &CircleMap,
    n: u32,
    m: u32,
    base: &CirclePoint,
    anchor: &CirclePoint,
    depth: u32,
) -> Result<MonotoneMapTable, SemiconjugacyError> {
    if n < 2 || m < 1 {
        return Err(SemiconjugacyError::Construction(format!(
            "subgroup attempt needs n >= 2 and m >= 1, got n = {n}, m = {m}"
        )));
    }
    if base.same_point(anchor) {
        return Err(SemiconjugacyError::Construction(
            "base point must differ from the anchor fixed point".into(),
        ));
    }
    let modulus = n.checked_pow(m).ok_or_else(|| {
        SemiconjugacyError::Construction(format!(
            "subgroup modulus n^m = {n}^{m} overflows the supported range"
        ))
    })?;
    let f_sub = f.pow(i64::from(n) - 1)?;
    let h_sub = h.pow(i64::from(m))?;
    let b_elem = BsElement::new(modulus, 0, NAdic::from_integer(Integer::from(n - 1)))?;
    let a_elem = BsElement::new(modulus, 1, NAdic::zero())?;
    let samples = enumerate_orbit_samples(&f_sub, &h_sub, &b_elem, &a_elem, base, depth)?;
    let rows = samples
        .into_iter()
        .map(|(w, src)| (w.translation_rational(), src))
        .collect();
    assemble_table(rows, anchor)
}

/// One construction attempt: which generators were used and what came out.
#[derive(Debug)]
pub struct SemiconjugacyAttempt {
    pub description: String,
    pub modulus: u32,
    pub result: Result<MonotoneMapTable, SemiconjugacyError>,
}

/// Both attempts, generator-level first, finite-index fallback second (only
/// run when the first fails).
#[derive(Debug)]
pub struct SemiconjugacyReport {
    pub primary: SemiconjugacyAttempt,
    pub fallback: Option<SemiconjugacyAttempt>,
}

impl SemiconjugacyReport {
    /// The first successful table, if any attempt produced one.
    pub fn best(&self) -> Option<&MonotoneMapTable> {
        if let Ok(t) = &self.primary.result {
            return Some(t);
        }
        self.fallback.as_ref().and_then(|a| a.result.as_ref().ok())
    }
}

/// Runs [`build_semiconjugacy`] and, when the generator-level attempt
/// fails, retries with the finite-index pair `(f^{n−1}, h^m)`, taking `m`
/// as the smallest power of `h` with a fixed point (at most `mmax`, default
/// 1 when none is detected). Both attempts are reported.
pub fn build_semiconjugacy_with_fallback(
    f: &CircleMap,
    h: &CircleMap,
    n: u32,
    base: &CirclePoint,
    anchor: &CirclePoint,
    depth: u32,
    mmax: u32,
) -> SemiconjugacyReport {
    let primary = SemiconjugacyAttempt {
        description: "generators (f, h)".into(),
        modulus: n,
        result: build_semiconjugacy(f, h, n, base, anchor, depth),
    };
    if primary.result.is_ok() {
        return SemiconjugacyReport {
            primary,
            fallback: None,
        };
    }
    let m = minimal_power_m(h, mmax).unwrap_or(1);
    let result = build_subgroup_semiconjugacy(f, h, n, m, base, anchor, depth);
    let fallback = SemiconjugacyAttempt {
        description: format!("subgroup generators (f^{}, h^{m})", n - 1),
        modulus: n.checked_pow(m).unwrap_or(u32::MAX),
        result,
    };
    SemiconjugacyReport {
        primary,
        fallback: Some(fallback),
    }
}

/// Sup over a uniform angular grid of the angular distance between
/// `φ(f(x))` and `f₀(φ(x))` — the defect of the candidate semiconjugacy
/// with respect to one generator equation. Exactly zero on identity-like
/// tables evaluated against equal maps.
pub fn semiconjugacy_defect(
    phi: &MonotoneMapTable,
    f: &CircleMap,
    f0: &CircleMap,
    grid: u32,
) -> Value {
    assert!(grid > 0, "defect grid must be nonempty");
    let mut worst = Value::zero();
    for i in 0..grid {
        let x = CirclePoint::angular(Value::ratio(i as i64, grid as i64));
        let lhs = phi.evaluate(&f.evaluate(&x));
        let rhs = f0.evaluate(&phi.evaluate(&x));
        let d = angular_distance(&lhs, &rhs);
        if d > worst {
            worst = d;
        }
    }
    worst
}

/// Verifies the monotone degree-one invariant of a table: anchor pair
/// first, sources strictly increasing in circle order from the anchor,
/// targets nondecreasing as offsets from ∞.
pub fn monotone_check(phi: &MonotoneMapTable) -> bool {
    if phi.degree() != 1 || phi.is_empty() {
        return false;
    }
    let samples = phi.samples();
    if !samples[0].source.same_point(phi.anchor())
        || samples[0].target.projective_value().is_some()
    {
        return false;
    }
    for pair in samples.windows(2) {
        if circle_cmp_from(phi.anchor(), &pair[0].source, &pair[1].source) != Ordering::Less {
            return false;
        }
    }
    // Target offsets from ∞ are plain angular values (∞ sits at angular 0).
    let mut prev = Value::zero();
    for s in &samples[1..] {
        let tau = s.target.angular_value();
        if tau < prev {
            return false;
        }
        prev = tau;
    }
    true
}
