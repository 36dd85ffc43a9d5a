//! Declarative scenario configs: a TOML tree naming the group parameter,
//! the pair of maps (by generator keyword or explicit literal), and the
//! experiment list. Exact rationals are written as `"p/q"` strings so that
//! exactness survives serialization; unknown keys are errors, not warnings.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use bslab_core::circle::{PlCircleMap, PlLineMap};
use bslab_core::fixtures::{random_angular_conjugator, random_projective_conjugator};
use bslab_core::obstruction::synthetic::synthetic_denjoy_pair;
use bslab_core::obstruction::{ObsInterval, ObstructionConfig};
use bslab_core::orbit::{DEFAULT_GRID, DEFAULT_TOL};
use bslab_core::rotation::default_basepoints;
use bslab_core::serialize::parse_rational;
use bslab_core::{CircleMap, CirclePoint, Value};

/// Raw scenario file, straight from TOML.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub n: u32,
    #[serde(default)]
    pub seed: u64,
    pub maps: MapsConfig,
    #[serde(default)]
    pub experiments: Vec<ExperimentConfig>,
}

/// The `[maps]` table. `kind` selects the generator; the remaining fields
/// are kind-specific and any field that the selected kind does not use is
/// rejected, like an unknown key.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapsConfig {
    pub kind: String,
    /// `pl_conjugated` / `synthetic_denjoy`: generator seed; defaults to
    /// the scenario seed.
    pub seed: Option<u64>,
    /// `pl_conjugated`: `"projective"` (default) or `"angular"` — the chart
    /// the random conjugator is piecewise-linear in.
    pub chart: Option<String>,
    /// `pl_conjugated`, projective chart: depth of the corner-value pool.
    pub value_depth: Option<u32>,
    /// `synthetic_denjoy`: how many refinement levels the wandering window
    /// survives.
    pub depth: Option<u32>,
    /// `explicit`: the two map literals.
    pub f: Option<MapLiteral>,
    pub h: Option<MapLiteral>,
}

/// One explicit map literal; exactly one representation key must be set.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapLiteral {
    /// Fractional-linear `(a t + b)/(c t + d)` as four integers.
    pub moebius: Option<[i64; 4]>,
    /// Rigid rotation by an exact angle `"p/q"`.
    pub rotation: Option<String>,
    /// Piecewise-linear in the angular chart: breakpoint pairs
    /// `[["theta", "value"], ...]` of exact fractions.
    pub pl_circle: Option<PlBreakpoints>,
    /// Piecewise-affine in the projective chart, identity outside the
    /// corner span: pairs `[["x", "y"], ...]` of exact fractions.
    pub pl_line: Option<PlBreakpoints>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlBreakpoints {
    pub breakpoints: Vec<[String; 2]>,
}

/// A point literal: exactly one of the three fields.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub angular: Option<String>,
    pub projective: Option<String>,
    pub infinity: Option<bool>,
}

/// An interval in the projective (line) chart, `lo < hi` exact fractions.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalSpec {
    pub lo: String,
    pub hi: String,
}

/// One `[[experiments]]` entry. `kind` selects the experiment; fields not
/// used by that kind are rejected by validation.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: String,
    // rotation
    pub map: Option<String>,
    pub iterations: Option<u32>,
    pub basepoints: Option<Vec<String>>,
    pub integer_form: Option<bool>,
    // orbit
    pub power: Option<u32>,
    pub tol: Option<f64>,
    pub iters: Option<u32>,
    // orbit (minimal-power search cap) and semiconjugacy (fallback cap)
    pub mmax: Option<u32>,
    // orbit (fixed-point scan) and semiconjugacy (defect grid)
    pub grid: Option<u64>,
    // obstruction
    pub epsilon: Option<String>,
    pub j: Option<IntervalSpec>,
    pub i: Option<IntervalSpec>,
    pub m_max: Option<u32>,
    pub s_max: Option<u32>,
    // semiconjugacy
    pub depth: Option<u32>,
    pub base: Option<PointSpec>,
    pub anchor: Option<PointSpec>,
}

/// A scenario after validation and map materialization: everything the
/// runner needs, with every precondition already checked.
#[derive(Debug)]
pub struct ValidatedScenario {
    pub name: String,
    pub n: u32,
    /// Effective seed (command-line override already applied).
    pub seed: u64,
    pub maps_kind: String,
    pub maps_note: String,
    pub f: CircleMap,
    pub h: CircleMap,
    /// For conjugated pairs: the exact change of coordinates, kept so that
    /// default base/anchor points can be resolved exactly.
    pub conjugator: Option<CircleMap>,
    /// For synthetic pairs: the generator's measured obstruction constants.
    pub synthetic_cfg: Option<ObstructionConfig>,
    pub experiments: Vec<ExperimentPlan>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapChoice {
    F,
    H,
}

impl MapChoice {
    pub fn label(self) -> &'static str {
        match self {
            MapChoice::F => "f",
            MapChoice::H => "h",
        }
    }
}

/// A fully-resolved experiment, parameters defaulted and range-checked.
#[derive(Debug)]
pub enum ExperimentPlan {
    Rotation {
        map: MapChoice,
        iterations: u32,
        basepoints: Vec<Value>,
        integer_form: bool,
    },
    Orbit {
        power: u32,
        grid: usize,
        tol: f64,
        iters: u32,
        mmax: u32,
    },
    Obstruction {
        cfg: ObstructionConfig,
    },
    Semiconjugacy {
        depth: u32,
        grid: u32,
        base: CirclePoint,
        anchor: CirclePoint,
        /// Cap for the finite-index fallback search; `None` defers to the
        /// minimal power found by an earlier orbit experiment.
        mmax: Option<u32>,
    },
}

impl ExperimentPlan {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentPlan::Rotation { .. } => "rotation",
            ExperimentPlan::Orbit { .. } => "orbit",
            ExperimentPlan::Obstruction { .. } => "obstruction",
            ExperimentPlan::Semiconjugacy { .. } => "semiconjugacy",
        }
    }
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    toml::from_str(text).map_err(|e| anyhow!("config parse error: {e}"))
}

fn parse_value(s: &str, what: &str) -> Result<Value> {
    parse_rational(s)
        .map(Value::Exact)
        .map_err(|e| anyhow!("{what}: {e}"))
}

fn parse_point(spec: &PointSpec, what: &str) -> Result<CirclePoint> {
    let set = usize::from(spec.angular.is_some())
        + usize::from(spec.projective.is_some())
        + usize::from(spec.infinity.is_some());
    if set != 1 {
        bail!("{what}: set exactly one of `angular`, `projective`, `infinity`");
    }
    if let Some(s) = &spec.angular {
        return Ok(CirclePoint::angular(parse_value(s, what)?));
    }
    if let Some(s) = &spec.projective {
        return Ok(CirclePoint::projective(parse_value(s, what)?));
    }
    match spec.infinity {
        Some(true) => Ok(CirclePoint::infinity()),
        _ => bail!("{what}: `infinity` must be `true` when used"),
    }
}

fn parse_interval(spec: &IntervalSpec, what: &str) -> Result<ObsInterval> {
    let lo = parse_value(&spec.lo, &format!("{what}.lo"))?;
    let hi = parse_value(&spec.hi, &format!("{what}.hi"))?;
    if lo >= hi {
        bail!("{what}: need lo < hi, got [{lo}, {hi}]");
    }
    Ok(ObsInterval::line(lo, hi))
}

fn build_literal(lit: &MapLiteral, what: &str) -> Result<CircleMap> {
    let set = usize::from(lit.moebius.is_some())
        + usize::from(lit.rotation.is_some())
        + usize::from(lit.pl_circle.is_some())
        + usize::from(lit.pl_line.is_some());
    if set != 1 {
        bail!("{what}: set exactly one of `moebius`, `rotation`, `pl_circle`, `pl_line`");
    }
    if let Some([a, b, c, d]) = lit.moebius {
        return CircleMap::moebius(a, b, c, d).map_err(|e| anyhow!("{what}.moebius: {e}"));
    }
    if let Some(angle) = &lit.rotation {
        return Ok(CircleMap::rotation(parse_value(
            angle,
            &format!("{what}.rotation"),
        )?));
    }
    if let Some(pl) = &lit.pl_circle {
        let mut knots = Vec::with_capacity(pl.breakpoints.len());
        let mut vals = Vec::with_capacity(pl.breakpoints.len());
        for (k, [x, y]) in pl.breakpoints.iter().enumerate() {
            knots.push(parse_value(x, &format!("{what}.pl_circle[{k}][0]"))?);
            vals.push(parse_value(y, &format!("{what}.pl_circle[{k}][1]"))?);
        }
        let map = PlCircleMap::from_knot_values(knots, vals)
            .map_err(|e| anyhow!("{what}.pl_circle: {e}"))?;
        return Ok(CircleMap::PlCircle(map));
    }
    let pl = lit.pl_line.as_ref().expect("the remaining variant");
    let mut pairs = Vec::with_capacity(pl.breakpoints.len());
    for (k, [x, y]) in pl.breakpoints.iter().enumerate() {
        pairs.push((
            parse_value(x, &format!("{what}.pl_line[{k}][0]"))?,
            parse_value(y, &format!("{what}.pl_line[{k}][1]"))?,
        ));
    }
    let map = PlLineMap::new(pairs).map_err(|e| anyhow!("{what}.pl_line: {e}"))?;
    Ok(CircleMap::PlLine(map))
}

/// Complain about any kind-specific field set on an experiment of a
/// different kind: a set-but-unused key is as much an error as an unknown
/// one.
fn reject_stray_fields(e: &ExperimentConfig, index: usize, allowed: &[&str]) -> Result<()> {
    let mut present: Vec<&str> = Vec::new();
    macro_rules! mark {
        ($field:ident) => {
            if e.$field.is_some() {
                present.push(stringify!($field));
            }
        };
    }
    mark!(map);
    mark!(iterations);
    mark!(basepoints);
    mark!(integer_form);
    mark!(power);
    mark!(tol);
    mark!(iters);
    mark!(mmax);
    mark!(grid);
    mark!(epsilon);
    mark!(j);
    mark!(i);
    mark!(m_max);
    mark!(s_max);
    mark!(depth);
    mark!(base);
    mark!(anchor);
    for field in present {
        if !allowed.contains(&field) {
            bail!(
                "experiments[{index}]: field `{field}` is not used by kind \"{}\"",
                e.kind
            );
        }
    }
    Ok(())
}

/// Check every invariant, materialize the maps, and resolve experiment
/// parameters. `seed_override` is the command-line `--seed`, which wins
/// over the scenario's own seed.
pub fn validate(cfg: &ScenarioConfig, seed_override: Option<u64>) -> Result<ValidatedScenario> {
    if cfg.name.trim().is_empty() {
        bail!("`name` must be nonempty");
    }
    if cfg.n < 2 {
        bail!("`n` must be at least 2, got {}", cfg.n);
    }
    let seed = seed_override.unwrap_or(cfg.seed);

    let (maps_note, f, h, conjugator, synthetic_cfg) = materialize_maps(cfg, seed)?;

    let mut experiments = Vec::with_capacity(cfg.experiments.len());
    for (index, e) in cfg.experiments.iter().enumerate() {
        let plan = match e.kind.as_str() {
            "rotation" => plan_rotation(e, index)?,
            "orbit" => plan_orbit(e, index)?,
            "obstruction" => plan_obstruction(e, index, synthetic_cfg.as_ref())?,
            "semiconjugacy" => {
                plan_semiconjugacy(e, index, &cfg.maps.kind, conjugator.as_ref())?
            }
            other => bail!(
                "experiments[{index}]: unknown kind {other:?} \
                 (expected rotation, orbit, obstruction, or semiconjugacy)"
            ),
        };
        experiments.push(plan);
    }

    Ok(ValidatedScenario {
        name: cfg.name.clone(),
        n: cfg.n,
        seed,
        maps_kind: cfg.maps.kind.clone(),
        maps_note,
        f,
        h,
        conjugator,
        synthetic_cfg,
        experiments,
    })
}

type Materialized = (
    String,
    CircleMap,
    CircleMap,
    Option<CircleMap>,
    Option<ObstructionConfig>,
);

fn materialize_maps(cfg: &ScenarioConfig, scenario_seed: u64) -> Result<Materialized> {
    let m = &cfg.maps;
    let reject = |field: &str, value_set: bool| -> Result<()> {
        if value_set {
            bail!("maps: field `{field}` is not used when kind = {:?}", m.kind);
        }
        Ok(())
    };
    match m.kind.as_str() {
        "standard" => {
            reject("seed", m.seed.is_some())?;
            reject("chart", m.chart.is_some())?;
            reject("value_depth", m.value_depth.is_some())?;
            reject("depth", m.depth.is_some())?;
            reject("f", m.f.is_some())?;
            reject("h", m.h.is_some())?;
            let (f, h) = bslab_core::fixtures::affine_pair(cfg.n);
            Ok((
                format!("standard affine pair: translation by 1 and scaling by {}", cfg.n),
                f,
                h,
                None,
                None,
            ))
        }
        "pl_conjugated" => {
            reject("depth", m.depth.is_some())?;
            reject("f", m.f.is_some())?;
            reject("h", m.h.is_some())?;
            let seed = m.seed.unwrap_or(scenario_seed);
            let chart = m.chart.as_deref().unwrap_or("projective");
            let phi = match chart {
                "projective" => {
                    let value_depth = m.value_depth.unwrap_or(4);
                    if value_depth < 4 {
                        bail!("maps.value_depth must be at least 4, got {value_depth}");
                    }
                    random_projective_conjugator(seed, cfg.n, value_depth)
                }
                "angular" => {
                    reject("value_depth", m.value_depth.is_some())?;
                    random_angular_conjugator(seed)
                }
                other => bail!(
                    "maps.chart must be \"projective\" or \"angular\", got {other:?}"
                ),
            };
            let (f, h) = bslab_core::fixtures::conjugated_pair(cfg.n, &phi)
                .map_err(|e| anyhow!("maps: conjugation failed: {e}"))?;
            Ok((
                format!(
                    "standard pair conjugated by a random piecewise-linear map \
                     ({chart} chart, seed {seed})"
                ),
                f,
                h,
                Some(phi),
                None,
            ))
        }
        "synthetic_denjoy" => {
            reject("chart", m.chart.is_some())?;
            reject("value_depth", m.value_depth.is_some())?;
            reject("f", m.f.is_some())?;
            reject("h", m.h.is_some())?;
            let depth = m
                .depth
                .ok_or_else(|| anyhow!("maps.depth is required when kind = \"synthetic_denjoy\""))?;
            let seed = m.seed.unwrap_or(scenario_seed);
            let (f, h, ocfg) = synthetic_denjoy_pair(cfg.n, depth, seed)
                .map_err(|e| anyhow!("maps: synthetic pair construction failed: {e}"))?;
            Ok((
                format!("synthetic wandering-window pair (depth {depth}, seed {seed})"),
                f,
                h,
                None,
                Some(ocfg),
            ))
        }
        "explicit" => {
            reject("seed", m.seed.is_some())?;
            reject("chart", m.chart.is_some())?;
            reject("value_depth", m.value_depth.is_some())?;
            reject("depth", m.depth.is_some())?;
            let f_lit = m
                .f
                .as_ref()
                .ok_or_else(|| anyhow!("maps.f is required when kind = \"explicit\""))?;
            let h_lit = m
                .h
                .as_ref()
                .ok_or_else(|| anyhow!("maps.h is required when kind = \"explicit\""))?;
            let f = build_literal(f_lit, "maps.f")?;
            let h = build_literal(h_lit, "maps.h")?;
            Ok(("explicit map literals".to_string(), f, h, None, None))
        }
        other => bail!(
            "maps.kind must be one of standard, pl_conjugated, synthetic_denjoy, explicit; \
             got {other:?}"
        ),
    }
}

fn plan_rotation(e: &ExperimentConfig, index: usize) -> Result<ExperimentPlan> {
    reject_stray_fields(e, index, &["map", "iterations", "basepoints", "integer_form"])?;
    let map = match e.map.as_deref().unwrap_or("f") {
        "f" => MapChoice::F,
        "h" => MapChoice::H,
        other => bail!("experiments[{index}].map must be \"f\" or \"h\", got {other:?}"),
    };
    let iterations = e.iterations.unwrap_or(1000);
    if iterations == 0 {
        bail!("experiments[{index}].iterations must be at least 1");
    }
    let basepoints = match &e.basepoints {
        None => default_basepoints(),
        Some(list) if list.is_empty() => {
            bail!("experiments[{index}].basepoints must be nonempty when given")
        }
        Some(list) => list
            .iter()
            .enumerate()
            .map(|(k, s)| parse_value(s, &format!("experiments[{index}].basepoints[{k}]")))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(ExperimentPlan::Rotation {
        map,
        iterations,
        basepoints,
        integer_form: e.integer_form.unwrap_or(true),
    })
}

fn plan_orbit(e: &ExperimentConfig, index: usize) -> Result<ExperimentPlan> {
    reject_stray_fields(e, index, &["power", "grid", "tol", "iters", "mmax"])?;
    let power = e.power.unwrap_or(1);
    if power == 0 {
        bail!("experiments[{index}].power must be at least 1");
    }
    let grid = usize::try_from(e.grid.unwrap_or(DEFAULT_GRID as u64))
        .context("orbit grid out of range")?;
    if grid < 2 {
        bail!("experiments[{index}].grid must be at least 2");
    }
    let tol = e.tol.unwrap_or(DEFAULT_TOL);
    if !(tol >= 0.0) {
        bail!("experiments[{index}].tol must be a nonnegative number");
    }
    let iters = e.iters.unwrap_or(200);
    if iters == 0 {
        bail!("experiments[{index}].iters must be at least 1");
    }
    let mmax = e.mmax.unwrap_or(8);
    if mmax == 0 {
        bail!("experiments[{index}].mmax must be at least 1");
    }
    Ok(ExperimentPlan::Orbit {
        power,
        grid,
        tol,
        iters,
        mmax,
    })
}

fn plan_obstruction(
    e: &ExperimentConfig,
    index: usize,
    synthetic: Option<&ObstructionConfig>,
) -> Result<ExperimentPlan> {
    reject_stray_fields(e, index, &["epsilon", "j", "i", "m_max", "s_max"])?;
    let cfg = if let Some(base) = synthetic {
        // The generator measured its own constants; config fields override
        // them individually.
        let mut cfg = base.clone();
        if let Some(s) = &e.epsilon {
            cfg.epsilon = parse_value(s, &format!("experiments[{index}].epsilon"))?;
        }
        if let Some(spec) = &e.j {
            cfg.j = parse_interval(spec, &format!("experiments[{index}].j"))?;
        }
        if let Some(spec) = &e.i {
            cfg.i = parse_interval(spec, &format!("experiments[{index}].i"))?;
        }
        if let Some(m) = e.m_max {
            cfg.m_max = m;
        }
        if let Some(s) = e.s_max {
            cfg.s_max = s;
        }
        cfg
    } else {
        let eps_text = e.epsilon.as_ref().ok_or_else(|| {
            anyhow!("experiments[{index}].epsilon is required for these maps")
        })?;
        let epsilon = parse_value(eps_text, &format!("experiments[{index}].epsilon"))?;
        let j_spec = e
            .j
            .as_ref()
            .ok_or_else(|| anyhow!("experiments[{index}].j is required for these maps"))?;
        let j = parse_interval(j_spec, &format!("experiments[{index}].j"))?;
        let i = match &e.i {
            Some(spec) => parse_interval(spec, &format!("experiments[{index}].i"))?,
            None => j.clone(),
        };
        let m_max = e.m_max.ok_or_else(|| {
            anyhow!("experiments[{index}].m_max is required for these maps")
        })?;
        ObstructionConfig {
            epsilon,
            j,
            i,
            m_max,
            s_max: e.s_max.unwrap_or(3),
        }
    };
    if cfg.m_max == 0 {
        bail!("experiments[{index}].m_max must be at least 1");
    }
    if cfg.s_max == 0 {
        bail!("experiments[{index}].s_max must be at least 1");
    }
    Ok(ExperimentPlan::Obstruction { cfg })
}

fn plan_semiconjugacy(
    e: &ExperimentConfig,
    index: usize,
    maps_kind: &str,
    conjugator: Option<&CircleMap>,
) -> Result<ExperimentPlan> {
    reject_stray_fields(e, index, &["depth", "grid", "base", "anchor", "mmax"])?;
    let depth = e.depth.unwrap_or(8);
    if depth == 0 {
        bail!("experiments[{index}].depth must be at least 1");
    }
    let grid = u32::try_from(e.grid.unwrap_or(DEFAULT_GRID as u64))
        .context("semiconjugacy grid out of range")?;
    if grid == 0 {
        bail!("experiments[{index}].grid must be at least 1");
    }

    // Default base and anchor: the two distinguished points of the model —
    // the scaling generator's non-anchored fixed point and the common
    // fixed point — pulled back exactly through the conjugator when one is
    // known.
    let (base, anchor) = match (&e.base, &e.anchor) {
        (Some(b), a) => {
            let base = parse_point(b, &format!("experiments[{index}].base"))?;
            let anchor = match a {
                Some(spec) => parse_point(spec, &format!("experiments[{index}].anchor"))?,
                None => CirclePoint::angular(Value::zero()),
            };
            (base, anchor)
        }
        (None, a) => {
            let (base, default_anchor) = match (maps_kind, conjugator) {
                ("standard", _) => (
                    CirclePoint::projective(Value::zero()),
                    CirclePoint::angular(Value::zero()),
                ),
                ("pl_conjugated", Some(phi)) => {
                    let phi_inv = phi
                        .inverse()
                        .map_err(|err| anyhow!("experiments[{index}]: conjugator: {err}"))?;
                    (
                        phi_inv.evaluate(&CirclePoint::projective(Value::zero())),
                        phi_inv.evaluate(&CirclePoint::angular(Value::zero())),
                    )
                }
                _ => bail!(
                    "experiments[{index}].base is required when maps.kind = {maps_kind:?} \
                     (no canonical base point is known for these maps)"
                ),
            };
            let anchor = match a {
                Some(spec) => parse_point(spec, &format!("experiments[{index}].anchor"))?,
                None => default_anchor,
            };
            (base, anchor)
        }
    };
    if base.same_point(&anchor) {
        bail!("experiments[{index}]: base and anchor must be distinct points");
    }
    Ok(ExperimentPlan::Semiconjugacy {
        depth,
        grid,
        base,
        anchor,
        mmax: e.mmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_standard_scenario_validates() {
        let cfg = parse_scenario(
            r#"
            name = "tiny"
            n = 2
            [maps]
            kind = "standard"
            [[experiments]]
            kind = "rotation"
            "#,
        )
        .expect("parses");
        let v = validate(&cfg, None).expect("validates");
        assert_eq!(v.n, 2);
        assert_eq!(v.experiments.len(), 1);
        assert_eq!(v.experiments[0].kind(), "rotation");
    }

    #[test]
    fn group_parameter_below_two_is_rejected() {
        let cfg = parse_scenario(
            r#"
            name = "bad"
            n = 1
            [maps]
            kind = "standard"
            "#,
        )
        .expect("parses");
        let err = validate(&cfg, None).expect_err("n = 1 must fail");
        assert!(err.to_string().contains("at least 2"), "got: {err}");
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = parse_scenario(
            r#"
            name = "bad"
            n = 2
            frobnicate = 1
            [maps]
            kind = "standard"
            "#,
        )
        .expect_err("unknown key must fail");
        assert!(err.to_string().contains("frobnicate"), "got: {err}");
    }

    #[test]
    fn stray_kind_specific_fields_are_errors() {
        let cfg = parse_scenario(
            r#"
            name = "bad"
            n = 2
            [maps]
            kind = "standard"
            [[experiments]]
            kind = "rotation"
            depth = 8
            "#,
        )
        .expect("parses");
        let err = validate(&cfg, None).expect_err("stray field must fail");
        assert!(err.to_string().contains("`depth`"), "got: {err}");
    }

    #[test]
    fn explicit_literals_materialize() {
        let cfg = parse_scenario(
            r#"
            name = "explicit"
            n = 2
            [maps]
            kind = "explicit"
            f = { moebius = [1, 1, 0, 1] }
            h = { moebius = [2, 0, 0, 1] }
            [[experiments]]
            kind = "orbit"
            "#,
        )
        .expect("parses");
        let v = validate(&cfg, None).expect("validates");
        let (f0, h0) = bslab_core::fixtures::affine_pair(2);
        assert_eq!(v.f, f0);
        assert_eq!(v.h, h0);
    }

    #[test]
    fn pl_literal_breakpoints_parse_exactly() {
        let cfg = parse_scenario(
            r#"
            name = "pl"
            n = 2
            [maps]
            kind = "explicit"
            f = { pl_circle = { breakpoints = [["0", "0"], ["1/4", "1/2"], ["1/2", "3/4"]] } }
            h = { rotation = "1/3" }
            "#,
        )
        .expect("parses");
        let v = validate(&cfg, None).expect("validates");
        match &v.f {
            CircleMap::PlCircle(pl) => assert_eq!(pl.knots().len(), 3),
            other => panic!("expected a piecewise-linear circle map, got {other:?}"),
        }
        assert_eq!(v.h, CircleMap::rotation(Value::ratio(1, 3)));
    }

    #[test]
    fn synthetic_maps_default_their_obstruction_constants() {
        let cfg = parse_scenario(
            r#"
            name = "syn"
            n = 2
            [maps]
            kind = "synthetic_denjoy"
            depth = 4
            [[experiments]]
            kind = "obstruction"
            "#,
        )
        .expect("parses");
        let v = validate(&cfg, None).expect("validates");
        let syn = v.synthetic_cfg.as_ref().expect("generated constants");
        match &v.experiments[0] {
            ExperimentPlan::Obstruction { cfg } => {
                assert_eq!(cfg.m_max, syn.m_max);
                assert_eq!(cfg.epsilon, syn.epsilon);
            }
            other => panic!("expected an obstruction plan, got kind {}", other.kind()),
        }
    }

    #[test]
    fn command_line_seed_overrides_scenario_seed() {
        let cfg = parse_scenario(
            r#"
            name = "seeded"
            n = 2
            seed = 3
            [maps]
            kind = "pl_conjugated"
            "#,
        )
        .expect("parses");
        let a = validate(&cfg, None).expect("validates");
        let b = validate(&cfg, Some(4)).expect("validates");
        assert_eq!(a.seed, 3);
        assert_eq!(b.seed, 4);
        assert_ne!(a.f, b.f, "a different seed must draw a different conjugator");
    }
}
