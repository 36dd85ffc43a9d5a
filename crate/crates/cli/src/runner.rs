//! Executes a validated scenario: experiments run in order, later ones may
//! consume earlier outputs (the minimal power found by an orbit experiment
//! feeds the semiconjugacy fallback), and every outcome — including
//! negative verdicts — is data in the report. Only a failed computation
//! marks an experiment as errored.

use anyhow::{anyhow, Result};
use serde::Serialize;

use bslab_core::obstruction::{growth_certificate, Certificate, ObstructionConfig, Verdict};
use bslab_core::orbit::{
    common_fixed_point, fix_invariance_check, fixed_point_enclosures_of_power, minimal_power_m,
};
use bslab_core::rotation::{rho_rational_form, rotation_enclosure, RotationEnclosure};
use bslab_core::semiconjugacy::{
    build_semiconjugacy_with_fallback, monotone_check, semiconjugacy_defect, standard_model,
    MonotoneMapTable,
};
use bslab_core::{CircleMap, CirclePoint, Value};

use crate::config::{ExperimentPlan, MapChoice, ValidatedScenario};

/// The full structured record of one scenario run.
#[derive(Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub scenario: String,
    pub n: u32,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
    pub maps: MapsEcho,
    pub experiments: Vec<ExperimentRecord>,
    pub error_count: usize,
}

#[derive(Serialize)]
pub struct MapsEcho {
    pub kind: String,
    pub note: String,
    /// For conjugated pairs: the exact change of coordinates, so a report
    /// fully determines the scenario it came from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<CircleMap>,
    /// For synthetic pairs: the generator's measured obstruction constants.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthetic_constants: Option<ObstructionConfig>,
}

#[derive(Serialize)]
pub struct ExperimentRecord {
    pub kind: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotation: Option<RotationOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<ObstructionOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semiconjugacy: Option<SemiconjugacyOutcome>,
}

#[derive(Serialize)]
pub struct RotationOutcome {
    pub map: &'static str,
    pub enclosure: RotationEnclosure,
    /// The integer `l` with `n·ρ = ρ + l (mod n−1)`, when the enclosure is
    /// narrow enough to certify it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integer_form: Option<IntegerForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integer_form_note: Option<String>,
}

#[derive(Serialize)]
pub struct IntegerForm {
    pub l: i64,
    pub l_raw: i64,
    pub modulus: i64,
}

#[derive(Serialize)]
pub struct OrbitOutcome {
    pub power: u32,
    pub grid: usize,
    pub tol: f64,
    pub fixed_point_count: usize,
    pub fixed_points: Vec<CirclePoint>,
    pub invariance_all_pass: bool,
    /// Least `m ≥ 1` with `ρ(h^m) = 0`, within the configured cap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimal_m: Option<u32>,
    pub common_fixed_point: CirclePoint,
}

#[derive(Serialize)]
pub struct ObstructionOutcome {
    pub config: ObstructionConfig,
    pub certificate: Certificate,
}

#[derive(Serialize)]
pub struct SemiconjugacyOutcome {
    pub depth: u32,
    pub grid: u32,
    pub base: CirclePoint,
    pub anchor: CirclePoint,
    pub attempt: String,
    pub modulus: u32,
    pub used_fallback: bool,
    pub table_size: usize,
    pub degree: u32,
    pub identity_like: bool,
    pub monotone: bool,
    pub defect_translation: Value,
    pub defect_scaling: Value,
}

/// Plot-ready text produced alongside the report (only obstruction series
/// and semiconjugacy sample pairs are plottable).
pub struct PlotBlob {
    pub experiment_index: usize,
    pub kind: &'static str,
    pub text: String,
}

pub struct RunOutcome {
    pub report: Report,
    pub plots: Vec<PlotBlob>,
    pub summaries: Vec<String>,
}

pub fn run_scenario(s: &ValidatedScenario, timestamp_unix: Option<u64>) -> RunOutcome {
    let mut records = Vec::with_capacity(s.experiments.len());
    let mut plots = Vec::new();
    let mut summaries = Vec::new();
    let mut error_count = 0usize;
    // Orbit output consumed by later semiconjugacy experiments.
    let mut found_minimal_m: Option<u32> = None;

    for (index, plan) in s.experiments.iter().enumerate() {
        let kind = plan.kind();
        let result = match plan {
            ExperimentPlan::Rotation {
                map,
                iterations,
                basepoints,
                integer_form,
            } => run_rotation(s, *map, *iterations, basepoints, *integer_form),
            ExperimentPlan::Orbit {
                power,
                grid,
                tol,
                iters,
                mmax,
            } => run_orbit(s, *power, *grid, *tol, *iters, *mmax).map(|(rec, m)| {
                found_minimal_m = m;
                rec
            }),
            ExperimentPlan::Obstruction { cfg } => run_obstruction(s, cfg, index, &mut plots),
            ExperimentPlan::Semiconjugacy {
                depth,
                grid,
                base,
                anchor,
                mmax,
            } => run_semiconjugacy(
                s,
                *depth,
                *grid,
                base,
                anchor,
                mmax.or(found_minimal_m).unwrap_or(4),
                index,
                &mut plots,
            ),
        };
        let record = match result {
            Ok(record) => record,
            Err(e) => {
                error_count += 1;
                ExperimentRecord {
                    kind: kind.to_string(),
                    ok: false,
                    error: Some(e.to_string()),
                    rotation: None,
                    orbit: None,
                    obstruction: None,
                    semiconjugacy: None,
                }
            }
        };
        summaries.push(format!("[{index}] {}", summary_line(&record)));
        records.push(record);
    }

    RunOutcome {
        report: Report {
            schema: "bslab-report/1",
            scenario: s.name.clone(),
            n: s.n,
            seed: s.seed,
            timestamp_unix,
            maps: MapsEcho {
                kind: s.maps_kind.clone(),
                note: s.maps_note.clone(),
                conjugator: s.conjugator.clone(),
                synthetic_constants: s.synthetic_cfg.clone(),
            },
            experiments: records,
            error_count,
        },
        plots,
        summaries,
    }
}

fn blank(kind: &str) -> ExperimentRecord {
    ExperimentRecord {
        kind: kind.to_string(),
        ok: true,
        error: None,
        rotation: None,
        orbit: None,
        obstruction: None,
        semiconjugacy: None,
    }
}

fn run_rotation(
    s: &ValidatedScenario,
    map: MapChoice,
    iterations: u32,
    basepoints: &[Value],
    integer_form: bool,
) -> Result<ExperimentRecord> {
    let target = match map {
        MapChoice::F => &s.f,
        MapChoice::H => &s.h,
    };
    let enclosure =
        rotation_enclosure(target, iterations, basepoints).map_err(|e| anyhow!("{e}"))?;
    let (form, note) = if integer_form {
        match rho_rational_form(target, i64::from(s.n), iterations) {
            Ok(form) => (
                Some(IntegerForm {
                    l: form.l,
                    l_raw: form.l_raw,
                    modulus: form.modulus,
                }),
                None,
            ),
            // A too-wide enclosure is a data-level outcome, not a failure.
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    let mut record = blank("rotation");
    record.rotation = Some(RotationOutcome {
        map: map.label(),
        enclosure,
        integer_form: form,
        integer_form_note: note,
    });
    Ok(record)
}

fn run_orbit(
    s: &ValidatedScenario,
    power: u32,
    grid: usize,
    tol: f64,
    iters: u32,
    mmax: u32,
) -> Result<(ExperimentRecord, Option<u32>)> {
    let set =
        fixed_point_enclosures_of_power(&s.f, power, grid, tol).map_err(|e| anyhow!("{e}"))?;
    let invariance = fix_invariance_check(&s.f, &s.h, s.n, &set, tol).map_err(|e| anyhow!("{e}"))?;
    let minimal_m = minimal_power_m(&s.h, mmax);
    let m_for_common = minimal_m.unwrap_or(1);
    let common = common_fixed_point(&s.f, &s.h, s.n, m_for_common, iters, tol)
        .map_err(|e| anyhow!("common fixed point: {e}"))?;
    let mut record = blank("orbit");
    record.orbit = Some(OrbitOutcome {
        power,
        grid,
        tol,
        fixed_point_count: set.intervals.len(),
        fixed_points: set.representatives(),
        invariance_all_pass: invariance.all_pass,
        minimal_m,
        common_fixed_point: common,
    });
    Ok((record, minimal_m))
}

fn run_obstruction(
    s: &ValidatedScenario,
    cfg: &ObstructionConfig,
    index: usize,
    plots: &mut Vec<PlotBlob>,
) -> Result<ExperimentRecord> {
    let certificate = growth_certificate(&s.f, &s.h, cfg).map_err(|e| anyhow!("{e}"))?;

    let mut text = String::from("# m  count  total_measured  theoretical_bound\n");
    for row in &certificate.rows {
        text.push_str(&format!(
            "{} {} {} {}\n",
            row.m,
            row.count,
            row.total_measured.to_f64(),
            row.theoretical_bound.to_f64()
        ));
    }
    plots.push(PlotBlob {
        experiment_index: index,
        kind: "obstruction",
        text,
    });

    let mut record = blank("obstruction");
    record.obstruction = Some(ObstructionOutcome {
        config: cfg.clone(),
        certificate,
    });
    Ok(record)
}

#[allow(clippy::too_many_arguments)]
fn run_semiconjugacy(
    s: &ValidatedScenario,
    depth: u32,
    grid: u32,
    base: &CirclePoint,
    anchor: &CirclePoint,
    mmax: u32,
    index: usize,
    plots: &mut Vec<PlotBlob>,
) -> Result<ExperimentRecord> {
    let attempt_report = build_semiconjugacy_with_fallback(&s.f, &s.h, s.n, base, anchor, depth, mmax);

    let (attempt, table): (_, &MonotoneMapTable) = if let Ok(t) = &attempt_report.primary.result {
        (&attempt_report.primary, t)
    } else if let Some(fb) = attempt_report.fallback.as_ref() {
        match &fb.result {
            Ok(t) => (fb, t),
            Err(e) => {
                let first = match &attempt_report.primary.result {
                    Err(e) => e.to_string(),
                    Ok(_) => unreachable!("fallback only runs when the primary fails"),
                };
                return Err(anyhow!(
                    "no monotone table: generator-level attempt failed ({first}); \
                     finite-index attempt failed ({e})"
                ));
            }
        }
    } else {
        let first = match &attempt_report.primary.result {
            Err(e) => e.to_string(),
            Ok(_) => unreachable!("checked above"),
        };
        return Err(anyhow!("no monotone table: {first}"));
    };
    let used_fallback = attempt.modulus != s.n;

    // The defect is measured against the model the table claims: the
    // standard pair itself, or — for a finite-index table of modulus n^m —
    // the pair (translation by n−1, scaling by n^m).
    let model = standard_model(s.n);
    let (f_cmp, f_model, h_cmp, h_model) = if used_fallback {
        let mut m = 0u32;
        let mut v: u64 = 1;
        while v < u64::from(attempt.modulus) {
            v *= u64::from(s.n);
            m += 1;
        }
        (
            s.f.pow(i64::from(s.n) - 1).map_err(|e| anyhow!("{e}"))?,
            model.f0.pow(i64::from(s.n) - 1).map_err(|e| anyhow!("{e}"))?,
            s.h.pow(i64::from(m)).map_err(|e| anyhow!("{e}"))?,
            CircleMap::scaling(i64::from(attempt.modulus)),
        )
    } else {
        (s.f.clone(), model.f0.clone(), s.h.clone(), model.h0.clone())
    };

    let monotone = monotone_check(table);
    let defect_translation = semiconjugacy_defect(table, &f_cmp, &f_model, grid);
    let defect_scaling = semiconjugacy_defect(table, &h_cmp, &h_model, grid);

    let mut text = String::from("# source_angular  target_angular\n");
    for sample in table.samples() {
        text.push_str(&format!(
            "{} {}\n",
            sample.source.angular_value().to_f64(),
            sample.target.angular_value().to_f64()
        ));
    }
    plots.push(PlotBlob {
        experiment_index: index,
        kind: "semiconjugacy",
        text,
    });

    let mut record = blank("semiconjugacy");
    record.semiconjugacy = Some(SemiconjugacyOutcome {
        depth,
        grid,
        base: base.clone(),
        anchor: anchor.clone(),
        attempt: attempt.description.clone(),
        modulus: attempt.modulus,
        used_fallback,
        table_size: table.len(),
        degree: table.degree(),
        identity_like: table.is_identity_like(),
        monotone,
        defect_translation,
        defect_scaling,
    });
    Ok(record)
}

pub fn verdict_string(v: &Verdict) -> String {
    match v {
        Verdict::ContradictionAt(m) => format!("ContradictionAt({m})"),
        Verdict::BoundsNotViolated => "BoundsNotViolated".to_string(),
        Verdict::PreconditionFailed(reason) => format!("PreconditionFailed: {reason}"),
    }
}

/// One human-readable line per experiment for the terminal.
pub fn summary_line(record: &ExperimentRecord) -> String {
    if let Some(e) = &record.error {
        return format!("{}: ERROR {e}", record.kind);
    }
    if let Some(r) = &record.rotation {
        let width = r.enclosure.width().to_f64();
        let mid = (r.enclosure.lo.to_f64() + r.enclosure.hi.to_f64()) / 2.0;
        let form = match (&r.integer_form, &r.integer_form_note) {
            (Some(f), _) => format!("; n·ρ = ρ + {} (mod {})", f.l, f.modulus),
            (None, Some(note)) => format!("; integer form unavailable: {note}"),
            (None, None) => String::new(),
        };
        return format!(
            "rotation({}): ρ ≈ {mid:.6} (width {width:.2e}){form}",
            r.map
        );
    }
    if let Some(o) = &record.orbit {
        let m = o
            .minimal_m
            .map(|m| m.to_string())
            .unwrap_or_else(|| "none ≤ cap".to_string());
        return format!(
            "orbit: {} fixed-point enclosure(s) of f^{}; invariance {}; minimal m = {m}; \
             common fixed point ≈ angular {:.6}",
            o.fixed_point_count,
            o.power,
            if o.invariance_all_pass { "pass" } else { "FAIL" },
            o.common_fixed_point.angular_value().to_f64()
        );
    }
    if let Some(o) = &record.obstruction {
        return format!(
            "obstruction: {} ({} row(s), |J| = {})",
            verdict_string(&o.certificate.verdict),
            o.certificate.rows.len(),
            o.certificate.j_length.to_f64()
        );
    }
    if let Some(o) = &record.semiconjugacy {
        return format!(
            "semiconjugacy: table of {} sample(s), degree {}{}{}; defects translation {} / scaling {}",
            o.table_size,
            o.degree,
            if o.identity_like { ", identity-like" } else { "" },
            if o.used_fallback {
                ", via finite-index subgroup"
            } else {
                ""
            },
            o.defect_translation.to_f64(),
            o.defect_scaling.to_f64()
        );
    }
    format!("{}: ok", record.kind)
}
