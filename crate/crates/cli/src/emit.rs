//! Report emission: `json` is the full structured record, `csv` flattens
//! every experiment into `(scenario, experiment, kind, field, value)` rows,
//! and `plotdata` writes newline-delimited numeric columns for the two
//! plottable experiment types.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::runner::{verdict_string, ExperimentRecord, PlotBlob, Report};

/// Scenario names become file stems; anything path-hostile is mapped to '-'.
pub fn file_stem(name: &str) -> String {
    let stem: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '-'
            }
        })
        .collect();
    if stem.is_empty() {
        "report".to_string()
    } else {
        stem
    }
}

pub fn write_json(out_dir: &Path, report: &Report) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let path = out_dir.join(format!("{}.json", file_stem(&report.scenario)));
    let mut text = serde_json::to_string_pretty(report).context("serializing report")?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn write_csv(out_dir: &Path, report: &Report) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let path = out_dir.join(format!("{}.csv", file_stem(&report.scenario)));
    let mut w = csv::Writer::from_path(&path)
        .with_context(|| format!("opening {}", path.display()))?;
    w.write_record(["scenario", "experiment", "kind", "field", "value"])
        .context("writing csv header")?;
    for (index, record) in report.experiments.iter().enumerate() {
        for (field, value) in flatten(record) {
            w.write_record([
                report.scenario.as_str(),
                &index.to_string(),
                &record.kind,
                &field,
                &value,
            ])
            .context("writing csv row")?;
        }
    }
    w.flush().context("flushing csv")?;
    Ok(path)
}

pub fn write_plotdata(out_dir: &Path, report: &Report, plots: &[PlotBlob]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let stem = file_stem(&report.scenario);
    let mut paths = Vec::with_capacity(plots.len());
    for blob in plots {
        let path = out_dir.join(format!("{stem}.e{}.{}.dat", blob.experiment_index, blob.kind));
        fs::write(&path, &blob.text).with_context(|| format!("writing {}", path.display()))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Flat `(field, value)` pairs for one experiment, stable order.
fn flatten(record: &ExperimentRecord) -> Vec<(String, String)> {
    let mut rows: Vec<(String, String)> = vec![("ok".into(), record.ok.to_string())];
    if let Some(e) = &record.error {
        rows.push(("error".into(), e.clone()));
    }
    if let Some(r) = &record.rotation {
        rows.push(("map".into(), r.map.to_string()));
        rows.push(("iterations".into(), r.enclosure.iterations.to_string()));
        rows.push(("lo".into(), r.enclosure.lo.to_string()));
        rows.push(("hi".into(), r.enclosure.hi.to_string()));
        rows.push(("width".into(), r.enclosure.width().to_string()));
        if let Some(form) = &r.integer_form {
            rows.push(("l".into(), form.l.to_string()));
            rows.push(("l_raw".into(), form.l_raw.to_string()));
            rows.push(("modulus".into(), form.modulus.to_string()));
        }
        if let Some(note) = &r.integer_form_note {
            rows.push(("integer_form_note".into(), note.clone()));
        }
    }
    if let Some(o) = &record.orbit {
        rows.push(("power".into(), o.power.to_string()));
        rows.push(("grid".into(), o.grid.to_string()));
        rows.push(("tol".into(), format!("{:?}", o.tol)));
        rows.push(("fixed_point_count".into(), o.fixed_point_count.to_string()));
        rows.push((
            "invariance_all_pass".into(),
            o.invariance_all_pass.to_string(),
        ));
        rows.push((
            "minimal_m".into(),
            o.minimal_m
                .map(|m| m.to_string())
                .unwrap_or_else(|| "none".into()),
        ));
        rows.push((
            "common_fixed_point_angular".into(),
            o.common_fixed_point.angular_value().to_string(),
        ));
    }
    if let Some(o) = &record.obstruction {
        rows.push(("epsilon".into(), o.config.epsilon.to_string()));
        rows.push(("m_max".into(), o.config.m_max.to_string()));
        rows.push(("s_max".into(), o.config.s_max.to_string()));
        rows.push(("j_length".into(), o.certificate.j_length.to_string()));
        rows.push((
            "verdict".into(),
            verdict_string(&o.certificate.verdict),
        ));
        let p = &o.certificate.preconditions;
        rows.push((
            "preconditions.epsilon_admissible".into(),
            p.epsilon_admissible.to_string(),
        ));
        rows.push((
            "preconditions.j_endpoints_fixed".into(),
            p.j_endpoints_fixed.to_string(),
        ));
        rows.push((
            "preconditions.f_nontrivial_on_j".into(),
            p.f_nontrivial_on_j.to_string(),
        ));
        rows.push(("preconditions.wandering".into(), p.wandering.to_string()));
        rows.push((
            "preconditions.derivative_bounds".into(),
            p.derivative_bounds.to_string(),
        ));
        for row in &o.certificate.rows {
            let m = row.m;
            rows.push((format!("row{m}.count"), row.count.to_string()));
            rows.push((format!("row{m}.total_measured"), row.total_measured.to_string()));
            rows.push((
                format!("row{m}.theoretical_bound"),
                row.theoretical_bound.to_string(),
            ));
            rows.push((format!("row{m}.disjoint"), row.disjoint.to_string()));
            rows.push((
                format!("row{m}.contained_in_j"),
                row.contained_in_j.to_string(),
            ));
        }
    }
    if let Some(o) = &record.semiconjugacy {
        rows.push(("depth".into(), o.depth.to_string()));
        rows.push(("grid".into(), o.grid.to_string()));
        rows.push(("attempt".into(), o.attempt.clone()));
        rows.push(("modulus".into(), o.modulus.to_string()));
        rows.push(("used_fallback".into(), o.used_fallback.to_string()));
        rows.push(("table_size".into(), o.table_size.to_string()));
        rows.push(("degree".into(), o.degree.to_string()));
        rows.push(("identity_like".into(), o.identity_like.to_string()));
        rows.push(("monotone".into(), o.monotone.to_string()));
        rows.push((
            "defect_translation".into(),
            o.defect_translation.to_string(),
        ));
        rows.push(("defect_scaling".into(), o.defect_scaling.to_string()));
    }
    rows
}
