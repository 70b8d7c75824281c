//! Report files: the structured metric report, the two paper-shaped tables
//! and flat plot data. Tables round to 3 decimals; report.json keeps full
//! precision.

use std::path::Path;

use anyhow::Result;
use visrobust::metrics::{average_accuracy, MetricReport, PerSubMetric, SubMetric, WeightVector, GRID_LEVELS};
use visrobust::EvaluationGrid;

use crate::args::ReportArgs;
use crate::config::{parse_preferences, parse_weights, RunConfig};
use crate::evaluate::read_grid;
use crate::fsio::write_atomic;

pub const REPORT_JSON: &str = "report.json";
pub const ACCURACY_TABLE: &str = "table_accuracy.csv";
pub const METRIC_TABLE: &str = "table_metrics.csv";
pub const PLOT_RELATIVE_DROP: &str = "plot_relative_drop_heatmap.csv";
pub const PLOT_AVERAGE_ERROR: &str = "plot_average_error_bars.csv";
pub const PLOT_ERROR_TRENDS: &str = "plot_error_trends.csv";
pub const PLOT_RADAR: &str = "plot_submetric_radar.csv";
pub const RUN_CONFIG: &str = "run_config.json";

fn fmt3(x: f64) -> String {
    format!("{x:.3}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".into(), fmt3)
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

fn csv_bytes(header: &[String], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(w.into_inner()?)
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Per-model A_{v,c} row with A_v, A_{v,0} and A^rel_v (percent); a final
/// A_c row and an A^rel_c row (percent).
pub fn accuracy_table(grid: &EvaluationGrid, report: &MetricReport) -> Result<Vec<u8>> {
    let avg = average_accuracy(grid);
    let mut header = vec!["model".to_string()];
    header.extend(grid.corruptions().iter().cloned());
    header.extend(strings(&["A_v", "A_v0", "A_rel_v_pct"]));
    let mut rows = Vec::new();
    for (v, m) in report.models.iter().enumerate() {
        let mut row = vec![m.model.clone()];
        row.extend((0..grid.n_corruptions()).map(|c| fmt3(*avg.get(v, c))));
        row.extend([fmt3(m.average_accuracy), fmt3(m.clean_accuracy), pct(m.relative_drop)]);
        rows.push(row);
    }
    let pad = || vec![String::new(); 3];
    let mut a_c = vec!["A_c".to_string()];
    a_c.extend(report.corruptions.iter().map(|c| fmt3(c.average_accuracy)));
    a_c.extend(pad());
    rows.push(a_c);
    let mut rel_c = vec!["A_rel_c_pct".to_string()];
    rel_c.extend(report.corruptions.iter().map(|c| pct(c.relative_drop)));
    rel_c.extend(pad());
    rows.push(rel_c);
    csv_bytes(&header, rows)
}

fn submetric_cells(values: &PerSubMetric<Option<f64>>) -> Vec<String> {
    SubMetric::ALL.iter().map(|m| fmt_opt(*values.get(*m))).collect()
}

/// One row per model then per corruption: accuracy columns, raw and scaled
/// sub-metric aggregates, and VRE.
pub fn metric_table(report: &MetricReport) -> Result<Vec<u8>> {
    let mut header = strings(&["axis", "name", "A_v0", "A", "A_rel_pct"]);
    header.extend(SubMetric::ALL.iter().map(|m| m.symbol().to_string()));
    header.extend(SubMetric::ALL.iter().map(|m| format!("{}_scaled", m.symbol())));
    header.push("VRE".into());
    let mut rows = Vec::new();
    for m in &report.models {
        let mut row = vec![
            "model".into(),
            m.model.clone(),
            fmt3(m.clean_accuracy),
            fmt3(m.average_accuracy),
            pct(m.relative_drop),
        ];
        row.extend(submetric_cells(&m.raw));
        row.extend(submetric_cells(&m.scaled));
        row.push(fmt_opt(m.vre));
        rows.push(row);
    }
    for c in &report.corruptions {
        let mut row = vec![
            "corruption".into(),
            c.corruption.clone(),
            String::new(),
            fmt3(c.average_accuracy),
            pct(c.relative_drop),
        ];
        row.extend(submetric_cells(&c.raw));
        row.extend(submetric_cells(&c.scaled));
        row.push(fmt_opt(c.vre));
        rows.push(row);
    }
    csv_bytes(&header, rows)
}

pub fn plot_files(report: &MetricReport) -> Result<Vec<(&'static str, Vec<u8>)>> {
    let heat = report
        .cells
        .iter()
        .map(|c| vec![c.model.clone(), c.corruption.clone(), pct(c.relative_drop)])
        .collect();
    let bars = report
        .cells
        .iter()
        .map(|c| vec![c.model.clone(), c.corruption.clone(), fmt_opt(c.raw.average_error)])
        .collect();
    let trends = report
        .cells
        .iter()
        .flat_map(|c| {
            (0..GRID_LEVELS).map(move |l| vec![c.model.clone(), c.corruption.clone(), l.to_string(), fmt3(c.errors[l])])
        })
        .collect();
    let radar = report
        .models
        .iter()
        .flat_map(|m| {
            SubMetric::ALL
                .iter()
                .map(move |k| vec![m.model.clone(), k.symbol().to_string(), fmt_opt(*m.scaled.get(*k))])
        })
        .collect();
    Ok(vec![
        (
            PLOT_RELATIVE_DROP,
            csv_bytes(&strings(&["model", "corruption", "relative_drop_pct"]), heat)?,
        ),
        (
            PLOT_AVERAGE_ERROR,
            csv_bytes(&strings(&["model", "corruption", "average_error"]), bars)?,
        ),
        (
            PLOT_ERROR_TRENDS,
            csv_bytes(&strings(&["model", "corruption", "level", "error"]), trends)?,
        ),
        (
            PLOT_RADAR,
            csv_bytes(&strings(&["model", "submetric", "scaled_value"]), radar)?,
        ),
    ])
}

/// Resolves `--weights` / `--prefer` (default: equal weights).
pub fn weights_from_args(a: &ReportArgs) -> Result<(WeightVector, Option<[f64; 5]>)> {
    if let Some(w) = &a.weights {
        return Ok((parse_weights(w)?, None));
    }
    if a.prefer.is_empty() {
        return Ok((WeightVector::equal(), None));
    }
    let p = parse_preferences(&a.prefer)?;
    Ok((WeightVector::from_preferences(p)?, Some(p)))
}

pub fn run(a: &ReportArgs) -> Result<MetricReport> {
    let (weights, preferences) = weights_from_args(a)?;
    let grid = read_grid(&a.grid)?;
    let report = MetricReport::compute(&grid, weights)?;

    // Render everything before touching the output directory.
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    let mut files: Vec<(&str, Vec<u8>)> = vec![
        (REPORT_JSON, json.into_bytes()),
        (ACCURACY_TABLE, accuracy_table(&grid, &report)?),
        (METRIC_TABLE, metric_table(&report)?),
    ];
    files.extend(plot_files(&report)?);
    for (name, bytes) in &files {
        write_atomic(&a.out.join(name), bytes)?;
    }
    let config = RunConfig {
        preferences: preferences.map(|p| PerSubMetric::from_fn(|m| p[m.index()])),
        weights: Some(weights),
        output_formats: files.iter().map(|(n, _)| n.to_string()).collect(),
        ..RunConfig::new("report", &a.out).input("grid", &a.grid)
    };
    config.write(&a.out.join(RUN_CONFIG))?;
    log_summary(&report, &a.out);
    Ok(report)
}

fn log_summary(report: &MetricReport, out: &Path) {
    for m in &report.models {
        log::info!("{:>12}  VRE {}", m.model, fmt_opt(m.vre));
    }
    log::info!("report written to {}", out.display());
}
