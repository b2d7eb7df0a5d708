//! Report rendering: every result type serializes to CSV, JSON, or
//! Markdown.
//!
//! CSV and Markdown print numbers at a configurable precision (default 3
//! decimals); JSON always carries full precision and, for the simulation
//! reports, echoes the complete study configuration so a result document
//! is self-reproducing. Seeded reports start with a seed echo (`# seed=N`
//! in CSV, `Seed: N` in Markdown) so the master seed is never separated
//! from the numbers it produced.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimators::DiagnosticsReport;
use crate::inference::ConfidenceInterval;
use crate::montecarlo::{Cell, CoverageTable, OneSampleRow, OneSampleTable, TwoSampleRow, TwoSampleTable};

/// Output format tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Markdown => "markdown",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(Error::Parse(format!(
                "unknown format `{other}`; expected csv, json, or markdown"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    pub format: Format,
    /// Decimal places for CSV and Markdown numbers. JSON ignores this.
    pub precision: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            format: Format::Csv,
            precision: 3,
        }
    }
}

/// Any renderable result document.
#[derive(Debug, Clone)]
pub enum Report {
    Diagnostics {
        report: DiagnosticsReport,
        /// Present when the diagnosed values were a seeded subsample.
        seed: Option<u64>,
    },
    Interval(ConfidenceInterval),
    OneSampleStudy(OneSampleTable),
    TwoSampleStudy(TwoSampleTable),
    Coverage(CoverageTable),
    /// One-sample rows computed from an ingested dataset.
    OneSampleData {
        source: String,
        seed: Option<u64>,
        rows: Vec<OneSampleRow>,
    },
    /// Two-sample rows computed from a pair of ingested datasets.
    TwoSampleData {
        source: String,
        seed: Option<u64>,
        rows: Vec<TwoSampleRow>,
    },
}

impl Report {
    fn seed(&self) -> Option<u64> {
        match self {
            Report::Diagnostics { seed, .. } => *seed,
            Report::Interval(_) => None,
            Report::OneSampleStudy(t) => Some(t.config.master_seed),
            Report::TwoSampleStudy(t) => Some(t.config.master_seed),
            Report::Coverage(t) => Some(t.config.master_seed),
            Report::OneSampleData { seed, .. } | Report::TwoSampleData { seed, .. } => *seed,
        }
    }
}

/// Render a report in the requested format.
pub fn render(report: &Report, options: &RenderOptions) -> Result<String> {
    match options.format {
        Format::Json => render_json(report),
        Format::Csv => render_csv(report, options.precision),
        Format::Markdown => Ok(render_markdown(report, options.precision)),
    }
}

fn fmt_real(x: f64, precision: usize) -> String {
    if x.is_finite() {
        format!("{x:.precision$}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

// ---------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------

fn data_envelope(source: &str, seed: Option<u64>, rows: serde_json::Value) -> serde_json::Value {
    let mut obj = serde_json::Map::new();
    obj.insert("source".into(), serde_json::json!(source));
    if let Some(seed) = seed {
        obj.insert("seed".into(), serde_json::json!(seed));
    }
    obj.insert("rows".into(), rows);
    serde_json::Value::Object(obj)
}

fn render_json(report: &Report) -> Result<String> {
    let value = match report {
        Report::Diagnostics { report: d, seed } => serde_json::to_value(d).map(|mut value| {
            if let (Some(seed), Some(obj)) = (seed, value.as_object_mut()) {
                obj.insert("seed".into(), serde_json::json!(seed));
            }
            value
        }),
        Report::Interval(ci) => serde_json::to_value(ci),
        Report::OneSampleStudy(t) => serde_json::to_value(t),
        Report::TwoSampleStudy(t) => serde_json::to_value(t),
        Report::Coverage(t) => serde_json::to_value(t),
        Report::OneSampleData { source, seed, rows } => {
            serde_json::to_value(rows).map(|rows_value| data_envelope(source, *seed, rows_value))
        }
        Report::TwoSampleData { source, seed, rows } => {
            serde_json::to_value(rows).map(|rows_value| data_envelope(source, *seed, rows_value))
        }
    }
    .map_err(|e| Error::Numerical(format!("cannot serialize report to JSON: {e}")))?;
    serde_json::to_string_pretty(&value)
        .map_err(|e| Error::Numerical(format!("cannot serialize report to JSON: {e}")))
}

// ---------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------

/// Estimate/lower/upper columns for one interval cell; blank when the
/// cell failed.
fn ci_columns(cell: &Cell, precision: usize) -> [String; 3] {
    match &cell.ci {
        Some(ci) => [
            fmt_real(ci.estimate, precision),
            fmt_real(ci.lower, precision),
            fmt_real(ci.upper, precision),
        ],
        None => [String::new(), String::new(), String::new()],
    }
}

fn joined_errors(slots: &[(&str, &Cell)]) -> String {
    let mut parts = Vec::new();
    for (label, cell) in slots {
        if let Some(error) = &cell.error {
            parts.push(format!("{label}: {error}"));
        }
    }
    parts.join("; ")
}

fn render_csv(report: &Report, precision: usize) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let p = precision;
    match report {
        Report::Diagnostics { report: d, .. } => {
            writer
                .write_record([
                    "n",
                    "mean",
                    "median",
                    "sd",
                    "skewness",
                    "kurtosis",
                    "jb_statistic",
                    "jb_p_value",
                ])
                .and_then(|_| {
                    writer.write_record([
                        d.n.to_string(),
                        fmt_real(d.mean, p),
                        fmt_real(d.median, p),
                        fmt_real(d.sd, p),
                        fmt_real(d.skewness, p),
                        fmt_real(d.kurtosis, p),
                        fmt_real(d.jb_statistic, p),
                        fmt_real(d.jb_p_value, p),
                    ])
                })
        }
        Report::Interval(ci) => writer
            .write_record(["Level", "Estimate", "CI-low", "CI-high", "Width"])
            .and_then(|_| {
                writer.write_record([
                    fmt_real(ci.level, p),
                    fmt_real(ci.estimate, p),
                    fmt_real(ci.lower, p),
                    fmt_real(ci.upper, p),
                    fmt_real(ci.width(), p),
                ])
            }),
        Report::OneSampleStudy(OneSampleTable { rows, .. })
        | Report::OneSampleData { rows, .. } => {
            let mut result = writer.write_record([
                "level",
                "mean",
                "mean_lower",
                "mean_upper",
                "variance",
                "variance_lower",
                "variance_upper",
                "error",
            ]);
            for row in rows {
                if result.is_err() {
                    break;
                }
                let mean = ci_columns(&row.mean, p);
                let var = ci_columns(&row.variance, p);
                let error = joined_errors(&[("mean", &row.mean), ("variance", &row.variance)]);
                result = writer.write_record([
                    row.level.clone(),
                    mean[0].clone(),
                    mean[1].clone(),
                    mean[2].clone(),
                    var[0].clone(),
                    var[1].clone(),
                    var[2].clone(),
                    error,
                ]);
            }
            result
        }
        Report::TwoSampleStudy(TwoSampleTable { rows, .. })
        | Report::TwoSampleData { rows, .. } => {
            let mut result = writer.write_record([
                "level",
                "variance_ratio",
                "ratio_lower",
                "ratio_upper",
                "mean_difference",
                "diff_lower",
                "diff_upper",
                "error",
            ]);
            for row in rows {
                if result.is_err() {
                    break;
                }
                let ratio = ci_columns(&row.variance_ratio, p);
                let diff = ci_columns(&row.mean_difference, p);
                let error = joined_errors(&[
                    ("variance-ratio", &row.variance_ratio),
                    ("mean-difference", &row.mean_difference),
                ]);
                result = writer.write_record([
                    row.level.clone(),
                    ratio[0].clone(),
                    ratio[1].clone(),
                    ratio[2].clone(),
                    diff[0].clone(),
                    diff[1].clone(),
                    diff[2].clone(),
                    error,
                ]);
            }
            result
        }
        Report::Coverage(table) => {
            let mut result = writer.write_record([
                "target",
                "tau",
                "nominal",
                "empirical_coverage",
                "mean_width",
                "replications",
                "true_value",
            ]);
            for row in &table.rows {
                if result.is_err() {
                    break;
                }
                result = writer.write_record([
                    row.target.to_string(),
                    fmt_real(row.tau, p),
                    fmt_real(row.nominal, p),
                    fmt_real(row.empirical_coverage, p),
                    fmt_real(row.mean_width, p),
                    row.replications.to_string(),
                    fmt_real(row.true_value, p),
                ]);
            }
            result
        }
    }
    .map_err(|e| Error::Data(format!("cannot write CSV: {e}")))?;

    let body = writer
        .into_inner()
        .map_err(|e| Error::Data(format!("cannot write CSV: {e}")))
        .and_then(|bytes| {
            String::from_utf8(bytes).map_err(|e| Error::Data(format!("cannot write CSV: {e}")))
        })?;
    Ok(match report.seed() {
        Some(seed) => format!("# seed={seed}\n{body}"),
        None => body,
    })
}

// ---------------------------------------------------------------------
// Markdown
// ---------------------------------------------------------------------

/// "[lo, hi]" for a healthy cell, an em-dash for a failed one.
fn md_interval(cell: &Cell, precision: usize) -> (String, String) {
    match &cell.ci {
        Some(ci) => (
            fmt_real(ci.estimate, precision),
            format!(
                "[{}, {}]",
                fmt_real(ci.lower, precision),
                fmt_real(ci.upper, precision)
            ),
        ),
        None => ("—".into(), "—".into()),
    }
}

fn md_footnotes(out: &mut String, rows: Vec<(String, String)>) {
    if rows.is_empty() {
        return;
    }
    out.push('\n');
    for (level, error) in rows {
        out.push_str(&format!("- level {level}: {error}\n"));
    }
}

fn render_markdown(report: &Report, precision: usize) -> String {
    let p = precision;
    let mut out = String::new();
    if let Some(seed) = report.seed() {
        out.push_str(&format!("Seed: {seed}\n\n"));
    }
    match report {
        Report::Diagnostics { report: d, .. } => {
            out.push_str("| Statistic | Value |\n| --- | --- |\n");
            out.push_str(&format!("| n | {} |\n", d.n));
            out.push_str(&format!("| Mean | {} |\n", fmt_real(d.mean, p)));
            out.push_str(&format!("| Median | {} |\n", fmt_real(d.median, p)));
            out.push_str(&format!("| Std. dev. | {} |\n", fmt_real(d.sd, p)));
            out.push_str(&format!("| Skewness | {} |\n", fmt_real(d.skewness, p)));
            out.push_str(&format!("| Kurtosis | {} |\n", fmt_real(d.kurtosis, p)));
            out.push_str(&format!("| JB statistic | {} |\n", fmt_real(d.jb_statistic, p)));
            out.push_str(&format!("| JB p-value | {} |\n", fmt_real(d.jb_p_value, p)));
        }
        Report::Interval(ci) => {
            out.push_str("| Level | Estimate | CI | Width |\n| --- | --- | --- | --- |\n");
            out.push_str(&format!(
                "| {} | {} | [{}, {}] | {} |\n",
                fmt_real(ci.level, p),
                fmt_real(ci.estimate, p),
                fmt_real(ci.lower, p),
                fmt_real(ci.upper, p),
                fmt_real(ci.width(), p),
            ));
        }
        Report::OneSampleStudy(OneSampleTable { rows, .. })
        | Report::OneSampleData { rows, .. } => {
            out.push_str("| Level | Mean | CI | Variance | CI |\n");
            out.push_str("| --- | --- | --- | --- | --- |\n");
            let mut notes = Vec::new();
            for row in rows {
                let (mean, mean_ci) = md_interval(&row.mean, p);
                let (var, var_ci) = md_interval(&row.variance, p);
                out.push_str(&format!(
                    "| {} | {mean} | {mean_ci} | {var} | {var_ci} |\n",
                    row.level
                ));
                let error =
                    joined_errors(&[("mean", &row.mean), ("variance", &row.variance)]);
                if !error.is_empty() {
                    notes.push((row.level.clone(), error));
                }
            }
            md_footnotes(&mut out, notes);
        }
        Report::TwoSampleStudy(TwoSampleTable { rows, .. })
        | Report::TwoSampleData { rows, .. } => {
            out.push_str("| Level | R | CI | Δμ | CI |\n");
            out.push_str("| --- | --- | --- | --- | --- |\n");
            let mut notes = Vec::new();
            for row in rows {
                let (ratio, ratio_ci) = md_interval(&row.variance_ratio, p);
                let (diff, diff_ci) = md_interval(&row.mean_difference, p);
                out.push_str(&format!(
                    "| {} | {ratio} | {ratio_ci} | {diff} | {diff_ci} |\n",
                    row.level
                ));
                let error = joined_errors(&[
                    ("variance-ratio", &row.variance_ratio),
                    ("mean-difference", &row.mean_difference),
                ]);
                if !error.is_empty() {
                    notes.push((row.level.clone(), error));
                }
            }
            md_footnotes(&mut out, notes);
        }
        Report::Coverage(table) => {
            out.push_str("| Target | Tau | Nominal | Coverage | Mean width | Reps | True value |\n");
            out.push_str("| --- | --- | --- | --- | --- | --- | --- |\n");
            for row in &table.rows {
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} | {} |\n",
                    row.target,
                    fmt_real(row.tau, p),
                    fmt_real(row.nominal, p),
                    fmt_real(row.empirical_coverage, p),
                    fmt_real(row.mean_width, p),
                    row.replications,
                    fmt_real(row.true_value, p),
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionSpec;
    use crate::inference::{ScalingMode, Target};
    use crate::montecarlo::{
        coverage_experiment, run_one_sample_study, run_two_sample_study, StudyConfig, StudyKind,
    };
    use crate::trimming::TrimMode;

    fn study_config(kind: StudyKind) -> StudyConfig {
        StudyConfig {
            kind,
            dist1: DistributionSpec::normal(3.0, 2.0).unwrap(),
            dist2: Some(DistributionSpec::normal(0.0, 1.0).unwrap()),
            n1: 400,
            n2: 400,
            tau_grid: vec![0.0, 0.1],
            alpha: 0.05,
            replications: 40,
            master_seed: 42,
            scaling_mode: ScalingMode::DeltaCorrected,
            trim_mode: TrimMode::Symmetric,
            targets: vec![Target::Mean],
        }
    }

    #[test]
    fn format_parses_and_rejects() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert_eq!("markdown".parse::<Format>().unwrap(), Format::Markdown);
        assert!("yaml".parse::<Format>().is_err());
    }

    #[test]
    fn one_sample_csv_has_seed_header_and_schema() {
        let table = run_one_sample_study(&study_config(StudyKind::OneSample)).unwrap();
        let text = render(&Report::OneSampleStudy(table), &RenderOptions::default()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# seed=42");
        assert_eq!(
            lines.next().unwrap(),
            "level,mean,mean_lower,mean_upper,variance,variance_lower,variance_upper,error"
        );
        let first = lines.next().unwrap();
        assert!(first.starts_with("0,"), "{first}");
        // precision 3: every numeric field shows 3 decimals
        let fields: Vec<&str> = first.split(',').collect();
        assert_eq!(fields.len(), 8);
        assert_eq!(fields[1].split('.').nth(1).unwrap().len(), 3);
    }

    #[test]
    fn two_sample_markdown_uses_the_table_layout() {
        let table = run_two_sample_study(&study_config(StudyKind::TwoSample)).unwrap();
        let text = render(
            &Report::TwoSampleStudy(table),
            &RenderOptions {
                format: Format::Markdown,
                precision: 3,
            },
        )
        .unwrap();
        assert!(text.contains("| Level | R | CI | Δμ | CI |"), "{text}");
        assert!(text.starts_with("Seed: 42\n"), "{text}");
        assert_eq!(text.lines().filter(|l| l.starts_with("| 0")).count(), 2);
    }

    #[test]
    fn json_round_trips_full_precision() {
        let table = run_one_sample_study(&study_config(StudyKind::OneSample)).unwrap();
        let originals: Vec<f64> = table
            .rows
            .iter()
            .flat_map(|r| {
                let m = r.mean.ci.as_ref().unwrap();
                let v = r.variance.ci.as_ref().unwrap();
                vec![m.estimate, m.lower, m.upper, v.estimate, v.lower, v.upper]
            })
            .collect();
        let text = render(
            &Report::OneSampleStudy(table),
            &RenderOptions {
                format: Format::Json,
                precision: 3,
            },
        )
        .unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["config"]["master_seed"], 42);
        let mut reparsed = Vec::new();
        for row in value["rows"].as_array().unwrap() {
            for cell in ["mean", "variance"] {
                let ci = &row[cell]["ci"];
                for field in ["estimate", "lower", "upper"] {
                    reparsed.push(ci[field].as_f64().unwrap());
                }
            }
        }
        assert_eq!(originals.len(), reparsed.len());
        for (a, b) in originals.iter().zip(&reparsed) {
            assert_eq!(a.to_bits(), b.to_bits(), "JSON round trip must be exact");
        }
    }

    #[test]
    fn coverage_csv_matches_result_schema() {
        let mut config = study_config(StudyKind::Coverage);
        config.n1 = 150;
        config.replications = 30;
        let table = coverage_experiment(&config).unwrap();
        let text = render(&Report::Coverage(table), &RenderOptions::default()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# seed=42");
        assert_eq!(
            lines.next().unwrap(),
            "target,tau,nominal,empirical_coverage,mean_width,replications,true_value"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("mean,0.000,0.950,"), "{row}");
    }

    #[test]
    fn interval_csv_uses_the_level_estimate_width_schema() {
        let view = crate::trimming::sort_and_trim(
            &[1.0, 2.0, 3.0, 4.0, 5.0],
            crate::trimming::TrimSpec::symmetric(0.0).unwrap(),
        )
        .unwrap();
        let ci = crate::inference::one_sample_mean_ci(&view, 0.05).unwrap();
        let text = render(&Report::Interval(ci), &RenderOptions::default()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "Level,Estimate,CI-low,CI-high,Width");
        assert!(lines.next().unwrap().starts_with("0.950,3.000,"));
    }

    #[test]
    fn failed_cells_render_as_blanks_with_error_column() {
        let rows =
            crate::montecarlo::one_sample_rows(&[-1.0, -1.0, 1.0, 1.0], &[crate::trimming::TrimSpec::symmetric(0.0).unwrap()], 0.05)
                .unwrap();
        let report = Report::OneSampleData {
            source: "test".into(),
            seed: None,
            rows,
        };
        let csv = render(&report, &RenderOptions::default()).unwrap();
        assert!(!csv.starts_with("# seed"), "unseeded report has no seed echo");
        let data_line = csv.lines().nth(1).unwrap();
        // Mean interval exists; the variance cell failed and is blank.
        let fields: Vec<&str> = data_line.splitn(8, ',').collect();
        assert!(!fields[1].is_empty());
        assert!(fields[4].is_empty());
        assert!(fields[7].contains("variance:"), "{data_line}");

        let md = render(
            &report,
            &RenderOptions {
                format: Format::Markdown,
                precision: 3,
            },
        )
        .unwrap();
        assert!(md.contains("| — | — |"), "{md}");
        assert!(md.contains("- level 0:"), "{md}");
    }

    #[test]
    fn rendering_is_deterministic() {
        let table = run_one_sample_study(&study_config(StudyKind::OneSample)).unwrap();
        let report = Report::OneSampleStudy(table);
        for format in [Format::Csv, Format::Json, Format::Markdown] {
            let options = RenderOptions {
                format,
                precision: 3,
            };
            assert_eq!(
                render(&report, &options).unwrap(),
                render(&report, &options).unwrap()
            );
        }
    }

    #[test]
    fn infinite_true_value_renders_as_inf_everywhere() {
        let mut config = study_config(StudyKind::Coverage);
        config.dist1 = DistributionSpec::student_t(1.0, 5.0).unwrap();
        config.targets = vec![Target::Variance];
        config.tau_grid = vec![0.0];
        config.n1 = 100;
        config.replications = 10;
        let table = coverage_experiment(&config).unwrap();
        let report = Report::Coverage(table);
        let csv = render(&report, &RenderOptions::default()).unwrap();
        assert!(csv.lines().nth(2).unwrap().ends_with(",inf"), "{csv}");
        let json = render(
            &report,
            &RenderOptions {
                format: Format::Json,
                precision: 3,
            },
        )
        .unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["rows"][0]["true_value"], "inf");
    }
}
