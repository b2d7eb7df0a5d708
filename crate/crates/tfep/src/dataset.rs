//! CSV ingestion and seeded subsampling for real-data workflows.
//!
//! Ingestion is deliberately strict: values come out in file order, blank
//! rows are skipped with a count (never silently), and any non-numeric
//! cell in the selected column is an error naming the offending row —
//! there is no silent coercion.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed::Seed;

/// Which column of a delimited file holds the observations.
///
/// Parsed from text: an unsigned integer selects by 0-based position,
/// anything else selects by header name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

impl fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnSelector::Name(name) => write!(f, "`{name}`"),
            ColumnSelector::Index(idx) => write!(f, "index {idx}"),
        }
    }
}

impl FromStr for ColumnSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        if text.is_empty() {
            return Err(Error::Parse("column selector must not be empty".into()));
        }
        if let Ok(idx) = text.parse::<usize>() {
            Ok(ColumnSelector::Index(idx))
        } else {
            Ok(ColumnSelector::Name(text.to_string()))
        }
    }
}

/// A column of observations inside a delimited text file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetRef {
    pub path: PathBuf,
    pub column: ColumnSelector,
    /// Field delimiter; must be a single ASCII character. Default comma.
    pub delimiter: u8,
    pub has_header: bool,
}

impl DatasetRef {
    pub fn new(
        path: impl Into<PathBuf>,
        column: ColumnSelector,
        delimiter: char,
        has_header: bool,
    ) -> Result<Self> {
        if !delimiter.is_ascii() {
            return Err(Error::Parameter(format!(
                "delimiter must be a single ASCII character; got `{delimiter}`"
            )));
        }
        Ok(DatasetRef {
            path: path.into(),
            column,
            delimiter: delimiter as u8,
            has_header,
        })
    }
}

/// The values read from a dataset, in file order, plus ingestion warnings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestResult {
    pub values: Vec<f64>,
    /// Number of blank rows (empty lines or all-empty fields) skipped.
    pub skipped_blank_rows: usize,
}

fn resolve_column(selector: &ColumnSelector, headers: Option<&csv::StringRecord>) -> Result<usize> {
    match selector {
        ColumnSelector::Index(idx) => Ok(*idx),
        ColumnSelector::Name(name) => {
            let headers = headers.ok_or_else(|| {
                Error::Data(format!(
                    "column {selector} was requested by name but the file has no \
                     header row; select the column by 0-based index instead"
                ))
            })?;
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| {
                    let available: Vec<&str> = headers.iter().collect();
                    Error::Data(format!(
                        "column {selector} not found; available columns: {}",
                        available.join(", ")
                    ))
                })
        }
    }
}

/// Read the selected column as finite reals, preserving file order.
pub fn ingest_csv(dataset: &DatasetRef) -> Result<IngestResult> {
    let raw = std::fs::read_to_string(&dataset.path).map_err(|e| {
        Error::Data(format!("cannot read {}: {e}", dataset.path.display()))
    })?;
    // The CSV reader silently drops fully empty lines; count them up front
    // so the skip is reported, not silent.
    let blank_lines = raw.lines().filter(|line| line.trim().is_empty()).count();

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(dataset.delimiter)
        .has_headers(dataset.has_header)
        .flexible(true)
        .from_reader(raw.as_bytes());

    let headers = if dataset.has_header {
        Some(reader.headers().map_err(|e| {
            Error::Data(format!("cannot parse header of {}: {e}", dataset.path.display()))
        })?.clone())
    } else {
        None
    };
    let col = resolve_column(&dataset.column, headers.as_ref())?;

    let mut values = Vec::new();
    let mut skipped_blank_rows = blank_lines;
    for record in reader.records() {
        let record = record.map_err(|e| {
            Error::Data(format!("cannot parse {}: {e}", dataset.path.display()))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|field| field.trim().is_empty()) {
            skipped_blank_rows += 1;
            continue;
        }
        let cell = record.get(col).ok_or_else(|| {
            Error::Data(format!(
                "row {line}: the record has {} fields, so column {} does not exist",
                record.len(),
                dataset.column
            ))
        })?;
        let value: f64 = cell.trim().parse().map_err(|_| {
            Error::Data(format!(
                "row {line}: cannot parse `{cell}` in column {} as a number",
                dataset.column
            ))
        })?;
        if !value.is_finite() {
            return Err(Error::Data(format!(
                "row {line}: non-finite value `{cell}` in column {}",
                dataset.column
            )));
        }
        values.push(value);
    }

    if values.len() < 2 {
        return Err(Error::Data(format!(
            "fewer than 2 usable rows in {} (found {})",
            dataset.path.display(),
            values.len()
        )));
    }
    Ok(IngestResult {
        values,
        skipped_blank_rows,
    })
}

/// Simple random sample of `t` values without replacement, deterministic
/// given the seed (partial Fisher–Yates shuffle).
pub fn subsample(values: &[f64], t: usize, seed: Seed) -> Result<Vec<f64>> {
    let n = values.len();
    if t > n {
        return Err(Error::Parameter(format!(
            "subsample size {t} exceeds the {n} available values"
        )));
    }
    let mut pool: Vec<f64> = values.to_vec();
    let mut rng = seed.rng();
    for i in 0..t {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(t);
    Ok(pool)
}
