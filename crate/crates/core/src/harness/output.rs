//! CSV persistence. Columns, in order:
//!
//! ```text
//! experiment,seed,method,h,lambda,T,lower,point,upper,alpha_true,policy_value
//! ```
//!
//! Floats are written with 10 significant digits (`{:.9e}`); fields that do not apply to a row
//! are empty.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{ExperimentId, Method, ResultRow};

pub const CSV_HEADER: [&str; 11] =
    ["experiment", "seed", "method", "h", "lambda", "T", "lower", "point", "upper", "alpha_true", "policy_value"];

fn float(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.9e}")).unwrap_or_default()
}

fn int(value: Option<usize>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(CSV_HEADER)?;
    for row in rows {
        csv.write_record([
            row.experiment.as_str().to_string(),
            row.seed.to_string(),
            row.method.as_str().to_string(),
            int(row.step),
            float(row.lambda),
            row.episodes.to_string(),
            float(row.lower),
            float(row.point),
            float(row.upper),
            float(row.alpha_true),
            float(row.policy_value),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// Writes `rows` to `path`. Empty input is an error and leaves no file behind.
pub fn emit_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("no rows to write".into()));
    }
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut buffer = Vec::new();
    write_csv(rows, &mut buffer)?;
    File::create(path)?.write_all(&buffer)?;
    Ok(())
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize) -> Result<Option<T>> {
    let raw = record.get(i).unwrap_or("");
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse().map(Some).map_err(|_| Error::Format(format!("cannot parse column {} value {raw:?}", CSV_HEADER[i])))
}

fn required<T>(value: Option<T>, i: usize) -> Result<T> {
    value.ok_or_else(|| Error::Format(format!("column {} is empty", CSV_HEADER[i])))
}

pub fn parse_csv<R: Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut csv = csv::Reader::from_reader(reader);
    let header = csv.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Format(format!("unexpected CSV header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut rows = Vec::new();
    for record in csv.records() {
        let record = record?;
        let experiment: String = required(parse_field(&record, 0)?, 0)?;
        let method: String = required(parse_field(&record, 2)?, 2)?;
        rows.push(ResultRow {
            experiment: experiment.parse::<ExperimentId>().map_err(|e| Error::Format(e.to_string()))?,
            seed: required(parse_field(&record, 1)?, 1)?,
            method: method.parse::<Method>()?,
            step: parse_field(&record, 3)?,
            lambda: parse_field(&record, 4)?,
            episodes: required(parse_field(&record, 5)?, 5)?,
            lower: parse_field(&record, 6)?,
            point: parse_field(&record, 7)?,
            upper: parse_field(&record, 8)?,
            alpha_true: parse_field(&record, 9)?,
            policy_value: parse_field(&record, 10)?,
        });
    }
    Ok(rows)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    parse_csv(File::open(path)?)
}
