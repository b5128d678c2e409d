//! CSV formats shared by the CLI and the experiment harness.

use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::distributions::DegreeDistribution;
use crate::error::{Error, Result};
use crate::exact_inverse::ShiftResult;

#[derive(Debug, Deserialize)]
struct DistRow {
    degree: usize,
    count: f64,
}

/// Reads `degree,count` rows; degrees must be exactly `1, 2, ..., m`.
pub fn read_distribution<R: Read>(reader: R) -> Result<DegreeDistribution> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["degree", "count"] {
        return Err(Error::Format(format!(
            "expected header `degree,count`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut counts = Vec::new();
    for row in rdr.deserialize() {
        let row: DistRow = row?;
        let expected = counts.len() + 1;
        if row.degree != expected {
            return Err(Error::Format(format!(
                "degree classes must run 1..m in order; expected {expected}, found {}",
                row.degree
            )));
        }
        counts.push(row.count);
    }
    DegreeDistribution::new(counts)
}

pub fn read_distribution_file(path: &Path) -> Result<DegreeDistribution> {
    read_distribution(std::fs::File::open(path)?)
}

pub fn write_distribution<W: Write>(d: &DegreeDistribution, writer: W) -> Result<()> {
    write_columns(writer, &["degree", "count"], d.counts())
}

/// `degree,<value_name>` rows for classes `1..=values.len()`.
pub fn write_columns<W: Write>(writer: W, header: &[&str; 2], values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header)?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([(i + 1).to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `degree,x_real,x_rounded` with full-precision `x_real`.
pub fn write_shift<W: Write>(result: &ShiftResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["degree", "x_real", "x_rounded"])?;
    for (i, (real, rounded)) in result.x_real.iter().zip(&result.x_rounded).enumerate() {
        w.write_record([(i + 1).to_string(), real.to_string(), rounded.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
