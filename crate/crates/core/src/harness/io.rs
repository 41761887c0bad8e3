//! CSV input and output.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use crate::discrete::DiscreteSample;
use crate::error::{Error, Result};
use crate::timeseries::SeriesFrame;

fn data_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Data {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn open(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| data_error(path, 0, e.to_string()))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

/// Integer-valued sample, one row per observation. Each column's distinct
/// values are relabeled `0..` in increasing order.
pub fn read_sample_csv(path: &Path) -> Result<DiscreteSample> {
    let mut reader = open(path)?;
    let width = reader
        .headers()
        .map_err(|e| data_error(path, 1, e.to_string()))?
        .len();
    let mut raw: Vec<Vec<i64>> = vec![Vec::new(); width];
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            data_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        for (col, field) in record.iter().enumerate() {
            let v: i64 = field
                .trim()
                .parse()
                .map_err(|_| data_error(path, line, format!("column {col}: {field:?} is not an integer")))?;
            raw[col].push(v);
        }
    }
    if raw.first().is_none_or(|c| c.is_empty()) {
        return Err(data_error(path, 1, "no data rows"));
    }
    let mut columns = Vec::with_capacity(width);
    let mut sizes = Vec::with_capacity(width);
    for col in raw {
        let labels: BTreeMap<i64, u32> = col
            .iter()
            .copied()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, i as u32))
            .collect();
        sizes.push(labels.len());
        columns.push(col.iter().map(|v| labels[v]).collect());
    }
    DiscreteSample::from_columns(&columns, sizes)
}

/// `timestamp,value` with ISO-8601 dates.
pub fn read_series_csv(path: &Path) -> Result<SeriesFrame> {
    let mut reader = open(path)?;
    let mut ts = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            data_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 2 {
            return Err(data_error(path, line, format!("expected 2 fields, got {}", record.len())));
        }
        let t = NaiveDate::parse_from_str(record[0].trim(), "%Y-%m-%d")
            .map_err(|e| data_error(path, line, format!("timestamp {:?}: {e}", &record[0])))?;
        let v: f64 = record[1]
            .trim()
            .parse()
            .map_err(|_| data_error(path, line, format!("value {:?} is not a number", &record[1])))?;
        if !v.is_finite() {
            return Err(data_error(path, line, "value is not finite"));
        }
        if ts.last().is_some_and(|&prev| prev >= t) {
            return Err(data_error(path, line, "timestamps must be strictly increasing"));
        }
        ts.push(t);
        values.push(v);
    }
    let name = path
        .file_stem()
        .map_or_else(|| "series".to_string(), |s| s.to_string_lossy().into_owned());
    SeriesFrame::new(name, ts, values)
}

pub fn write_series_csv(path: &Path, frame: &SeriesFrame) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["timestamp", "value"])?;
    for (t, v) in frame.timestamps().iter().zip(frame.values()) {
        w.write_record([t.format("%Y-%m-%d").to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sample_csv(path: &Path, sample: &DiscreteSample) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record((0..sample.dims()).map(|m| format!("c{m}")))?;
    for i in 0..sample.n_rows() {
        w.write_record(sample.row(i).iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
