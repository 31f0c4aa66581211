//! Numeric CSV ingestion.
//!
//! Dialect: comma-separated UTF-8, decimal point '.', scientific notation
//! accepted, no quoting. Feature columns first, label columns last. A header
//! row is optional and detected by a non-numeric first row.

use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numfmt::float_repr;

use super::Dataset;

/// Loads a CSV file whose last `label_count` columns are binary labels.
pub fn load_csv(path: impl AsRef<Path>, label_count: usize) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(path, &text, label_count)
}

fn parse_csv(path: &Path, text: &str, label_count: usize) -> Result<Dataset> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut width: Option<usize> = None;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if rows.is_empty() && header.is_none() {
            // First content row: a non-numeric cell marks it as the header.
            if cells.iter().any(|c| c.parse::<f64>().is_err()) {
                header = Some(cells.iter().map(|c| c.to_string()).collect());
                width = Some(cells.len());
                continue;
            }
        }
        if let Some(w) = width {
            if cells.len() != w {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: format!("expected {w} columns, found {}", cells.len()),
                });
            }
        } else {
            width = Some(cells.len());
        }
        let mut row = Vec::with_capacity(cells.len());
        for (col, cell) in cells.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("column {}: '{cell}' is not a number", col + 1),
            })?;
            row.push(v);
        }
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(Error::validation(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    let width = width.unwrap();
    if label_count == 0 || label_count >= width {
        return Err(Error::validation(format!(
            "label count {label_count} leaves no feature columns (file has {width} columns)"
        )));
    }
    let d = width - label_count;
    let n = rows.len();

    // Validate label cells with their file coordinates before building matrices.
    let data_start = if header.is_some() { 2 } else { 1 };
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row[d..].iter().enumerate() {
            if v != 0.0 && v != 1.0 {
                return Err(Error::validation(format!(
                    "{}: label value {v} at row {}, column {} is not 0 or 1",
                    path.display(),
                    data_start + i,
                    d + j + 1
                )));
            }
        }
    }

    let features = DMatrix::from_fn(d, n, |i, j| rows[j][i]);
    let labels = DMatrix::from_fn(label_count, n, |i, j| rows[j][d + i]);
    let (feature_names, label_names) = match header {
        Some(h) => (
            h[..d].to_vec(),
            h[d..].to_vec(),
        ),
        None => (
            (1..=d).map(|i| format!("f{i}")).collect(),
            (1..=label_count).map(|i| format!("label{i}")).collect(),
        ),
    };
    Dataset::new(features, labels, feature_names, label_names)
}

/// Writes a dataset as CSV with a header row. Features are written with 17
/// significant digits so a reload reproduces them bit-exactly; labels as 0/1.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let mut header: Vec<String> = dataset.feature_names().to_vec();
    header.extend(dataset.label_names().iter().cloned());
    out.push_str(&header.join(","));
    out.push('\n');
    for j in 0..dataset.num_instances() {
        let mut cells: Vec<String> = (0..dataset.num_features())
            .map(|i| float_repr(dataset.features()[(i, j)]))
            .collect();
        for i in 0..dataset.num_labels() {
            cells.push(if dataset.labels()[(i, j)] == 1.0 { "1" } else { "0" }.to_string());
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
