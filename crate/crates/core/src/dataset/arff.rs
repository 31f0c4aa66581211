//! ARFF ingestion in the MULAN dialect: `@attribute` / `@data`, dense rows,
//! and sparse rows in braces with implicit zeros. Attributes must be numeric
//! or {0,1} nominal; anything else is rejected.

use std::collections::HashSet;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::Dataset;

#[derive(Debug, Clone, Copy, PartialEq)]
enum AttrKind {
    Numeric,
    Binary, // nominal {0,1}
}

#[derive(Debug)]
struct Attribute {
    name: String,
    kind: AttrKind,
}

/// Loads an ARFF file, splitting attributes into label rows (those named in
/// `label_names`, in the given order) and feature rows (everything else).
pub fn load_arff(path: impl AsRef<Path>, label_names: &[String]) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_arff(path, &text, label_names)
}

fn parse_arff(path: &Path, text: &str, label_names: &[String]) -> Result<Dataset> {
    if label_names.is_empty() {
        return Err(Error::validation("label name list is empty"));
    }
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut in_data = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            let lower = line.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                continue;
            }
            if lower.starts_with("@attribute") {
                attributes.push(parse_attribute(path, line_no, line)?);
                continue;
            }
            if lower.starts_with("@data") {
                in_data = true;
                continue;
            }
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("unexpected header line '{line}'"),
            });
        }
        rows.push(parse_data_row(path, line_no, line, &attributes)?);
    }

    if !in_data || rows.is_empty() {
        return Err(Error::validation(format!(
            "{}: no data rows",
            path.display()
        )));
    }

    // Map label names to attribute indices, preserving the requested order.
    let mut label_idx = Vec::with_capacity(label_names.len());
    for name in label_names {
        let pos = attributes
            .iter()
            .position(|a| &a.name == name)
            .ok_or_else(|| {
                Error::validation(format!(
                    "label '{name}' does not name an attribute in {}",
                    path.display()
                ))
            })?;
        label_idx.push(pos);
    }
    let label_set: HashSet<usize> = label_idx.iter().copied().collect();
    if label_set.len() != label_idx.len() {
        return Err(Error::validation("duplicate label name"));
    }
    let feature_idx: Vec<usize> =
        (0..attributes.len()).filter(|i| !label_set.contains(i)).collect();
    if feature_idx.is_empty() {
        return Err(Error::validation(
            "every attribute is a label; no features remain",
        ));
    }

    let n = rows.len();
    let features = DMatrix::from_fn(feature_idx.len(), n, |i, j| rows[j][feature_idx[i]]);
    let labels = DMatrix::from_fn(label_idx.len(), n, |i, j| rows[j][label_idx[i]]);
    let feature_names = feature_idx
        .iter()
        .map(|&i| attributes[i].name.clone())
        .collect();
    Dataset::new(features, labels, feature_names, label_names.to_vec())
}

fn parse_attribute(path: &Path, line_no: usize, line: &str) -> Result<Attribute> {
    let rest = line["@attribute".len()..].trim();
    let (name, type_str) = split_attribute_name(rest).ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: line_no,
        message: "malformed @attribute line".into(),
    })?;
    let type_lower = type_str.trim().to_ascii_lowercase();
    let kind = if type_lower == "numeric" || type_lower == "real" || type_lower == "integer" {
        AttrKind::Numeric
    } else if type_lower.starts_with('{') && type_lower.ends_with('}') {
        let mut values: Vec<&str> = type_lower[1..type_lower.len() - 1]
            .split(',')
            .map(str::trim)
            .collect();
        values.sort_unstable();
        if values == ["0", "1"] {
            AttrKind::Binary
        } else {
            return Err(Error::UnsupportedAttribute {
                path: path.to_path_buf(),
                name: name.to_string(),
                reason: format!("nominal domain {type_str} is not {{0,1}}"),
            });
        }
    } else {
        return Err(Error::UnsupportedAttribute {
            path: path.to_path_buf(),
            name: name.to_string(),
            reason: format!("type '{type_str}' (only numeric and {{0,1}} nominal are supported)"),
        });
    };
    Ok(Attribute {
        name: name.to_string(),
        kind,
    })
}

/// Splits "name type" where the name may be quoted with ' or ".
fn split_attribute_name(rest: &str) -> Option<(&str, &str)> {
    let rest = rest.trim_start();
    let mut chars = rest.char_indices();
    let (_, first) = chars.next()?;
    if first == '\'' || first == '"' {
        for (i, c) in chars {
            if c == first {
                return Some((&rest[1..i], &rest[i + 1..]));
            }
        }
        None
    } else {
        let split = rest.find(char::is_whitespace)?;
        Some((&rest[..split], &rest[split + 1..]))
    }
}

fn parse_data_row(
    path: &Path,
    line_no: usize,
    line: &str,
    attributes: &[Attribute],
) -> Result<Vec<f64>> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        line: line_no,
        message,
    };
    let parse_value = |attr: &Attribute, cell: &str| -> Result<f64> {
        if cell == "?" {
            return Err(parse_err(format!(
                "missing value for attribute '{}' is not supported",
                attr.name
            )));
        }
        let v: f64 = cell
            .parse()
            .map_err(|_| parse_err(format!("'{cell}' is not a number")))?;
        if attr.kind == AttrKind::Binary && v != 0.0 && v != 1.0 {
            return Err(parse_err(format!(
                "value {v} outside nominal domain {{0,1}} of '{}'",
                attr.name
            )));
        }
        Ok(v)
    };

    if line.starts_with('{') {
        // Sparse row: "{index value, index value}" with implicit zeros.
        let inner = line
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| parse_err("unclosed sparse row".into()))?;
        let mut row = vec![0.0; attributes.len()];
        let inner = inner.trim();
        if !inner.is_empty() {
            for entry in inner.split(',') {
                let mut parts = entry.split_whitespace();
                let idx: usize = parts
                    .next()
                    .ok_or_else(|| parse_err("empty sparse entry".into()))?
                    .parse()
                    .map_err(|_| parse_err(format!("bad sparse index in '{entry}'")))?;
                let cell = parts
                    .next()
                    .ok_or_else(|| parse_err(format!("sparse entry '{entry}' has no value")))?;
                if idx >= attributes.len() {
                    return Err(parse_err(format!(
                        "sparse index {idx} out of range ({} attributes)",
                        attributes.len()
                    )));
                }
                row[idx] = parse_value(&attributes[idx], cell)?;
            }
        }
        Ok(row)
    } else {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != attributes.len() {
            return Err(parse_err(format!(
                "expected {} values, found {}",
                attributes.len(),
                cells.len()
            )));
        }
        cells
            .iter()
            .zip(attributes)
            .map(|(cell, attr)| parse_value(attr, cell))
            .collect()
    }
}
