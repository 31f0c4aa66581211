//! Multi-label dataset ingestion and split planning.
//!
//! A [`Dataset`] stores features column-per-instance (`D x N`) and binary
//! labels the same way (`L x N`), matching the layout the rule mapping and
//! solver operate on.

mod arff;
mod csv;
mod folds;
mod standardize;

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use arff::load_arff;
pub use csv::{load_csv, write_csv};
pub use folds::{make_folds, FoldPlan};
pub use standardize::{apply_standardizer, fit_standardizer, Standardizer, STDDEV_FLOOR};

/// A multi-label dataset: `D x N` real features and `L x N` binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: DMatrix<f64>,
    labels: DMatrix<f64>,
    feature_names: Vec<String>,
    label_names: Vec<String>,
}

impl Dataset {
    /// Validates shapes, label binarity, and feature finiteness.
    pub fn new(
        features: DMatrix<f64>,
        labels: DMatrix<f64>,
        feature_names: Vec<String>,
        label_names: Vec<String>,
    ) -> Result<Self> {
        if features.nrows() == 0 || labels.nrows() == 0 || features.ncols() == 0 {
            return Err(Error::validation(
                "dataset must have at least one feature, one label, and one instance",
            ));
        }
        if features.ncols() != labels.ncols() {
            return Err(Error::validation(format!(
                "feature matrix has {} instances but label matrix has {}",
                features.ncols(),
                labels.ncols()
            )));
        }
        if feature_names.len() != features.nrows() {
            return Err(Error::validation(format!(
                "{} feature names for {} features",
                feature_names.len(),
                features.nrows()
            )));
        }
        if label_names.len() != labels.nrows() {
            return Err(Error::validation(format!(
                "{} label names for {} labels",
                label_names.len(),
                labels.nrows()
            )));
        }
        for (i, v) in features.iter().enumerate() {
            if !v.is_finite() {
                let (r, c) = (i % features.nrows(), i / features.nrows());
                return Err(Error::validation(format!(
                    "non-finite feature value at feature {r}, instance {c}"
                )));
            }
        }
        for (i, v) in labels.iter().enumerate() {
            if *v != 0.0 && *v != 1.0 {
                let (r, c) = (i % labels.nrows(), i / labels.nrows());
                return Err(Error::validation(format!(
                    "label value {v} at label {r}, instance {c} is not 0 or 1"
                )));
            }
        }
        Ok(Dataset {
            features,
            labels,
            feature_names,
            label_names,
        })
    }

    /// Number of features D.
    pub fn num_features(&self) -> usize {
        self.features.nrows()
    }

    /// Number of labels L.
    pub fn num_labels(&self) -> usize {
        self.labels.nrows()
    }

    /// Number of instances N.
    pub fn num_instances(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &DMatrix<f64> {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    /// Sub-dataset restricted to the given instance columns, in order.
    pub fn select_instances(&self, indices: &[usize]) -> Result<Dataset> {
        if indices.is_empty() {
            return Err(Error::validation("instance selection is empty"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.num_instances()) {
            return Err(Error::validation(format!(
                "instance index {bad} out of range (N = {})",
                self.num_instances()
            )));
        }
        let features = self.features.select_columns(indices.iter());
        let labels = self.labels.select_columns(indices.iter());
        Dataset::new(
            features,
            labels,
            self.feature_names.clone(),
            self.label_names.clone(),
        )
    }

    /// Replaces the feature matrix, keeping labels and names. Shape must match.
    pub(crate) fn with_features(&self, features: DMatrix<f64>) -> Result<Dataset> {
        if features.shape() != self.features.shape() {
            return Err(Error::validation("replacement feature matrix shape mismatch"));
        }
        Dataset::new(
            features,
            self.labels.clone(),
            self.feature_names.clone(),
            self.label_names.clone(),
        )
    }

    /// Writes the descriptor sidecar: names, label count, and provenance path.
    pub fn write_descriptor(&self, path: &Path, source: &Path) -> Result<()> {
        let desc = DatasetDescriptor {
            feature_names: self.feature_names.clone(),
            label_names: self.label_names.clone(),
            label_count: self.num_labels(),
            instance_count: self.num_instances(),
            source: source.to_path_buf(),
        };
        let text = serde_json::to_string_pretty(&desc)
            .map_err(|e| Error::numerical(format!("descriptor serialization: {e}")))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Sidecar document describing a dataset export.
#[derive(Debug, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub feature_names: Vec<String>,
    pub label_names: Vec<String>,
    pub label_count: usize,
    pub instance_count: usize,
    pub source: PathBuf,
}
