//! Per-feature z-scoring, fit on training data only.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::Dataset;

/// Stddev values below this floor are clamped to it, so constant features
/// map to all-zero columns instead of dividing by zero.
pub const STDDEV_FLOOR: f64 = 1e-12;

/// Per-feature mean and standard deviation (population form, denominator N).
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    mean: DVector<f64>,
    stddev: DVector<f64>,
}

impl Standardizer {
    pub fn new(mean: DVector<f64>, stddev: DVector<f64>) -> Result<Self> {
        if mean.len() != stddev.len() {
            return Err(Error::validation("mean/stddev length mismatch"));
        }
        if stddev.iter().any(|&s| !(s >= STDDEV_FLOOR)) {
            return Err(Error::validation(format!(
                "standardizer stddev below floor {STDDEV_FLOOR}"
            )));
        }
        Ok(Standardizer { mean, stddev })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn stddev(&self) -> &DVector<f64> {
        &self.stddev
    }

    pub fn num_features(&self) -> usize {
        self.mean.len()
    }

    /// Transforms a raw `D x N` feature matrix to z-scores.
    pub fn transform(&self, features: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if features.nrows() != self.num_features() {
            return Err(Error::validation(format!(
                "standardizer fit on {} features, input has {}",
                self.num_features(),
                features.nrows()
            )));
        }
        Ok(DMatrix::from_fn(features.nrows(), features.ncols(), |i, j| {
            (features[(i, j)] - self.mean[i]) / self.stddev[i]
        }))
    }

    /// Maps z-scores back to the original feature scale.
    pub fn inverse_transform(&self, features: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if features.nrows() != self.num_features() {
            return Err(Error::validation("inverse_transform dimension mismatch"));
        }
        Ok(DMatrix::from_fn(features.nrows(), features.ncols(), |i, j| {
            features[(i, j)] * self.stddev[i] + self.mean[i]
        }))
    }
}

/// Fits per-feature moments on a training dataset.
pub fn fit_standardizer(data: &Dataset) -> Standardizer {
    let x = data.features();
    let n = x.ncols() as f64;
    let mean = DVector::from_fn(x.nrows(), |i, _| x.row(i).sum() / n);
    let stddev = DVector::from_fn(x.nrows(), |i, _| {
        let var = x.row(i).iter().map(|&v| (v - mean[i]).powi(2)).sum::<f64>() / n;
        var.sqrt().max(STDDEV_FLOOR)
    });
    Standardizer { mean, stddev }
}

/// Applies a fitted standardizer to a dataset, leaving labels untouched.
pub fn apply_standardizer(std: &Standardizer, data: &Dataset) -> Result<Dataset> {
    data.with_features(std.transform(data.features())?)
}
