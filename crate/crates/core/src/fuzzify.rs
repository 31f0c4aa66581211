//! Gaussian memberships, normalized firing strengths, and the rule-expanded
//! design matrix.
//!
//! Rule activations are products of up to D per-feature memberships, so they
//! are evaluated as sums of log-memberships and normalized with a max shift;
//! direct products underflow once D reaches the hundreds.

use nalgebra::DMatrix;

use crate::antecedent::AntecedentParams;
use crate::error::{Error, Result};

/// Rule-mapped design matrix `G` of shape `K(D+1) x N`.
///
/// Rows come in K contiguous blocks of D+1: block k holds
/// `firing_k(x) * [1, x_1, ..., x_D]` for each instance column. Because the
/// normalized firing strengths sum to 1, the bias rows (row 0 of every block)
/// of each column sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyDesignMatrix {
    g: DMatrix<f64>,
    rules: usize,
    features: usize,
}

impl FuzzyDesignMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn num_rules(&self) -> usize {
        self.rules
    }

    pub fn num_features(&self) -> usize {
        self.features
    }

    pub fn num_instances(&self) -> usize {
        self.g.ncols()
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.g
    }
}

/// Gaussian membership `exp(-(x - c)^2 / (2 delta^2))`.
pub fn membership(x: f64, c: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::validation(format!(
            "membership width must be positive, got {delta}"
        )));
    }
    Ok((-(x - c).powi(2) / (2.0 * delta * delta)).exp())
}

/// Normalized firing strengths of one instance over all K rules.
///
/// The output is nonnegative and sums to 1. If every rule underflows to a
/// log-activation of -inf (impossible after the width floor, but guarded),
/// the result falls back to the uniform vector.
pub fn firing_strengths(x: &[f64], params: &AntecedentParams) -> Vec<f64> {
    assert_eq!(
        x.len(),
        params.num_features(),
        "instance has {} features, antecedents expect {}",
        x.len(),
        params.num_features()
    );
    let k = params.num_rules();
    let mut log_act = vec![0.0f64; k];
    for r in 0..k {
        let mut s = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            let c = params.centers()[(r, i)];
            let delta = params.widths()[(r, i)];
            s -= (xi - c).powi(2) / (2.0 * delta * delta);
        }
        log_act[r] = s;
    }
    let max = log_act.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return vec![1.0 / k as f64; k];
    }
    let mut weights: Vec<f64> = log_act.iter().map(|&s| (s - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    weights
}

/// Maps raw instances (`D x N`) into the rule-expanded design matrix.
pub fn fuzzy_map(x: &DMatrix<f64>, params: &AntecedentParams) -> Result<FuzzyDesignMatrix> {
    let d = params.num_features();
    let k = params.num_rules();
    if x.nrows() != d {
        return Err(Error::validation(format!(
            "input has {} features, antecedents expect {d}",
            x.nrows()
        )));
    }
    let n = x.ncols();
    let mut g = DMatrix::zeros(k * (d + 1), n);
    let mut col = vec![0.0f64; d];
    for j in 0..n {
        for i in 0..d {
            col[i] = x[(i, j)];
        }
        let strengths = firing_strengths(&col, params);
        for (r, &w) in strengths.iter().enumerate() {
            let base = r * (d + 1);
            g[(base, j)] = w;
            for i in 0..d {
                g[(base + 1 + i, j)] = w * col[i];
            }
        }
    }
    Ok(FuzzyDesignMatrix {
        g,
        rules: k,
        features: d,
    })
}
