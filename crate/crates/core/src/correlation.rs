//! Label-correlation penalty matrix from Pearson correlation of label rows.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Pairwise label correlation: `C` holds Pearson coefficients, `R = 1 - C`
/// is the penalty matrix fed to the solver. Strongly correlated labels get a
/// small penalty coefficient, so their consequent vectors are allowed to
/// stay close.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    r: DMatrix<f64>,
    c: DMatrix<f64>,
}

impl CorrelationMatrix {
    /// The penalty matrix `R`, zero on the diagonal, entries in [0, 2].
    pub fn penalty(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// The Pearson coefficient matrix `C`, ones on the diagonal.
    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn num_labels(&self) -> usize {
        self.r.nrows()
    }
}

/// Pearson correlation coefficient of two equally long vectors.
///
/// A zero-variance input has no correlation evidence: the result is 0, except
/// that a vector against itself is 1.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::validation(format!(
            "pearson inputs have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::validation("pearson needs at least 2 observations"));
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - mean_a) * (y - mean_b);
        var_a += (x - mean_a).powi(2);
        var_b += (y - mean_b).powi(2);
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Ok(if a == b { 1.0 } else { 0.0 });
    }
    Ok((cov / (var_a * var_b).sqrt()).clamp(-1.0, 1.0))
}

/// Builds the correlation pair (C, R) from an `L x N` label matrix.
///
/// Only the upper triangle is computed; symmetry is exact by construction,
/// the diagonal of C is exactly 1 and of R exactly 0.
pub fn build_r(y: &DMatrix<f64>) -> Result<CorrelationMatrix> {
    let l = y.nrows();
    if l == 0 {
        return Err(Error::validation("label matrix has no rows"));
    }
    if y.ncols() < 2 {
        return Err(Error::validation(
            "label correlation needs at least 2 instances",
        ));
    }
    let rows: Vec<Vec<f64>> = (0..l).map(|i| y.row(i).iter().copied().collect()).collect();
    let mut c = DMatrix::zeros(l, l);
    for i in 0..l {
        c[(i, i)] = 1.0;
        for j in (i + 1)..l {
            let v = pearson(&rows[i], &rows[j])?;
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    let mut r = DMatrix::from_fn(l, l, |i, j| 1.0 - c[(i, j)]);
    for i in 0..l {
        r[(i, i)] = 0.0;
    }
    Ok(CorrelationMatrix { r, c })
}
