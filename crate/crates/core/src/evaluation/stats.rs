//! Friedman test and Bonferroni-Dunn critical difference over per-method,
//! per-dataset metric tables.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Per-method, per-dataset metric values with their per-dataset ranks
/// aggregated into average ranks. Rank 1 is the best method on a dataset;
/// ties share the averaged rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub methods: Vec<String>,
    pub datasets: Vec<String>,
    /// `M x k`: datasets down, methods across.
    pub scores: DMatrix<f64>,
    pub average_ranks: Vec<f64>,
}

impl RankTable {
    /// Method count k.
    pub fn num_methods(&self) -> usize {
        self.methods.len()
    }

    /// Dataset count M.
    pub fn num_datasets(&self) -> usize {
        self.datasets.len()
    }
}

/// Builds a rank table from raw metric values. `higher_is_better` selects the
/// ranking direction (true for average precision, false for the losses).
pub fn rank_table(
    methods: Vec<String>,
    datasets: Vec<String>,
    scores: DMatrix<f64>,
    higher_is_better: bool,
) -> Result<RankTable> {
    let k = methods.len();
    let m = datasets.len();
    if scores.shape() != (m, k) {
        return Err(Error::validation(format!(
            "score table is {}x{}, expected {m}x{k}",
            scores.nrows(),
            scores.ncols()
        )));
    }
    if k < 2 {
        return Err(Error::validation("need at least 2 methods to rank"));
    }
    if m == 0 {
        return Err(Error::validation("need at least 1 dataset to rank"));
    }
    let mut rank_sums = vec![0.0f64; k];
    for dataset in 0..m {
        let row: Vec<f64> = (0..k).map(|j| scores[(dataset, j)]).collect();
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation(format!(
                "non-finite metric value in dataset row {dataset}"
            )));
        }
        for (j, rank) in tied_ranks(&row, higher_is_better).into_iter().enumerate() {
            rank_sums[j] += rank;
        }
    }
    let average_ranks = rank_sums.into_iter().map(|s| s / m as f64).collect();
    Ok(RankTable {
        methods,
        datasets,
        scores,
        average_ranks,
    })
}

/// Fractional ranks of one dataset row, ties averaged.
fn tied_ranks(values: &[f64], higher_is_better: bool) -> Vec<f64> {
    let k = values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        let cmp = values[a].partial_cmp(&values[b]).unwrap();
        if higher_is_better {
            cmp.reverse()
        } else {
            cmp
        }
    });
    let mut ranks = vec![0.0; k];
    let mut i = 0;
    while i < k {
        let mut j = i;
        while j + 1 < k && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) tie; they share the averaged 1-based rank.
        let shared = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Friedman test outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct FriedmanResult {
    /// Rank-based chi-squared statistic.
    pub chi_squared: f64,
    /// The F-distributed variant (Iman-Davenport form). Infinite when the
    /// rankings are perfectly consistent across datasets.
    pub f_statistic: f64,
    /// True when every method ties on every dataset; both statistics are 0.
    pub degenerate: bool,
}

/// Computes the Friedman chi-squared and its F-distributed transformation
/// from a rank table. The comparison against a critical value is left to the
/// caller.
pub fn friedman_statistic(table: &RankTable) -> Result<FriedmanResult> {
    let k = table.num_methods();
    let m = table.num_datasets();
    if k < 2 || m < 2 {
        return Err(Error::validation(format!(
            "Friedman test needs k >= 2 methods and M >= 2 datasets (got k={k}, M={m})"
        )));
    }
    let kf = k as f64;
    let mf = m as f64;
    let sum_sq: f64 = table.average_ranks.iter().map(|r| r * r).sum();
    let chi = 12.0 * mf / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0).powi(2) / 4.0);
    let chi = chi.max(0.0);
    if chi == 0.0 {
        return Ok(FriedmanResult {
            chi_squared: 0.0,
            f_statistic: 0.0,
            degenerate: true,
        });
    }
    let denominator = mf * (kf - 1.0) - chi;
    let f = if denominator <= 0.0 {
        f64::INFINITY
    } else {
        (mf - 1.0) * chi / denominator
    };
    Ok(FriedmanResult {
        chi_squared: chi,
        f_statistic: f,
        degenerate: false,
    })
}

/// Bonferroni-Dunn critical difference `q_alpha * sqrt(k(k+1) / (6M))`.
pub fn bonferroni_dunn_cd(k: usize, m: usize, q_alpha: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::validation("critical difference needs k >= 2 methods"));
    }
    if m < 1 {
        return Err(Error::validation("critical difference needs M >= 1 datasets"));
    }
    if !(q_alpha > 0.0) {
        return Err(Error::validation(format!(
            "q_alpha must be positive, got {q_alpha}"
        )));
    }
    let kf = k as f64;
    Ok(q_alpha * (kf * (kf + 1.0) / (6.0 * m as f64)).sqrt())
}
