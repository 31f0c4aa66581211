//! Multi-label evaluation: the five ranking/bitwise metrics and the
//! rank-based statistical machinery for comparing methods.
//!
//! Score-based metrics depend on scores only through the label ranking of
//! each instance; ties are broken by ascending label index, which makes
//! every value deterministic.

mod stats;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use stats::{bonferroni_dunn_cd, friedman_statistic, rank_table, FriedmanResult, RankTable};

/// The five metrics plus the per-metric counts of instances their formulas
/// cannot score (empty label sets, and for ranking loss also full ones).
/// Hamming loss never skips.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub ap: f64,
    pub hl: f64,
    pub oe: f64,
    pub rl: f64,
    pub cv: f64,
    pub skipped: SkipCounts,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SkipCounts {
    pub ap: usize,
    pub oe: usize,
    pub rl: usize,
    pub cv: usize,
}

impl MetricsReport {
    /// Metric value by short name (ap, hl, oe, rl, cv).
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Ap => self.ap,
            Metric::Hl => self.hl,
            Metric::Oe => self.oe,
            Metric::Rl => self.rl,
            Metric::Cv => self.cv,
        }
    }
}

/// The metric a grid search optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Ap,
    Hl,
    Oe,
    Rl,
    Cv,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Ap, Metric::Hl, Metric::Oe, Metric::Rl, Metric::Cv];

    /// True when larger values are better (only average precision).
    pub fn higher_is_better(self) -> bool {
        matches!(self, Metric::Ap)
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ap => "ap",
            Metric::Hl => "hl",
            Metric::Oe => "oe",
            Metric::Rl => "rl",
            Metric::Cv => "cv",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ap" => Ok(Metric::Ap),
            "hl" => Ok(Metric::Hl),
            "oe" => Ok(Metric::Oe),
            "rl" => Ok(Metric::Rl),
            "cv" => Ok(Metric::Cv),
            other => Err(Error::validation(format!(
                "unknown metric '{other}' (expected ap, hl, oe, rl, or cv)"
            ))),
        }
    }
}

fn check_same_shape(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::validation(format!(
            "shape mismatch: {}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::validation("empty score/label matrices"));
    }
    Ok(())
}

fn check_binary(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::validation(format!("{what} matrix is not binary")));
    }
    Ok(())
}

/// Ranks one score column: rank 1 is the highest score, ties broken by
/// ascending label index. The result is a permutation of 1..=L.
pub fn rank_labels(scores: &[f64]) -> Vec<usize> {
    let l = scores.len();
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("scores must be finite")
            .then(a.cmp(&b))
    });
    let mut ranks = vec![0usize; l];
    for (position, &label) in order.iter().enumerate() {
        ranks[label] = position + 1;
    }
    ranks
}

fn relevant(truth: &DMatrix<f64>, j: usize) -> Vec<usize> {
    (0..truth.nrows()).filter(|&i| truth[(i, j)] == 1.0).collect()
}

/// Average precision: for each relevant label, the fraction of labels ranked
/// at or above it that are relevant, averaged over relevant labels and then
/// over instances with non-empty label sets.
pub fn average_precision(scores: &DMatrix<f64>, truth: &DMatrix<f64>) -> Result<f64> {
    check_same_shape(scores, truth)?;
    check_binary(truth, "truth")?;
    let n = scores.ncols();
    let mut total = 0.0;
    let mut counted = 0usize;
    for j in 0..n {
        let rel = relevant(truth, j);
        if rel.is_empty() {
            continue;
        }
        let ranks = rank_labels(scores.column(j).as_slice());
        let mut per_instance = 0.0;
        for &l in &rel {
            let above = rel.iter().filter(|&&l2| ranks[l2] <= ranks[l]).count();
            per_instance += above as f64 / ranks[l] as f64;
        }
        total += per_instance / rel.len() as f64;
        counted += 1;
    }
    Ok(if counted == 0 { 0.0 } else { total / counted as f64 })
}

/// Hamming loss: fraction of label bits predicted incorrectly.
pub fn hamming_loss(pred: &DMatrix<f64>, truth: &DMatrix<f64>) -> Result<f64> {
    check_same_shape(pred, truth)?;
    check_binary(pred, "prediction")?;
    check_binary(truth, "truth")?;
    let l = pred.nrows() as f64;
    let n = pred.ncols() as f64;
    let wrong = pred
        .iter()
        .zip(truth.iter())
        .filter(|(a, b)| a != b)
        .count() as f64;
    Ok(wrong / (l * n))
}

/// One error: fraction of instances whose top-ranked label is not relevant.
pub fn one_error(scores: &DMatrix<f64>, truth: &DMatrix<f64>) -> Result<f64> {
    check_same_shape(scores, truth)?;
    check_binary(truth, "truth")?;
    let mut errors = 0usize;
    let mut counted = 0usize;
    for j in 0..scores.ncols() {
        let rel = relevant(truth, j);
        if rel.is_empty() {
            continue;
        }
        let ranks = rank_labels(scores.column(j).as_slice());
        let top = ranks.iter().position(|&r| r == 1).unwrap();
        if truth[(top, j)] != 1.0 {
            errors += 1;
        }
        counted += 1;
    }
    Ok(if counted == 0 {
        0.0
    } else {
        errors as f64 / counted as f64
    })
}

/// Ranking loss: fraction of (relevant, irrelevant) label pairs whose scores
/// are ordered incorrectly (ties count as incorrect), averaged over instances
/// with both relevant and irrelevant labels.
pub fn ranking_loss(scores: &DMatrix<f64>, truth: &DMatrix<f64>) -> Result<f64> {
    check_same_shape(scores, truth)?;
    check_binary(truth, "truth")?;
    let l = scores.nrows();
    let mut total = 0.0;
    let mut counted = 0usize;
    for j in 0..scores.ncols() {
        let rel = relevant(truth, j);
        if rel.is_empty() || rel.len() == l {
            continue;
        }
        let irr: Vec<usize> = (0..l).filter(|&i| truth[(i, j)] == 0.0).collect();
        let mut bad = 0usize;
        for &a in &rel {
            for &b in &irr {
                if scores[(a, j)] <= scores[(b, j)] {
                    bad += 1;
                }
            }
        }
        total += bad as f64 / (rel.len() * irr.len()) as f64;
        counted += 1;
    }
    Ok(if counted == 0 { 0.0 } else { total / counted as f64 })
}

/// Coverage, normalized by the label count: how far down the ranking one must
/// go to collect every relevant label, as (worst relevant rank - 1) / L.
pub fn coverage(scores: &DMatrix<f64>, truth: &DMatrix<f64>) -> Result<f64> {
    check_same_shape(scores, truth)?;
    check_binary(truth, "truth")?;
    let l = scores.nrows() as f64;
    let mut total = 0.0;
    let mut counted = 0usize;
    for j in 0..scores.ncols() {
        let rel = relevant(truth, j);
        if rel.is_empty() {
            continue;
        }
        let ranks = rank_labels(scores.column(j).as_slice());
        let worst = rel.iter().map(|&i| ranks[i]).max().unwrap();
        total += (worst - 1) as f64 / l;
        counted += 1;
    }
    Ok(if counted == 0 { 0.0 } else { total / counted as f64 })
}

/// Evaluates all five metrics at once; predictions for hamming loss are made
/// by thresholding the scores at `tau`.
pub fn evaluate(scores: &DMatrix<f64>, truth: &DMatrix<f64>, tau: f64) -> Result<MetricsReport> {
    check_same_shape(scores, truth)?;
    check_binary(truth, "truth")?;
    let l = scores.nrows();
    let pred = crate::model::predict_labels(scores, tau);
    let mut skipped = SkipCounts::default();
    for j in 0..scores.ncols() {
        let rel = relevant(truth, j).len();
        if rel == 0 {
            skipped.ap += 1;
            skipped.oe += 1;
            skipped.cv += 1;
        }
        if rel == 0 || rel == l {
            skipped.rl += 1;
        }
    }
    Ok(MetricsReport {
        ap: average_precision(scores, truth)?,
        hl: hamming_loss(&pred, truth)?,
        oe: one_error(scores, truth)?,
        rl: ranking_loss(scores, truth)?,
        cv: coverage(scores, truth)?,
        skipped,
    })
}
