//! Antecedent learning: Fuzzy C-Means clustering and the per-rule Gaussian
//! centers and widths derived from its memberships.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// Widths are clamped below at this fraction of the per-feature value range
/// (or of 1 when the range is zero), keeping them strictly positive when a
/// cluster collapses onto duplicate points.
pub const WIDTH_FLOOR_SCALE: f64 = 1e-6;

/// Output of a Fuzzy C-Means run.
#[derive(Debug, Clone, PartialEq)]
pub struct FcmResult {
    /// `N x K` memberships; each row sums to 1.
    pub memberships: DMatrix<f64>,
    /// `K x D` cluster centers.
    pub centers: DMatrix<f64>,
    /// Objective value after each iteration; non-increasing.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
}

/// Per-rule Gaussian membership parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AntecedentParams {
    centers: DMatrix<f64>, // K x D
    widths: DMatrix<f64>,  // K x D, strictly positive
    h: f64,
}

impl AntecedentParams {
    pub fn new(centers: DMatrix<f64>, widths: DMatrix<f64>, h: f64) -> Result<Self> {
        if centers.shape() != widths.shape() {
            return Err(Error::validation("centers/widths shape mismatch"));
        }
        if centers.nrows() == 0 || centers.ncols() == 0 {
            return Err(Error::validation("antecedent parameters are empty"));
        }
        if !(h > 0.0) {
            return Err(Error::validation(format!("h must be positive, got {h}")));
        }
        if widths.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::validation("every width must be strictly positive"));
        }
        Ok(AntecedentParams { centers, widths, h })
    }

    /// Rule count K.
    pub fn num_rules(&self) -> usize {
        self.centers.nrows()
    }

    /// Feature count D.
    pub fn num_features(&self) -> usize {
        self.centers.ncols()
    }

    pub fn centers(&self) -> &DMatrix<f64> {
        &self.centers
    }

    pub fn widths(&self) -> &DMatrix<f64> {
        &self.widths
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

/// Runs Fuzzy C-Means on `D x N` data with `k` clusters and fuzzifier `m`.
///
/// Memberships are initialized uniformly at random (row-normalized) from a
/// ChaCha12 generator seeded with `seed`, and the fixed-point iteration stops
/// when the objective changes by less than `tol` or after `max_iter` passes.
pub fn fcm_cluster(
    x: &DMatrix<f64>,
    k: usize,
    m: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<FcmResult> {
    let n = x.ncols();
    let d = x.nrows();
    if k == 0 {
        return Err(Error::validation("cluster count must be at least 1"));
    }
    if n < k {
        return Err(Error::validation(format!(
            "{n} instances cannot support {k} clusters"
        )));
    }
    if !(m > 1.0) {
        return Err(Error::validation(format!("fuzzifier m must exceed 1, got {m}")));
    }
    if max_iter == 0 {
        return Err(Error::validation("max_iter must be at least 1"));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut u = DMatrix::from_fn(n, k, |_, _| rng.random::<f64>());
    normalize_rows(&mut u);

    let mut centers = DMatrix::zeros(k, d);
    let mut trace = Vec::new();
    let mut prev_obj = f64::INFINITY;
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        update_centers(x, &u, m, &mut centers)?;
        let dist2 = squared_distances(x, &centers);
        update_memberships(&dist2, m, &mut u);
        let obj = objective(&dist2, &u, m);
        trace.push(obj);
        if (prev_obj - obj).abs() < tol {
            break;
        }
        prev_obj = obj;
    }

    Ok(FcmResult {
        memberships: u,
        centers,
        objective_trace: trace,
        iterations,
    })
}

fn normalize_rows(u: &mut DMatrix<f64>) {
    for j in 0..u.nrows() {
        let s: f64 = u.row(j).sum();
        for c in 0..u.ncols() {
            u[(j, c)] /= s;
        }
    }
}

fn update_centers(
    x: &DMatrix<f64>,
    u: &DMatrix<f64>,
    m: f64,
    centers: &mut DMatrix<f64>,
) -> Result<()> {
    let (n, k) = u.shape();
    let d = x.nrows();
    for c in 0..k {
        let mut weight_sum = 0.0;
        let mut acc = vec![0.0; d];
        for j in 0..n {
            let w = u[(j, c)].powf(m);
            weight_sum += w;
            for i in 0..d {
                acc[i] += w * x[(i, j)];
            }
        }
        if weight_sum == 0.0 {
            return Err(Error::numerical(format!(
                "cluster {c} has zero total membership"
            )));
        }
        for i in 0..d {
            centers[(c, i)] = acc[i] / weight_sum;
        }
    }
    Ok(())
}

/// `N x K` squared Euclidean distances from instances to centers.
fn squared_distances(x: &DMatrix<f64>, centers: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.ncols();
    let k = centers.nrows();
    let d = x.nrows();
    DMatrix::from_fn(n, k, |j, c| {
        (0..d).map(|i| (x[(i, j)] - centers[(c, i)]).powi(2)).sum()
    })
}

fn update_memberships(dist2: &DMatrix<f64>, m: f64, u: &mut DMatrix<f64>) {
    let (n, k) = dist2.shape();
    let exponent = 1.0 / (m - 1.0);
    for j in 0..n {
        // Crisp convention: a point on a center belongs fully to the first
        // such center.
        if let Some(hit) = (0..k).find(|&c| dist2[(j, c)] == 0.0) {
            for c in 0..k {
                u[(j, c)] = if c == hit { 1.0 } else { 0.0 };
            }
            continue;
        }
        for c in 0..k {
            let mut denom = 0.0;
            for c2 in 0..k {
                denom += (dist2[(j, c)] / dist2[(j, c2)]).powf(exponent);
            }
            u[(j, c)] = 1.0 / denom;
        }
    }
}

fn objective(dist2: &DMatrix<f64>, u: &DMatrix<f64>, m: f64) -> f64 {
    let (n, k) = dist2.shape();
    let mut obj = 0.0;
    for j in 0..n {
        for c in 0..k {
            obj += u[(j, c)].powf(m) * dist2[(j, c)];
        }
    }
    obj
}

/// Estimates rule centers and widths from final memberships:
/// center = membership-weighted feature mean, width = `h` times the
/// membership-weighted squared deviation, clamped to the width floor.
pub fn estimate_antecedents(
    x: &DMatrix<f64>,
    u: &DMatrix<f64>,
    h: f64,
) -> Result<AntecedentParams> {
    let (d, n) = x.shape();
    let k = u.ncols();
    if u.nrows() != n {
        return Err(Error::validation(format!(
            "memberships cover {} instances, data has {n}",
            u.nrows()
        )));
    }
    if !(h > 0.0) {
        return Err(Error::validation(format!("h must be positive, got {h}")));
    }
    for j in 0..n {
        let s: f64 = u.row(j).sum();
        if (s - 1.0).abs() > 1e-6 {
            return Err(Error::validation(format!(
                "membership row {j} sums to {s}, expected 1"
            )));
        }
    }

    let floors: Vec<f64> = (0..d)
        .map(|i| {
            let row = x.row(i);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &v in row.iter() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let range = hi - lo;
            WIDTH_FLOOR_SCALE * if range > 0.0 { range } else { 1.0 }
        })
        .collect();

    let mut centers = DMatrix::zeros(k, d);
    let mut widths = DMatrix::zeros(k, d);
    for c in 0..k {
        let total: f64 = (0..n).map(|j| u[(j, c)]).sum();
        if total <= 0.0 {
            return Err(Error::validation(format!(
                "cluster {c} has zero total membership; cannot estimate parameters"
            )));
        }
        for i in 0..d {
            let mean = (0..n).map(|j| u[(j, c)] * x[(i, j)]).sum::<f64>() / total;
            centers[(c, i)] = mean;
        }
        for i in 0..d {
            let spread =
                (0..n).map(|j| u[(j, c)] * (x[(i, j)] - centers[(c, i)]).powi(2)).sum::<f64>()
                    / total;
            widths[(c, i)] = (h * spread).max(floors[i]);
        }
    }
    AntecedentParams::new(centers, widths, h)
}
