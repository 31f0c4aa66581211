//! Consequent-matrix training: accelerated proximal gradient descent with
//! soft thresholding on the regression + L1 + label-correlation objective,
//! initialized from a ridge solution.

mod spectral;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use spectral::{largest_eigenvalue, SpectralEstimate};

/// Internal tolerances for the power iterations that bound the step size.
const POWER_TOL: f64 = 1e-6;
const POWER_MAX_ITER: usize = 1000;

/// Step sizes are capped via 1/L_f; floor L_f so a zero design matrix cannot
/// produce an infinite step.
const LIPSCHITZ_FLOOR: f64 = 1e-12;

/// Hyperparameters and iteration controls for a full training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Number of fuzzy rules K.
    pub rules: usize,
    /// Width scale applied to the membership-weighted spreads.
    pub h: f64,
    /// Correlation-penalty weight.
    pub alpha: f64,
    /// L1 weight.
    pub beta: f64,
    /// Ridge weight for the initial solution.
    pub gamma: f64,
    /// Decision threshold on raw scores.
    pub tau: f64,
    /// FCM fuzzifier m.
    pub fuzzifier: f64,
    pub fcm_tol: f64,
    pub fcm_max_iter: usize,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            rules: 3,
            h: 1.0,
            alpha: 1.0,
            beta: 0.1,
            gamma: 1.0,
            tau: 0.5,
            fuzzifier: 2.0,
            fcm_tol: 1e-5,
            fcm_max_iter: 100,
            solver_tol: 1e-6,
            solver_max_iter: 500,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rules == 0 {
            return Err(Error::validation("rule count must be at least 1"));
        }
        if !(self.h > 0.0) {
            return Err(Error::validation(format!("h must be positive, got {}", self.h)));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(v >= 0.0) {
                return Err(Error::validation(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::validation(format!(
                "tau must lie in (0, 1), got {}",
                self.tau
            )));
        }
        if !(self.fuzzifier > 1.0) {
            return Err(Error::validation(format!(
                "fuzzifier must exceed 1, got {}",
                self.fuzzifier
            )));
        }
        if self.solver_max_iter == 0 || self.fcm_max_iter == 0 {
            return Err(Error::validation("iteration caps must be at least 1"));
        }
        if !(self.solver_tol >= 0.0) || !(self.fcm_tol >= 0.0) {
            return Err(Error::validation("tolerances must be nonnegative"));
        }
        Ok(())
    }
}

/// Iteration record returned alongside the solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    /// Objective value at the initial point, then after each iteration.
    pub objective_trace: Vec<f64>,
    /// Relative objective change per iteration,
    /// `|obj_t - obj_{t-1}| / max(1, |obj_{t-1}|)`; the convergence criterion.
    pub df_trace: Vec<f64>,
    /// Recorded momentum sequence `b_0, b_1, ...`.
    pub momentum_trace: Vec<f64>,
    /// Step-size bound L_f actually used.
    pub lipschitz: f64,
    /// False when a power iteration hit its cap; the bound is then approximate.
    pub lipschitz_converged: bool,
    pub iterations: usize,
    /// Iteration whose iterate was returned (0 = the initial ridge solution).
    pub best_iteration: usize,
}

fn check_shapes(
    p: &DMatrix<f64>,
    g: &DMatrix<f64>,
    y: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<()> {
    let rows = g.nrows();
    let l = y.nrows();
    if p.nrows() != rows || p.ncols() != l {
        return Err(Error::validation(format!(
            "consequent matrix is {}x{}, expected {rows}x{l}",
            p.nrows(),
            p.ncols()
        )));
    }
    if g.ncols() != y.ncols() {
        return Err(Error::validation(format!(
            "design matrix has {} instances, labels have {}",
            g.ncols(),
            y.ncols()
        )));
    }
    if r.nrows() != l || r.ncols() != l {
        return Err(Error::validation(format!(
            "correlation matrix is {}x{}, expected {l}x{l}",
            r.nrows(),
            r.ncols()
        )));
    }
    Ok(())
}

/// Full objective:
/// `0.5 ||P^T G - Y||_F^2 + beta ||P||_1 + (alpha/2) Tr(R P^T P)`.
pub fn objective(
    p: &DMatrix<f64>,
    g: &DMatrix<f64>,
    y: &DMatrix<f64>,
    r: &DMatrix<f64>,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    check_shapes(p, g, y, r)?;
    let residual = p.transpose() * g - y;
    let fit = 0.5 * residual.norm_squared();
    let l1 = p.iter().map(|v| v.abs()).sum::<f64>();
    let corr = if alpha == 0.0 {
        0.0
    } else {
        let ptp = p.transpose() * p;
        let l = r.nrows();
        let mut trace = 0.0;
        for i in 0..l {
            for j in 0..l {
                trace += r[(i, j)] * ptp[(j, i)];
            }
        }
        0.5 * alpha * trace
    };
    Ok(fit + beta * l1 + corr)
}

/// Gradient of the smooth part: `G G^T P - G Y^T + alpha P R`.
pub fn grad_smooth(
    p: &DMatrix<f64>,
    g: &DMatrix<f64>,
    y: &DMatrix<f64>,
    r: &DMatrix<f64>,
    alpha: f64,
) -> Result<DMatrix<f64>> {
    check_shapes(p, g, y, r)?;
    let mut grad = g * (g.transpose() * p) - g * y.transpose();
    if alpha != 0.0 {
        grad += (p * r) * alpha;
    }
    Ok(grad)
}

/// Step-size bound `L_f = lambda_max(G G^T) + alpha * max(lambda_max(R), 0)`,
/// with both leading eigenvalues obtained by power iteration.
///
/// A negative leading eigenvalue of R is floored at zero: an indefinite
/// penalty must not enlarge the step.
pub fn lipschitz(
    g: &DMatrix<f64>,
    r: &DMatrix<f64>,
    alpha: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<SpectralEstimate> {
    if !(alpha >= 0.0) {
        return Err(Error::validation(format!(
            "alpha must be nonnegative, got {alpha}"
        )));
    }
    let gram = g * g.transpose();
    lipschitz_with_gram(&gram, r, alpha, tol, max_iter, seed)
}

fn lipschitz_with_gram(
    gram: &DMatrix<f64>,
    r: &DMatrix<f64>,
    alpha: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<SpectralEstimate> {
    let top = largest_eigenvalue(gram, tol, max_iter, seed);
    let mut value = top.value.max(0.0);
    let mut converged = top.converged;
    if alpha > 0.0 {
        let top_r = largest_eigenvalue(r, tol, max_iter, seed.wrapping_add(0x9e37_79b9));
        value += alpha * top_r.value.max(0.0);
        converged = converged && top_r.converged;
    }
    Ok(SpectralEstimate { value, converged })
}

/// Elementwise soft threshold: shrink toward zero by `theta`, clip to zero
/// inside `[-theta, theta]`.
pub fn soft_threshold(z: &DMatrix<f64>, theta: f64) -> DMatrix<f64> {
    assert!(theta >= 0.0, "threshold must be nonnegative, got {theta}");
    z.map(|v| {
        if v > theta {
            v - theta
        } else if v < -theta {
            v + theta
        } else {
            0.0
        }
    })
}

/// Ridge initialization `(G G^T + gamma I)^{-1} G Y^T` via a Cholesky solve.
pub fn init_p(g: &DMatrix<f64>, y: &DMatrix<f64>, gamma: f64) -> Result<DMatrix<f64>> {
    if !(gamma >= 0.0) {
        return Err(Error::validation(format!(
            "gamma must be nonnegative, got {gamma}"
        )));
    }
    if g.ncols() != y.ncols() {
        return Err(Error::validation(format!(
            "design matrix has {} instances, labels have {}",
            g.ncols(),
            y.ncols()
        )));
    }
    let gram = g * g.transpose();
    init_p_with_gram(&gram, &(g * y.transpose()), gamma)
}

fn init_p_with_gram(
    gram: &DMatrix<f64>,
    gy: &DMatrix<f64>,
    gamma: f64,
) -> Result<DMatrix<f64>> {
    let mut system = gram.clone();
    for i in 0..system.nrows() {
        system[(i, i)] += gamma;
    }
    let chol = system.cholesky().ok_or_else(|| {
        Error::numerical(
            "G G^T + gamma I is not positive definite; increase gamma".to_string(),
        )
    })?;
    Ok(chol.solve(gy))
}

/// Minimizes the objective over P with accelerated proximal gradient steps,
/// starting from the ridge solution.
pub fn fit(
    g: &DMatrix<f64>,
    y: &DMatrix<f64>,
    r: &DMatrix<f64>,
    config: &TrainConfig,
) -> Result<(DMatrix<f64>, SolverState)> {
    config.validate()?;
    let gram = g * g.transpose();
    let gy = g * y.transpose();
    let p_init = init_p_with_gram(&gram, &gy, config.gamma)?;
    fit_from(g, y, r, config, p_init, Some((gram, gy)))
}

/// `fit` with a caller-supplied starting point instead of the ridge solution.
pub fn fit_with_init(
    g: &DMatrix<f64>,
    y: &DMatrix<f64>,
    r: &DMatrix<f64>,
    config: &TrainConfig,
    p_init: DMatrix<f64>,
) -> Result<(DMatrix<f64>, SolverState)> {
    config.validate()?;
    fit_from(g, y, r, config, p_init, None)
}

fn fit_from(
    g: &DMatrix<f64>,
    y: &DMatrix<f64>,
    r: &DMatrix<f64>,
    config: &TrainConfig,
    p_init: DMatrix<f64>,
    precomputed: Option<(DMatrix<f64>, DMatrix<f64>)>,
) -> Result<(DMatrix<f64>, SolverState)> {
    check_shapes(&p_init, g, y, r)?;
    let (gram, gy) = match precomputed {
        Some(pair) => pair,
        None => (g * g.transpose(), g * y.transpose()),
    };
    let alpha = config.alpha;
    let beta = config.beta;
    let power_seed = config.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1);
    let step_bound = lipschitz_with_gram(&gram, r, alpha, POWER_TOL, POWER_MAX_ITER, power_seed)?;
    let lf = step_bound.value.max(LIPSCHITZ_FLOOR);

    // Both starting iterates equal the initial solution, and b_0 = b_1 = 1,
    // so the first extrapolation is a no-op.
    let mut p_prev = p_init.clone();
    let mut p_curr = p_init;
    let mut b_prev = 1.0f64;
    let mut b_curr = 1.0f64;

    let initial_obj = objective(&p_curr, g, y, r, alpha, beta)?;
    if !initial_obj.is_finite() {
        return Err(Error::Divergence { iteration: 0 });
    }
    let mut objective_trace = vec![initial_obj];
    let mut df_trace = Vec::new();
    let mut momentum_trace = vec![b_prev, b_curr];
    let mut best = p_curr.clone();
    let mut best_obj = initial_obj;
    let mut best_iteration = 0;
    let mut prev_obj = initial_obj;
    let mut iterations = 0;

    for t in 1..=config.solver_max_iter {
        iterations = t;
        let coeff = (b_prev - 1.0) / b_curr;
        let extrapolated = &p_curr + (&p_curr - &p_prev) * coeff;
        let mut grad = &gram * &extrapolated - &gy;
        if alpha != 0.0 {
            grad += (&extrapolated * r) * alpha;
        }
        let z = extrapolated - grad / lf;
        let p_next = soft_threshold(&z, beta / lf);
        let b_next = (1.0 + (4.0 * b_curr * b_curr + 1.0).sqrt()) / 2.0;

        let obj = objective(&p_next, g, y, r, alpha, beta)?;
        if !obj.is_finite() {
            return Err(Error::Divergence { iteration: t });
        }
        let df = (obj - prev_obj).abs() / prev_obj.abs().max(1.0);
        objective_trace.push(obj);
        df_trace.push(df);
        momentum_trace.push(b_next);
        if obj < best_obj {
            best_obj = obj;
            best = p_next.clone();
            best_iteration = t;
        }

        p_prev = p_curr;
        p_curr = p_next;
        b_prev = b_curr;
        b_curr = b_next;
        prev_obj = obj;

        if df < config.solver_tol {
            break;
        }
    }

    let state = SolverState {
        objective_trace,
        df_trace,
        momentum_trace,
        lipschitz: lf,
        lipschitz_converged: step_bound.converged,
        iterations,
        best_iteration,
    };
    Ok((best, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_instance(
        rng: &mut ChaCha12Rng,
        rows: usize,
        l: usize,
        n: usize,
    ) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let g = DMatrix::from_fn(rows, n, |_, _| rng.random_range(-1.0..1.0));
        let y = DMatrix::from_fn(l, n, |_, _| f64::from(rng.random_range(0..2)));
        let p = DMatrix::from_fn(rows, l, |_, _| rng.random_range(-1.0..1.0));
        let a = DMatrix::from_fn(l, l, |_, _| rng.random_range(-1.0..1.0));
        let r = (&a + a.transpose()) * 0.5;
        (g, y, p, r)
    }

    /// Naive scalar-loop objective, summing every term independently.
    fn objective_oracle(
        p: &DMatrix<f64>,
        g: &DMatrix<f64>,
        y: &DMatrix<f64>,
        r: &DMatrix<f64>,
        alpha: f64,
        beta: f64,
    ) -> f64 {
        let (rows, l) = p.shape();
        let n = g.ncols();
        let mut fit = 0.0;
        for lab in 0..l {
            for j in 0..n {
                let mut pred = 0.0;
                for i in 0..rows {
                    pred += p[(i, lab)] * g[(i, j)];
                }
                fit += (pred - y[(lab, j)]).powi(2);
            }
        }
        let mut l1 = 0.0;
        for v in p.iter() {
            l1 += v.abs();
        }
        let mut corr = 0.0;
        for i in 0..l {
            for j in 0..l {
                let mut dot = 0.0;
                for row in 0..rows {
                    dot += p[(row, i)] * p[(row, j)];
                }
                corr += r[(i, j)] * dot;
            }
        }
        0.5 * fit + beta * l1 + 0.5 * alpha * corr
    }

    #[test]
    fn objective_of_zero_is_half_label_norm() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let (g, y, _, r) = random_instance(&mut rng, 6, 3, 10);
        let p = DMatrix::zeros(6, 3);
        let obj = objective(&p, &g, &y, &r, 0.7, 0.3).unwrap();
        assert_abs_diff_eq!(obj, 0.5 * y.norm_squared(), epsilon = 1e-12);
    }

    #[test]
    fn objective_of_exact_fit_is_zero() {
        // Consistent square system: P = (G^T)^{-1} ... use G = I for exactness.
        let g = DMatrix::identity(4, 4);
        let y = DMatrix::from_fn(2, 4, |i, j| ((i + j) % 2) as f64);
        let p = y.transpose();
        let r = DMatrix::zeros(2, 2);
        let obj = objective(&p, &g, &y, &r, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(obj, 0.0, epsilon = 1e-24);
    }

    #[test]
    fn objective_matches_scalar_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        // K = 2, D = 3 -> 8 rows; L = 4; N = 20.
        let (g, y, p, r) = random_instance(&mut rng, 8, 4, 20);
        let ours = objective(&p, &g, &y, &r, 0.8, 0.25).unwrap();
        let oracle = objective_oracle(&p, &g, &y, &r, 0.8, 0.25);
        assert_abs_diff_eq!(ours, oracle, epsilon = 1e-10 * oracle.abs());
    }

    #[test]
    fn objective_rejects_shape_mismatch() {
        let g = DMatrix::zeros(4, 5);
        let y = DMatrix::zeros(2, 5);
        let r = DMatrix::zeros(2, 2);
        let p = DMatrix::zeros(3, 2);
        assert!(objective(&p, &g, &y, &r, 0.0, 0.0).is_err());
    }

    #[test]
    fn gradient_vanishes_at_least_squares_solution() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let (g, y, _, r) = random_instance(&mut rng, 5, 3, 12);
        let p_star = init_p(&g, &y, 0.0).unwrap();
        let grad = grad_smooth(&p_star, &g, &y, &r, 0.0).unwrap();
        assert!(grad.iter().all(|v| v.abs() < 1e-8), "max |grad| = {}", grad.amax());
    }

    #[test]
    fn gradient_at_zero_is_negative_gy() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let (g, y, _, r) = random_instance(&mut rng, 5, 3, 12);
        let p = DMatrix::zeros(5, 3);
        let grad = grad_smooth(&p, &g, &y, &r, 1.5).unwrap();
        let expected = -(&g * y.transpose());
        assert_abs_diff_eq!((grad - expected).amax(), 0.0, epsilon = 1e-12);
    }

    /// Central finite differences of the smooth part of the objective.
    fn grad_fd(
        p: &DMatrix<f64>,
        g: &DMatrix<f64>,
        y: &DMatrix<f64>,
        r: &DMatrix<f64>,
        alpha: f64,
        step: f64,
    ) -> DMatrix<f64> {
        let smooth = |p: &DMatrix<f64>| {
            let residual = p.transpose() * g - y;
            let mut corr = 0.0;
            let ptp = p.transpose() * p;
            for i in 0..r.nrows() {
                for j in 0..r.ncols() {
                    corr += r[(i, j)] * ptp[(j, i)];
                }
            }
            0.5 * residual.norm_squared() + 0.5 * alpha * corr
        };
        DMatrix::from_fn(p.nrows(), p.ncols(), |i, j| {
            let mut plus = p.clone();
            let mut minus = p.clone();
            plus[(i, j)] += step;
            minus[(i, j)] -= step;
            (smooth(&plus) - smooth(&minus)) / (2.0 * step)
        })
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for trial in 0..30 {
            let rows = rng.random_range(2..9);
            let l = rng.random_range(1..5);
            let n = rng.random_range(2..15);
            let (g, y, p, r) = random_instance(&mut rng, rows, l, n);
            let alpha = [0.0, 0.5, 10.0][trial % 3];
            let grad = grad_smooth(&p, &g, &y, &r, alpha).unwrap();
            let fd = grad_fd(&p, &g, &y, &r, alpha, 1e-6);
            let scale = grad.amax().max(1.0);
            let worst = (&grad - &fd).amax() / scale;
            assert!(worst < 1e-5, "trial {trial}: relative error {worst}");
        }
    }

    #[test]
    fn lipschitz_identity_design() {
        let g = DMatrix::identity(4, 4);
        let r = DMatrix::zeros(2, 2);
        let est = lipschitz(&g, &r, 0.0, 1e-8, 5000, 0).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn lipschitz_diagonal_design() {
        let g = dmatrix![3.0, 0.0; 0.0, 1.0];
        let r = DMatrix::zeros(2, 2);
        let est = lipschitz(&g, &r, 0.0, 1e-8, 5000, 0).unwrap();
        assert_abs_diff_eq!(est.value, 9.0, epsilon = 1e-5);
    }

    #[test]
    fn lipschitz_matches_dense_eigensolver() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        for trial in 0..10 {
            let g = DMatrix::from_fn(8, 12, |_, _| rng.random_range(-1.0..1.0));
            let a = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
            let r = (&a + a.transpose()) * 0.5;
            let est = lipschitz(&g, &r, 0.5, 1e-10, 50_000, trial).unwrap();
            let gram = &g * g.transpose();
            let top_gram = gram
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            let top_r = r
                .clone()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            let oracle = top_gram + 0.5 * top_r.max(0.0);
            assert_abs_diff_eq!(est.value, oracle, epsilon = 1e-6 * oracle);
        }
    }

    #[test]
    fn negative_r_eigenvalue_does_not_shrink_bound() {
        let g = DMatrix::identity(3, 3);
        // R = -I has lambda_max = -1; the bound must stay at lambda_max(GG^T).
        let r = DMatrix::identity(2, 2) * -1.0;
        let est = lipschitz(&g, &r, 10.0, 1e-8, 5000, 0).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn soft_threshold_branches() {
        let z = dmatrix![0.5, -0.5; 0.1, -0.2];
        let out = soft_threshold(&z, 0.2);
        assert_abs_diff_eq!(out[(0, 0)], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(out[(0, 1)], -0.3, epsilon = 1e-15);
        assert_eq!(out[(1, 0)], 0.0);
        assert_eq!(out[(1, 1)], 0.0);
    }

    #[test]
    fn soft_threshold_zero_is_identity() {
        let z = dmatrix![0.5, -1.5; 0.0, 2.0];
        assert_eq!(soft_threshold(&z, 0.0), z);
    }

    #[test]
    fn init_p_identity_cases() {
        let g = DMatrix::identity(3, 3);
        let y = DMatrix::from_fn(2, 3, |i, j| (i + j) as f64);
        let p0 = init_p(&g, &y, 0.0).unwrap();
        assert_abs_diff_eq!((p0 - y.transpose()).amax(), 0.0, epsilon = 1e-12);
        let p1 = init_p(&g, &y, 1.0).unwrap();
        assert_abs_diff_eq!((p1 - y.transpose() * 0.5).amax(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn init_p_residual_is_small() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let (g, y, _, _) = random_instance(&mut rng, 6, 3, 25);
        let gamma = 0.5;
        let p = init_p(&g, &y, gamma).unwrap();
        let gram = &g * g.transpose() + DMatrix::identity(6, 6) * gamma;
        let gy = &g * y.transpose();
        let residual = (&gram * &p - &gy).norm() / gy.norm();
        assert!(residual < 1e-10, "relative residual {residual}");
    }

    #[test]
    fn init_p_singular_without_gamma_errors() {
        // Rank-deficient design: duplicated rows.
        let g = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
        let y = DMatrix::from_element(1, 3, 1.0);
        let err = init_p(&g, &y, 0.0).unwrap_err();
        assert!(err.to_string().contains("gamma"));
        assert!(init_p(&g, &y, 0.1).is_ok());
    }

    fn plain_config() -> TrainConfig {
        TrainConfig {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.1,
            solver_tol: 1e-12,
            solver_max_iter: 2000,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn fit_matches_closed_form_least_squares() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for _ in 0..5 {
            let (g, y, _, _) = random_instance(&mut rng, 8, 4, 30);
            let r = DMatrix::zeros(4, 4);
            let (p, _) = fit(&g, &y, &r, &plain_config()).unwrap();
            let closed = init_p(&g, &y, 0.0).unwrap();
            let rel = (&p - &closed).norm() / closed.norm();
            assert!(rel < 1e-4, "relative error {rel}");
        }
    }

    #[test]
    fn zero_labels_give_zero_solution() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let g = DMatrix::from_fn(5, 12, |_, _| rng.random_range(-1.0..1.0));
        let y = DMatrix::zeros(3, 12);
        let a = DMatrix::from_fn(3, 3, |_, _| rng.random_range(0.0..2.0));
        let r = (&a + a.transpose()) * 0.5;
        let cfg = TrainConfig {
            gamma: 1.0,
            alpha: 0.5,
            beta: 0.1,
            ..TrainConfig::default()
        };
        let (p, _) = fit(&g, &y, &r, &cfg).unwrap();
        assert_eq!(p, DMatrix::zeros(5, 3));
    }

    #[test]
    fn dominant_threshold_from_zero_init_stays_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let g = DMatrix::from_fn(4, 10, |_, _| rng.random_range(-1.0..1.0));
        let y = DMatrix::from_fn(2, 10, |_, _| f64::from(rng.random_range(0..2)));
        let r = DMatrix::zeros(2, 2);
        let gy = &g * y.transpose();
        let beta = gy.amax() * 1.5;
        let cfg = TrainConfig {
            alpha: 0.0,
            beta,
            ..TrainConfig::default()
        };
        let (p, state) = fit_with_init(&g, &y, &r, &cfg, DMatrix::zeros(4, 2)).unwrap();
        assert_eq!(p, DMatrix::zeros(4, 2));
        assert_eq!(state.iterations, 1);
    }

    #[test]
    fn momentum_sequence_satisfies_recurrence() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let (g, y, _, r) = random_instance(&mut rng, 6, 3, 20);
        let cfg = TrainConfig {
            alpha: 0.3,
            beta: 0.05,
            solver_tol: 0.0,
            solver_max_iter: 60,
            ..TrainConfig::default()
        };
        let (_, state) = fit(&g, &y, &r, &cfg).unwrap();
        let b = &state.momentum_trace;
        assert_eq!(b[0], 1.0);
        assert_eq!(b[1], 1.0);
        for t in 1..b.len() - 1 {
            let lhs = b[t + 1] * b[t + 1] - b[t + 1];
            assert_abs_diff_eq!(lhs, b[t] * b[t], epsilon = 1e-9 * b[t].max(1.0).powi(2));
            assert!(b[t + 1] >= b[t]);
        }
    }

    #[test]
    fn sparsity_grows_with_beta() {
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let (g, y, _, _) = random_instance(&mut rng, 8, 3, 25);
        let r = DMatrix::zeros(3, 3);
        let mut previous_nonzeros = usize::MAX;
        for beta in [0.01, 0.1, 1.0, 10.0] {
            let cfg = TrainConfig {
                alpha: 0.0,
                beta,
                solver_tol: 1e-10,
                solver_max_iter: 2000,
                ..TrainConfig::default()
            };
            let (p, _) = fit(&g, &y, &r, &cfg).unwrap();
            let nonzeros = p.iter().filter(|v| **v != 0.0).count();
            assert!(
                nonzeros <= previous_nonzeros,
                "beta {beta}: {nonzeros} > {previous_nonzeros}"
            );
            previous_nonzeros = nonzeros;
        }
    }

    #[test]
    fn final_objective_not_above_initial_and_df_converges() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let (g, y, _, r) = random_instance(&mut rng, 10, 4, 30);
        let cfg = TrainConfig {
            alpha: 0.5,
            beta: 0.2,
            ..TrainConfig::default()
        };
        let (_, state) = fit(&g, &y, &r, &cfg).unwrap();
        let first = state.objective_trace[0];
        let last = *state.objective_trace.last().unwrap();
        assert!(last <= first + 1e-12);
        assert!(*state.df_trace.last().unwrap() < cfg.solver_tol);
        assert!(state.iterations < cfg.solver_max_iter);
    }

    #[test]
    fn fit_is_deterministic() {
        let mut rng = ChaCha12Rng::seed_from_u64(14);
        let (g, y, _, r) = random_instance(&mut rng, 6, 3, 18);
        let cfg = TrainConfig {
            alpha: 0.4,
            beta: 0.1,
            ..TrainConfig::default()
        };
        let (p1, s1) = fit(&g, &y, &r, &cfg).unwrap();
        let (p2, s2) = fit(&g, &y, &r, &cfg).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(s1, s2);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let bad = TrainConfig {
            tau: 1.0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            alpha: -0.1,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            rules: 0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
