//! Leading-eigenvalue estimation by power iteration.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// A power-iteration estimate. `converged` is false when the relative change
/// of the Rayleigh quotient was still above tolerance at the iteration cap;
/// the value is then the last iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub converged: bool,
}

/// Largest (most positive) eigenvalue of a symmetric matrix.
///
/// Runs in two phases, both plain power iterations with a Rayleigh-quotient
/// stopping rule:
///
/// 1. the spectral radius rho is estimated on the square of the matrix
///    (applied as two products per step), which cannot stall even when the
///    extreme eigenvalues are +/- rho;
/// 2. the dominant eigenvalue of the shifted matrix `M + rho I` is estimated;
///    the shift makes the spectrum nonnegative, so the dominant eigenvalue is
///    `lambda_max + rho` and the sign ambiguity of phase 1 disappears.
pub fn largest_eigenvalue(
    m: &DMatrix<f64>,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> SpectralEstimate {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    if n == 0 {
        return SpectralEstimate {
            value: 0.0,
            converged: true,
        };
    }
    let radius = power_iterate(
        |v| {
            let t = m * v;
            m * t
        },
        n,
        tol,
        max_iter,
        seed,
    );
    let rho = radius.value.max(0.0).sqrt();
    if rho == 0.0 {
        return SpectralEstimate {
            value: 0.0,
            converged: radius.converged,
        };
    }
    let shifted = power_iterate(
        |v| m * v + v * rho,
        n,
        tol,
        max_iter,
        seed.wrapping_add(1),
    );
    SpectralEstimate {
        value: shifted.value - rho,
        converged: radius.converged && shifted.converged,
    }
}

/// Power iteration on a linear operator with a nonnegative spectrum; returns
/// the Rayleigh quotient once its relative change falls below `tol`.
fn power_iterate(
    apply: impl Fn(&DVector<f64>) -> DVector<f64>,
    n: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> SpectralEstimate {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let norm = v.norm();
    v /= norm;
    let mut previous = f64::INFINITY;
    let mut last = 0.0;
    for _ in 0..max_iter {
        let w = apply(&v);
        let w_norm = w.norm();
        if w_norm == 0.0 {
            // v lies in the null space; with a nonnegative spectrum the
            // dominant eigenvalue along this start is 0.
            return SpectralEstimate {
                value: 0.0,
                converged: true,
            };
        }
        let rayleigh = v.dot(&w);
        v = w / w_norm;
        last = rayleigh;
        if (rayleigh - previous).abs() <= tol * rayleigh.abs().max(f64::MIN_POSITIVE) {
            return SpectralEstimate {
                value: rayleigh,
                converged: true,
            };
        }
        previous = rayleigh;
    }
    SpectralEstimate {
        value: last,
        converged: false,
    }
}
