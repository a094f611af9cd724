//! Small dense linear-algebra utilities shared across the solver modules:
//! spectral norms by power iteration, symmetric-spectrum bounds, numerical
//! rank, nonnegative least squares and finite-difference gradient checks.

use nalgebra::{DMatrix, DVector};

use crate::error::SolverError;
use crate::Result;

/// Deterministic start vector for power iterations: entries decaying with the
/// index so it is never orthogonal to a coordinate-aligned eigenvector family.
fn power_seed(n: usize) -> DVector<f64> {
    let v = DVector::from_fn(n, |i, _| 1.0 + ((i % 13) as f64) * 0.073 + (i as f64) * 1e-4);
    let norm = v.norm();
    v / norm
}

/// Largest singular value of a linear operator given as matvec closures,
/// estimated by power iteration on `A'A`.
///
/// `n_cols` is the domain dimension. Deterministic (fixed seed vector).
pub fn operator_norm<F, G>(n_cols: usize, apply: F, apply_t: G) -> f64
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    if n_cols == 0 {
        return 0.0;
    }
    let mut v = power_seed(n_cols);
    let mut lambda = 0.0_f64;
    for _ in 0..500 {
        let w = apply_t(&apply(&v));
        let norm = w.norm();
        if norm <= f64::MIN_POSITIVE {
            return 0.0;
        }
        let next = w / norm;
        let step = (&next - &v).norm().min((&next + &v).norm());
        v = next;
        let prev = lambda;
        lambda = norm;
        if step < 1e-14 || (lambda - prev).abs() <= 1e-13 * lambda.max(1.0) {
            break;
        }
    }
    lambda.sqrt()
}

/// Spectral norm of a dense matrix.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    operator_norm(a.ncols(), |v| a * v, |v| a.tr_mul(v))
}

/// Smallest eigenvalue of a symmetric matrix.
///
/// Uses the full symmetric eigendecomposition for moderate sizes and a
/// Gershgorin bound with a shifted power-iteration fallback for large ones.
pub fn sym_min_eig(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "sym_min_eig expects a square matrix");
    if n == 0 {
        return 0.0;
    }
    if n <= 800 {
        let eig = a.clone().symmetric_eigenvalues();
        return eig.min();
    }
    // Gershgorin lower bound: cheap and often conclusive for diagonally
    // dominant matrices.
    let mut gersh = f64::INFINITY;
    for i in 0..n {
        let mut off = 0.0;
        for j in 0..n {
            if i != j {
                off += a[(i, j)].abs();
            }
        }
        gersh = gersh.min(a[(i, i)] - off);
    }
    if gersh >= 0.0 {
        return gersh;
    }
    // Shifted power iteration: lambda_min(A) = c - lambda_max(cI - A).
    let c = operator_norm(n, |v| a * v, |v| a.tr_mul(v));
    let shifted_max = operator_norm(n, |v| c * v - a * v, |v| c * v - a.tr_mul(v));
    c - shifted_max
}

/// Numerical rank: number of singular values above `tol * sigma_max`.
pub fn numerical_rank(a: &DMatrix<f64>, tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.max();
    if smax <= 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > tol * smax).count()
}

/// Check that a matrix is symmetric up to `tol` (absolute, entrywise).
pub fn is_symmetric(a: &DMatrix<f64>, tol: f64) -> bool {
    if a.nrows() != a.ncols() {
        return false;
    }
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            if (a[(i, j)] - a[(j, i)]).abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Nonnegative least squares `min ||A x - b||, x >= 0` by the active-set
/// method of Lawson and Hanson.
///
/// Returns the solution; intended for systems with at most a few hundred
/// columns. Larger systems should use [`nnls_operator`].
pub fn nnls_dense(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
    let n = a.ncols();
    let mut passive = vec![false; n];
    let mut x = DVector::zeros(n);
    let mut resid = b - a * &x;
    let max_outer = 3 * n + 30;

    for _ in 0..max_outer {
        let w = a.tr_mul(&resid);
        // Most-violating candidate among the active (zero) set.
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if !passive[j] && w[j] > tol {
                if best.map(|(_, v)| w[j] > v).unwrap_or(true) {
                    best = Some((j, w[j]));
                }
            }
        }
        let Some((enter, _)) = best else {
            return Ok(x);
        };
        passive[enter] = true;

        // Inner loop: least squares on the passive set, stepping back when a
        // passive coordinate would go negative.
        loop {
            let cols: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let ap = a.select_columns(cols.iter());
            let sol = ap
                .clone()
                .svd(true, true)
                .solve(b, 1e-14)
                .map_err(|e| SolverError::InvalidData(format!("nnls least-squares: {e}")))?;
            let negative = cols
                .iter()
                .enumerate()
                .filter(|&(k, _)| sol[k] <= 0.0)
                .collect::<Vec<_>>();
            if negative.is_empty() {
                x.fill(0.0);
                for (k, &j) in cols.iter().enumerate() {
                    x[j] = sol[k];
                }
                break;
            }
            // Interpolate between the current x and the unconstrained fit.
            let mut alpha = f64::INFINITY;
            for (k, &j) in cols.iter().enumerate() {
                if sol[k] <= 0.0 {
                    let step = x[j] / (x[j] - sol[k]);
                    alpha = alpha.min(step);
                }
            }
            for (k, &j) in cols.iter().enumerate() {
                x[j] += alpha * (sol[k] - x[j]);
            }
            for j in 0..n {
                if passive[j] && x[j] <= tol.max(1e-14) {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
        }
        resid = b - a * &x;
    }
    Err(SolverError::IterationLimit {
        op: "nnls_dense",
        max_iter: max_outer,
        residual: resid.norm(),
    })
}

/// Nonnegative least squares for an operator `A` given by matvec closures,
/// solved with accelerated projected gradient (FISTA with restart).
///
/// Stops when the projected-gradient norm drops below `tol`.
pub fn nnls_operator<F, G>(
    n_cols: usize,
    apply: F,
    apply_t: G,
    b: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    let lip = {
        let norm = operator_norm(n_cols, &apply, &apply_t);
        (norm * norm).max(1e-12)
    };
    let mut x = DVector::zeros(n_cols);
    let mut y = x.clone();
    let mut t_mom = 1.0_f64;
    let mut fx_prev = f64::INFINITY;
    for _ in 0..max_iter {
        let grad = apply_t(&(apply(&y) - b));
        let mut next = &y - &grad / lip;
        next.iter_mut().for_each(|v| *v = v.max(0.0));
        // Projected-gradient stationarity at the new point.
        let grad_new = apply_t(&(apply(&next) - b));
        let mut pg = 0.0_f64;
        for j in 0..n_cols {
            let step = (next[j] - grad_new[j] / lip).max(0.0) - next[j];
            pg = pg.max(step.abs() * lip);
        }
        let r = apply(&next) - b;
        let fx = 0.5 * r.norm_squared();
        if pg <= tol {
            return Ok(next);
        }
        // Function restart keeps the momentum honest.
        if fx > fx_prev {
            t_mom = 1.0;
            y = next.clone();
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_mom * t_mom).sqrt());
            y = &next + ((t_mom - 1.0) / t_next) * (&next - &x);
            t_mom = t_next;
        }
        fx_prev = fx;
        x = next;
    }
    Err(SolverError::IterationLimit {
        op: "nnls_operator",
        max_iter,
        residual: (apply(&x) - b).norm(),
    })
}

/// Central finite-difference gradient of a scalar function.
pub fn central_difference<F>(f: F, x: &DVector<f64>, h: f64) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> f64,
{
    let mut g = DVector::zeros(x.len());
    let mut xp = x.clone();
    for i in 0..x.len() {
        let xi = x[i];
        xp[i] = xi + h;
        let fp = f(&xp);
        xp[i] = xi - h;
        let fm = f(&xp);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Relative error `||a - b|| / max(1, ||b||)`.
pub fn relative_error(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spectral_norm_matches_svd() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, -0.5, 3.0, 0.0, 1.0]);
        let svd_max = a.clone().svd(false, false).singular_values.max();
        assert_relative_eq!(spectral_norm(&a), svd_max, max_relative = 1e-9);
    }

    #[test]
    fn zero_operator_has_zero_norm() {
        let a = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(spectral_norm(&a), 0.0);
    }

    #[test]
    fn min_eig_of_indefinite_matrix() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -3.0]);
        assert_relative_eq!(sym_min_eig(&a), -3.0, epsilon = 1e-12);
    }

    #[test]
    fn rank_of_outer_product_is_one() {
        let u = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let a = &u * u.transpose();
        assert_eq!(numerical_rank(&a, 1e-10), 1);
    }

    #[test]
    fn nnls_clamps_negative_component() {
        // min ||x - (-1, 2)||, x >= 0  ->  (0, 2)
        let a = DMatrix::identity(2, 2);
        let b = DVector::from_vec(vec![-1.0, 2.0]);
        let x = nnls_dense(&a, &b, 1e-12).unwrap();
        assert_relative_eq!(x[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(x[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn nnls_operator_agrees_with_dense() {
        let a = DMatrix::from_row_slice(3, 2, &[2.0, 0.5, -1.0, 1.5, 0.2, 0.7]);
        let b = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let xd = nnls_dense(&a, &b, 1e-12).unwrap();
        let xo = nnls_operator(2, |v| &a * v, |v| a.tr_mul(v), &b, 1e-11, 50_000).unwrap();
        assert_relative_eq!((xd - xo).norm(), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn central_difference_on_quadratic() {
        let f = |x: &DVector<f64>| 0.5 * x[0] * x[0] + 3.0 * x[0] * x[1];
        let x = DVector::from_vec(vec![0.7, -0.3]);
        let g = central_difference(f, &x, 1e-6);
        assert_relative_eq!(g[0], x[0] + 3.0 * x[1], epsilon = 1e-8);
        assert_relative_eq!(g[1], 3.0 * x[0], epsilon = 1e-8);
    }
}
