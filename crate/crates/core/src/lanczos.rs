//! Restarted Lanczos iteration for the lowest eigenpair of a real symmetric operator.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Matrix-free real symmetric operator.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    /// `y ← A·x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Krylov vectors kept per restart cycle.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Target for `‖A·x − θ·x‖`.
    pub residual_tol: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            krylov_dim: 40,
            max_restarts: 300,
            residual_tol: 1e-11,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    /// Matrix-vector products spent.
    pub iterations: usize,
    /// Difference between the two lowest Ritz values of the final cycle, when available.
    pub gap_estimate: Option<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Lowest eigenpair of `op`, starting the Krylov space from `start`.
///
/// Every cycle builds a fully reorthogonalized Krylov basis, takes the lowest Ritz
/// vector and restarts from it until the true residual drops below the tolerance.
/// The start vector fixes the result deterministically; the iteration never leaves
/// any invariant subspace that contains it.
pub fn lowest_eigenpair(op: &impl SymmetricOperator, start: &[f64], opts: &LanczosOptions) -> Result<Eigenpair> {
    let dim = op.dim();
    assert_eq!(start.len(), dim, "start vector has the wrong dimension");
    let mut v = start.to_vec();
    let nv = norm(&v);
    if nv == 0.0 {
        return Err(Error::InvalidArgument("Lanczos start vector is zero".into()));
    }
    v.iter_mut().for_each(|x| *x /= nv);

    let m = opts.krylov_dim.clamp(2, dim.max(2));
    let mut matvecs = 0;
    let mut w = vec![0.0; dim];
    let mut last_residual = f64::INFINITY;

    for _ in 0..opts.max_restarts {
        let mut basis: Vec<Vec<f64>> = vec![v.clone()];
        let mut alphas = Vec::with_capacity(m);
        let mut betas: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let alpha = dot(&basis[j], &w);
            alphas.push(alpha);
            // two passes of classical Gram–Schmidt against the whole basis
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    axpy(-c, b, &mut w);
                }
            }
            let beta = norm(&w);
            if j + 1 == m || beta <= 1e-13 * alpha.abs().max(1.0) {
                break;
            }
            betas.push(beta);
            basis.push(w.iter().map(|x| x / beta).collect());
        }

        let k = alphas.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let lo = order[0];
        let gap_estimate = order.get(1).map(|&i| eig.eigenvalues[i] - eig.eigenvalues[lo]);

        let mut x = vec![0.0; dim];
        for (i, b) in basis.iter().enumerate() {
            axpy(eig.eigenvectors[(i, lo)], b, &mut x);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|e| *e /= nx);

        op.apply(&x, &mut w);
        matvecs += 1;
        let theta = dot(&x, &w);
        axpy(-theta, &x, &mut w);
        let residual = norm(&w);
        last_residual = residual;
        if residual < opts.residual_tol {
            return Ok(Eigenpair {
                value: theta,
                vector: x,
                residual,
                iterations: matvecs,
                gap_estimate,
            });
        }
        v = x;
    }
    Err(Error::NonConvergence {
        what: "Lanczos ground state",
        iterations: matvecs,
        residual: last_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense(DMatrix<f64>);

    impl SymmetricOperator for Dense {
        fn dim(&self) -> usize {
            self.0.nrows()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            let xv = nalgebra::DVector::from_column_slice(x);
            y.copy_from_slice((&self.0 * xv).as_slice());
        }
    }

    #[test]
    fn path_graph_laplacian() {
        // Dirichlet Laplacian tridiag(-1, 2, -1): eigenvalues 2 − 2cos(kπ/(n+1))
        let n = 200;
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = 2.0;
            if i + 1 < n {
                a[(i, i + 1)] = -1.0;
                a[(i + 1, i)] = -1.0;
            }
        }
        let start: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64).collect();
        let opts = LanczosOptions {
            residual_tol: 1e-10,
            max_restarts: 5000,
            ..Default::default()
        };
        let e = lowest_eigenpair(&Dense(a), &start, &opts).unwrap();
        let want = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((e.value - want).abs() < 1e-12, "{} vs {want}", e.value);
        assert!(e.residual < 1e-10);
    }

    #[test]
    fn small_diagonal_hits_invariant_subspace() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 2.0, -1.0]));
        let e = lowest_eigenpair(&Dense(a), &[1.0, 1.0, 1.0, 1.0], &LanczosOptions::default()).unwrap();
        assert!((e.value + 1.0).abs() < 1e-14);
    }

    #[test]
    fn reports_non_convergence() {
        let n = 400;
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = 2.0;
            if i + 1 < n {
                a[(i, i + 1)] = -1.0;
                a[(i + 1, i)] = -1.0;
            }
        }
        let opts = LanczosOptions {
            krylov_dim: 3,
            max_restarts: 2,
            residual_tol: 1e-14,
        };
        let start = vec![1.0; n];
        assert!(matches!(
            lowest_eigenpair(&Dense(a), &start, &opts),
            Err(Error::NonConvergence { .. })
        ));
    }
}
