use serde::{Deserialize, Serialize};

use crate::entanglement::entropy_derivative;
use crate::error::{Error, Result};
use crate::model::ModelPoint;

/// Points in the coarse scan that seeds the golden-section search.
pub const COARSE_POINTS: usize = 32;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Location of the maximum of dE_v/dλ on a ring of `n` sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaMResult {
    pub n: usize,
    pub lambda_m: f64,
    pub derivative_at_max: f64,
    /// Width of the final golden-section bracket.
    pub bracket_width: f64,
    pub evaluations: usize,
}

/// `1e-3 · N^{-3/2}`
pub fn default_tol(n: usize) -> f64 {
    1e-3 * (n as f64).powf(-1.5)
}

pub fn locate_lambda_m(n: usize) -> Result<LambdaMResult> {
    locate_lambda_m_with(n, default_tol(n))
}

/// Coarse scan of [`COARSE_POINTS`] on `[max(0.5, 1 − 10/N), 1]`, then golden-section
/// refinement around the best scan point down to a bracket of width `tol`.
pub fn locate_lambda_m_with(n: usize, tol: f64) -> Result<LambdaMResult> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!("λ_m search needs N ≥ 8, got {n}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let lo = (1.0 - 10.0 / n as f64).max(0.5);
    let hi = 1.0;
    match search(n, lo, hi, tol)? {
        Outcome::Interior(r) => Ok(r),
        Outcome::Boundary { at_low } => {
            let width = hi - lo;
            let (lo2, hi2) = if at_low {
                ((lo - width).max(0.5), hi)
            } else {
                (lo, hi + width)
            };
            match search(n, lo2, hi2, tol)? {
                Outcome::Interior(r) => Ok(r),
                Outcome::Boundary { .. } => Err(Error::Search(format!(
                    "maximum of dE/dλ for N = {n} stays on the boundary of [{lo2}, {hi2}]"
                ))),
            }
        }
    }
}

enum Outcome {
    Interior(LambdaMResult),
    Boundary { at_low: bool },
}

fn search(n: usize, lo: f64, hi: f64, tol: f64) -> Result<Outcome> {
    let mut evaluations = 0;
    let mut f = |l: f64| -> Result<f64> {
        evaluations += 1;
        entropy_derivative(&ModelPoint::finite(l, n)?)
    };

    let step = (hi - lo) / (COARSE_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..COARSE_POINTS).map(|k| lo + step * k as f64).collect();
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (k, &l) in grid.iter().enumerate() {
        let v = f(l)?;
        if v > best_val {
            best_val = v;
            best = k;
        }
    }
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(COARSE_POINTS - 1)];

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let (lambda_m, derivative_at_max) = if fc >= fd { (c, fc) } else { (d, fd) };
    let width = b - a;
    if lambda_m - lo <= width {
        return Ok(Outcome::Boundary { at_low: true });
    }
    if hi - lambda_m <= width {
        return Ok(Outcome::Boundary { at_low: false });
    }
    Ok(Outcome::Interior(LambdaMResult {
        n,
        lambda_m,
        derivative_at_max,
        bracket_width: width,
        evaluations,
    }))
}
