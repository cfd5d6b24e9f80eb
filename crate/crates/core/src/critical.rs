//! Closed-form results at the critical coupling λ_c = 1.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::correlators::{momentum_grid, Parity};
use crate::entanglement::{entropy_derivative, von_neumann_entropy, RdmSpectrum};
use crate::error::Result;
use crate::model::{ModelPoint, LAMBDA_C};
use crate::summation::pairwise_sum;

/// Limiting two-site spectrum at λ = 1 for N → ∞:
/// `ε₁,₂ = 1/4 + 4/3π² ± √13/3π`, `ε₃,₄ = 1/4 − 4/3π² ± 1/3π`.
pub fn critical_spectrum_closed_form() -> RdmSpectrum {
    let base_plus = 0.25 + 4.0 / (3.0 * PI * PI);
    let base_minus = 0.25 - 4.0 / (3.0 * PI * PI);
    let r = 13f64.sqrt() / (3.0 * PI);
    let s = 1.0 / (3.0 * PI);
    RdmSpectrum {
        eps: [base_plus + r, base_plus - r, base_minus + s, base_minus - s],
    }
}

/// Amplitude `A₁` of `dE_v/dλ|_{λ=1} ≃ A₁ ln N`, in bits.
pub fn a1_constant() -> f64 {
    let p2 = 3.0 * PI * PI;
    let s13 = 13f64.sqrt();
    -((p2 + 4.0 * PI - 16.0) / (p2 - 4.0 * PI - 16.0)).log2() / (2.0 * PI)
        + 3.0 / (2.0 * s13 * PI) * ((p2 + 4.0 * s13 * PI + 16.0) / (p2 - 4.0 * s13 * PI + 16.0)).log2()
}

/// Amplitude of the logarithmic divergence of the nearest-neighbour concurrence derivative.
pub fn concurrence_log_constant() -> f64 {
    8.0 / (3.0 * PI * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalConstants {
    pub lambda_c: f64,
    pub a1: f64,
    pub eps_critical: RdmSpectrum,
    pub concurrence_log: f64,
    pub entropy_critical: f64,
}

pub fn critical_constants() -> CriticalConstants {
    let eps = critical_spectrum_closed_form();
    CriticalConstants {
        lambda_c: LAMBDA_C,
        a1: a1_constant(),
        eps_critical: eps,
        concurrence_log: concurrence_log_constant(),
        entropy_critical: von_neumann_entropy(&eps),
    }
}

/// `(1/N) Σ 1/|φ/2|` over the even-parity grid folded into `(−π, π]`; grows as `(2/π) ln N`.
pub fn critical_log_subsum(n: usize) -> Result<f64> {
    let grid = momentum_grid(n, Parity::Even)?;
    let [s] = pairwise_sum(n, &|m| {
        let phi = grid.phi(m);
        let folded = if phi > PI { phi - 2.0 * PI } else { phi };
        [2.0 / folded.abs()]
    });
    Ok(s / n as f64)
}

/// The explicit momentum-sum expression for `dE_v/dλ` at λ = 1, evaluated term by term
/// as published: four sums over the even-parity grid combined with the limiting
/// eigenvalues of [`critical_spectrum_closed_form`].
///
/// This is kept as a cross-check only. It does not reproduce the chain-rule derivative
/// (see [`compare_critical_derivative`]).
pub fn critical_derivative_sum(n: usize) -> Result<f64> {
    let grid = momentum_grid(n, Parity::Even)?;
    let sums = pairwise_sum(n, &|m| {
        let phi = grid.phi(m);
        let (s, c) = (0.5 * phi).sin_cos();
        let ratio = (c * c / s).abs();
        [
            ratio * phi.cos(),
            ratio,
            (2.0 * s * s).abs(),
            (4.0 * c * c * s).abs(),
        ]
    });
    let nf = n as f64;
    let s1 = sums[0] / nf;
    let s2 = sums[1] / nf;
    let s3 = sums[2] / nf;
    let s4 = sums[3];
    let [e1, e2, e3, e4] = critical_spectrum_closed_form().eps;
    let first = -0.5 * s1 * (e4 / e3).log2();
    let bracket = -s2 * s3 + s4 * s4 / (nf * nf);
    let second = bracket / (2.0 * (e1 - e2)) * (e2 / e1).log2();
    Ok(first + second)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalSumComparison {
    pub n: usize,
    pub explicit_sum: f64,
    pub chain_rule: f64,
    pub relative_discrepancy: f64,
}

/// [`critical_derivative_sum`] against the chain-rule [`entropy_derivative`] at λ = 1.
pub fn compare_critical_derivative(n: usize) -> Result<CriticalSumComparison> {
    let explicit_sum = critical_derivative_sum(n)?;
    let chain_rule = entropy_derivative(&ModelPoint::finite(LAMBDA_C, n)?)?;
    Ok(CriticalSumComparison {
        n,
        explicit_sum,
        chain_rule,
        relative_discrepancy: (explicit_sum - chain_rule) / chain_rule,
    })
}
