//! Wootters concurrence of the two-site state.
//!
//! For the X-shaped matrix the spin-flip spectrum reduces to
//! `C = 2·max(0, |z⁻| − √(w₁w₂), |z⁺| − √(u⁺u⁻))`.
//! The active branch of the max is tracked so the λ-derivative can use the matching
//! analytic expression.

use nalgebra::{Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::correlators::correlators_with_derivatives;
use crate::entanglement::{build_rdm, finite_difference, RdmElements};
use crate::error::{Error, Result};
use crate::model::ModelPoint;

/// Within this margin of a branch switch the derivative is taken numerically.
pub const BRANCH_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcurrenceBranch {
    /// `C = 0`.
    Separable,
    /// `|z⁻| − √(w₁w₂)`: coherence between ↑↑ and ↓↓ dominates.
    Parallel,
    /// `|z⁺| − √(u⁺u⁻)`: coherence between ↑↓ and ↓↑ dominates.
    AntiParallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceValue {
    pub value: f64,
    pub branch: ConcurrenceBranch,
    /// Distance between the active candidate and the runner-up.
    pub margin: f64,
}

pub fn concurrence_with_branch(r: &RdmElements) -> ConcurrenceValue {
    let mut candidates = [
        (0.0, ConcurrenceBranch::Separable),
        (r.z_minus.abs() - (r.w1 * r.w2).sqrt(), ConcurrenceBranch::Parallel),
        (r.z_plus.abs() - (r.u_plus * r.u_minus).sqrt(), ConcurrenceBranch::AntiParallel),
    ];
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (top, branch) = candidates[0];
    ConcurrenceValue {
        value: (2.0 * top).min(1.0),
        branch,
        margin: top - candidates[1].0,
    }
}

pub fn concurrence(r: &RdmElements) -> f64 {
    concurrence_with_branch(r).value
}

/// Concurrence from the general two-qubit formula: the square roots of the eigenvalues
/// of `√ρ ρ̃ √ρ` with `ρ̃ = (σʸ⊗σʸ) ρ* (σʸ⊗σʸ)`. Valid for any real density matrix.
pub fn wootters_concurrence(rho: &Matrix4<f64>) -> f64 {
    #[rustfmt::skip]
    let flip = Matrix4::new(
        0.0, 0.0, 0.0, -1.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
    );
    let eig = SymmetricEigen::new(*rho);
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let sqrt_rho = eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
    let tilde = flip * rho * flip;
    let m = sqrt_rho * tilde * sqrt_rho;
    let m = 0.5 * (m + m.transpose());
    let mut l: Vec<f64> = SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

/// dC/dλ at `point`.
pub fn concurrence_derivative(point: &ModelPoint) -> Result<f64> {
    let (c, d) = correlators_with_derivatives(point)?;
    let r = build_rdm(&c)?;
    let cv = concurrence_with_branch(&r);
    if cv.margin == 0.0 {
        return Err(Error::NonDifferentiable(*point));
    }
    if cv.margin < BRANCH_MARGIN {
        return finite_difference(point, |p| Ok(concurrence(&build_rdm(&crate::correlators::correlators(p)?)?)));
    }
    let dz_plus = 0.25 * (d.d_xx + d.d_yy);
    let dz_minus = 0.25 * (d.d_xx - d.d_yy);
    let dw = -0.25 * d.d_zz;
    let du_plus = 0.25 * (2.0 * d.d_sz + d.d_zz);
    let du_minus = 0.25 * (-2.0 * d.d_sz + d.d_zz);
    let half = match cv.branch {
        ConcurrenceBranch::Separable => 0.0,
        // w₁ = w₂ = w ≥ 0, so √(w₁w₂) = w
        ConcurrenceBranch::Parallel => r.z_minus.signum() * dz_minus - dw,
        ConcurrenceBranch::AntiParallel => {
            let g = (r.u_plus * r.u_minus).sqrt();
            if g == 0.0 {
                return finite_difference(point, |p| {
                    Ok(concurrence(&build_rdm(&crate::correlators::correlators(p)?)?))
                });
            }
            r.z_plus.signum() * dz_plus - (du_plus * r.u_minus + r.u_plus * du_minus) / (2.0 * g)
        }
    };
    Ok(2.0 * half)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::correlators::correlators;
    use crate::numdiff::richardson_central;

    fn conc_at(lambda: f64, n: usize) -> f64 {
        let c = correlators(&ModelPoint::finite(lambda, n).unwrap()).unwrap();
        concurrence(&build_rdm(&c).unwrap())
    }

    fn x_state(up: f64, um: f64, w: f64, zp: f64, zm: f64) -> RdmElements {
        RdmElements {
            u_plus: up,
            u_minus: um,
            w1: w,
            w2: w,
            z_plus: zp,
            z_minus: zm,
        }
    }

    #[test]
    fn limits() {
        assert_eq!(concurrence(&x_state(1.0, 0.0, 0.0, 0.0, 0.0)), 0.0);
        assert_eq!(concurrence(&x_state(0.25, 0.25, 0.25, 0.25, 0.25)), 0.0);
        // Bell state (|↑↑⟩ + |↓↓⟩)/√2
        let bell = x_state(0.5, 0.5, 0.0, 0.0, 0.5);
        assert!((concurrence(&bell) - 1.0).abs() < 1e-15);
        assert!((wootters_concurrence(&bell.to_matrix()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tfim_uses_parallel_branch() {
        let c = correlators(&ModelPoint::finite(1.0, 1000).unwrap()).unwrap();
        let v = concurrence_with_branch(&build_rdm(&c).unwrap());
        assert_eq!(v.branch, ConcurrenceBranch::Parallel);
        assert!(v.value > 0.0 && v.value < 1.0);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = ModelPoint::finite(0.5, 500).unwrap();
        let got = concurrence_derivative(&p).unwrap();
        let fd = richardson_central(|l| conc_at(l, 500), 0.5, 1e-6);
        assert!(((got - fd) / fd).abs() < 1e-6, "{got} vs {fd}");
    }

    #[test]
    fn derivative_near_zero_coupling() {
        let p = ModelPoint::finite(1e-4, 100).unwrap();
        let got = concurrence_derivative(&p).unwrap();
        let fd = richardson_central(|l| conc_at(l, 100), 1e-4, 1e-6);
        assert!(((got - fd) / fd).abs() < 1e-6, "{got} vs {fd}");
        assert!(got.is_finite() && got > 0.0);
    }

    #[test]
    fn zero_coupling_uses_one_sided_difference() {
        // all three candidates tie at the product state; the right derivative still exists
        let r = build_rdm(&correlators(&ModelPoint::finite(0.0, 20).unwrap()).unwrap()).unwrap();
        assert!(concurrence_with_branch(&r).margin < BRANCH_MARGIN);
        let at_zero = concurrence_derivative(&ModelPoint::finite(0.0, 20).unwrap()).unwrap();
        let nearby = concurrence_derivative(&ModelPoint::finite(1e-4, 20).unwrap()).unwrap();
        assert!((at_zero - nearby).abs() < 1e-3 * nearby.abs(), "{at_zero} vs {nearby}");
    }

    fn random_x_state() -> impl Strategy<Value = RdmElements> {
        (0.0..1.0_f64, 0.0..1.0_f64, 0.0..1.0_f64, -1.0..1.0_f64, -1.0..1.0_f64)
            .prop_map(|(a, b, w, p, m)| {
                let norm = a + b + 2.0 * w;
                let (a, b, w) = (a / norm, b / norm, w / norm);
                // coherences bounded by the PSD conditions of each 2×2 block
                x_state(a, b, w, p * w, m * (a * b).sqrt())
            })
            .prop_filter("well conditioned", |r| {
                SymmetricEigen::new(r.to_matrix()).eigenvalues.iter().all(|&v| v > 1e-6)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn closed_form_matches_generic_formula(r in random_x_state()) {
            let closed = concurrence(&r);
            let generic = wootters_concurrence(&r.to_matrix());
            // the generic route takes square roots of near-zero eigenvalues, costing a few digits
            prop_assert!((closed - generic).abs() < 1e-10, "{} vs {}", closed, generic);
            prop_assert!((0.0..=1.0).contains(&closed));
        }
    }
}
