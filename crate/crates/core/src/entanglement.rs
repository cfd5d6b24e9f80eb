//! Two-site reduced density matrix, its spectrum and the von Neumann entropy.
//!
//! Parity conservation fixes the reduced state of sites (0, 1) to the X shape
//!
//! ```text
//!        ↑↑   ↑↓   ↓↑   ↓↓
//! ↑↑ [  u⁺   0    0    z⁻ ]
//! ↑↓ [  0    w₁   z⁺   0  ]
//! ↓↑ [  0    z⁺   w₂   0  ]
//! ↓↓ [  z⁻   0    0    u⁻ ]
//! ```
//!
//! whose entries are linear in the four correlators.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::concurrence;
use crate::correlators::{correlators, correlators_with_derivatives, CorrelatorDerivatives, CorrelatorSet};
use crate::error::{Error, Result};
use crate::model::ModelPoint;
use crate::numdiff::{try_richardson_central, try_richardson_forward};

/// Eigenvalues in `[−CLAMP_TOL, 0)` are rounding noise and are set to zero.
pub const CLAMP_TOL: f64 = 1e-12;

/// Anything below this is treated as an inconsistent set of correlators.
pub const NONPHYSICAL_TOL: f64 = 1e-9;

/// Below this smallest eigenvalue the chain rule gives way to finite differences.
pub const ANALYTIC_EIGENVALUE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdmElements {
    pub u_plus: f64,
    pub u_minus: f64,
    pub w1: f64,
    pub w2: f64,
    pub z_plus: f64,
    pub z_minus: f64,
}

impl RdmElements {
    /// The full 4×4 matrix in the basis {↑↑, ↑↓, ↓↑, ↓↓}.
    pub fn to_matrix(&self) -> Matrix4<f64> {
        Matrix4::new(
            self.u_plus, 0.0, 0.0, self.z_minus,
            0.0, self.w1, self.z_plus, 0.0,
            0.0, self.z_plus, self.w2, 0.0,
            self.z_minus, 0.0, 0.0, self.u_minus,
        )
    }

    pub fn trace(&self) -> f64 {
        self.u_plus + self.u_minus + self.w1 + self.w2
    }
}

/// Eigenvalues of the two-site state, grouped as `(ε₁, ε₂)` from the ↑↑/↓↓ block and
/// `(ε₃, ε₄)` from the ↑↓/↓↑ block. Not globally sorted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdmSpectrum {
    pub eps: [f64; 4],
}

impl RdmSpectrum {
    pub fn sum(&self) -> f64 {
        self.eps.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.eps.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Eigenvalues in ascending order.
    pub fn sorted(&self) -> [f64; 4] {
        let mut e = self.eps;
        e.sort_by(f64::total_cmp);
        e
    }
}

fn clamp_entry(x: f64) -> f64 {
    if (-CLAMP_TOL..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// Unclamped closed-form eigenvalues.
fn raw_spectrum(c: &CorrelatorSet) -> [f64; 4] {
    let a = 1.0 + c.zz;
    let b = 1.0 - c.zz;
    let r = (4.0 * c.sz * c.sz + (c.xx - c.yy) * (c.xx - c.yy)).sqrt();
    let s = c.xx + c.yy;
    [0.25 * (a + r), 0.25 * (a - r), 0.25 * (b + s), 0.25 * (b - s)]
}

fn check_physical(eps: &[f64; 4]) -> Result<()> {
    let min = eps.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -NONPHYSICAL_TOL || min.is_nan() {
        return Err(Error::NonPhysical { eigenvalue: min });
    }
    Ok(())
}

/// Reduced density matrix of two neighbouring spins.
pub fn build_rdm(c: &CorrelatorSet) -> Result<RdmElements> {
    check_physical(&raw_spectrum(c))?;
    let w = clamp_entry(0.25 * (1.0 - c.zz));
    Ok(RdmElements {
        u_plus: clamp_entry(0.25 * (1.0 + 2.0 * c.sz + c.zz)),
        u_minus: clamp_entry(0.25 * (1.0 - 2.0 * c.sz + c.zz)),
        w1: w,
        w2: w,
        z_plus: 0.25 * (c.xx + c.yy),
        z_minus: 0.25 * (c.xx - c.yy),
    })
}

/// Closed-form spectrum of the two-site reduced density matrix.
pub fn rdm_spectrum(c: &CorrelatorSet) -> Result<RdmSpectrum> {
    let raw = raw_spectrum(c);
    check_physical(&raw)?;
    Ok(RdmSpectrum {
        eps: raw.map(|e| e.clamp(0.0, 1.0)),
    })
}

/// `−Σ ε log₂ ε` in bits, with `0·log 0 = 0`.
pub fn von_neumann_entropy(s: &RdmSpectrum) -> f64 {
    s.eps
        .iter()
        .filter(|&&e| e > 0.0)
        .map(|&e| -e * e.log2())
        .sum()
}

/// Two-site entanglement `E_v` at `point`.
pub fn entropy(point: &ModelPoint) -> Result<f64> {
    Ok(von_neumann_entropy(&rdm_spectrum(&correlators(point)?)?))
}

/// dε_i/dλ from differentiating the closed-form spectrum.
pub fn spectrum_derivative(c: &CorrelatorSet, d: &CorrelatorDerivatives) -> [f64; 4] {
    let r = (4.0 * c.sz * c.sz + (c.xx - c.yy) * (c.xx - c.yy)).sqrt();
    let dr = (4.0 * c.sz * d.d_sz + (c.xx - c.yy) * (d.d_xx - d.d_yy)) / r;
    let ds = d.d_xx + d.d_yy;
    [
        0.25 * (d.d_zz + dr),
        0.25 * (d.d_zz - dr),
        0.25 * (-d.d_zz + ds),
        0.25 * (-d.d_zz - ds),
    ]
}

/// Both algebraic assemblies of dE_v/dλ from the same spectrum and derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyDerivativeForms {
    /// Grouped into the three log-ratio terms log₂(ε₄/ε₃), log₂(ε₃/ε₁), log₂(ε₂/ε₁).
    pub log_ratio: f64,
    /// `−Σ (1 + ln ε_i) dε_i / ln 2`.
    pub log_sum: f64,
}

pub fn entropy_derivative_forms(eps: &[f64; 4], deps: &[f64; 4]) -> EntropyDerivativeForms {
    let [e1, e2, e3, e4] = *eps;
    let [_, d2, d3, d4] = *deps;
    let log_ratio = -(e4 / e3).log2() * d4 - (e3 / e1).log2() * (d3 + d4) - (e2 / e1).log2() * d2;
    let log_sum = -eps
        .iter()
        .zip(deps)
        .map(|(e, d)| (1.0 + e.ln()) * d)
        .sum::<f64>()
        / std::f64::consts::LN_2;
    EntropyDerivativeForms { log_ratio, log_sum }
}

/// How [`entropy_derivative`] obtained its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMethod {
    Analytic,
    FiniteDifference,
}

/// Step used by the finite-difference fallbacks.
pub fn fallback_step(lambda: f64) -> f64 {
    1e-6 * lambda.max(1.0)
}

/// Richardson derivative of `f(λ)` at `point`, one-sided when `λ` is too close to zero.
pub(crate) fn finite_difference(point: &ModelPoint, f: impl Fn(&ModelPoint) -> Result<f64>) -> Result<f64> {
    let lambda = point.lambda();
    let h = fallback_step(lambda);
    let g = |l: f64| f(&point.with_lambda(l)?);
    if lambda < 2.0 * h {
        try_richardson_forward(g, lambda, h)
    } else {
        try_richardson_central(g, lambda, h)
    }
}

/// dE_v/dλ together with the route taken.
pub fn entropy_derivative_with_method(point: &ModelPoint) -> Result<(f64, DerivativeMethod)> {
    let (c, d) = correlators_with_derivatives(point)?;
    let eps = rdm_spectrum(&c)?;
    let r2 = 4.0 * c.sz * c.sz + (c.xx - c.yy) * (c.xx - c.yy);
    if eps.min() > ANALYTIC_EIGENVALUE_FLOOR && r2 > 0.0 {
        let deps = spectrum_derivative(&c, &d);
        return Ok((entropy_derivative_forms(&eps.eps, &deps).log_ratio, DerivativeMethod::Analytic));
    }
    Ok((finite_difference(point, entropy)?, DerivativeMethod::FiniteDifference))
}

/// dE_v/dλ at `point`.
///
/// Fails with [`Error::Divergent`] in the thermodynamic limit within
/// [`DIVERGENCE_GUARD`](crate::correlators::DIVERGENCE_GUARD) of λ = 1.
pub fn entropy_derivative(point: &ModelPoint) -> Result<f64> {
    Ok(entropy_derivative_with_method(point)?.0)
}

/// One row of a λ-sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementSample {
    pub point: ModelPoint,
    pub ev: f64,
    pub d_ev: f64,
    pub conc: f64,
    pub d_conc: f64,
}

/// Entropy, concurrence and their derivatives at `point`.
pub fn sample(point: &ModelPoint) -> Result<EntanglementSample> {
    let c = correlators(point)?;
    let spectrum = rdm_spectrum(&c)?;
    let rdm = build_rdm(&c)?;
    Ok(EntanglementSample {
        point: *point,
        ev: von_neumann_entropy(&spectrum),
        d_ev: entropy_derivative(point)?,
        conc: concurrence::concurrence(&rdm),
        d_conc: concurrence::concurrence_derivative(point)?,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;

    use super::*;
    use crate::critical::critical_spectrum_closed_form;
    use crate::numdiff::richardson_central;

    fn fin(lambda: f64, n: usize) -> ModelPoint {
        ModelPoint::finite(lambda, n).unwrap()
    }

    fn eigensolver_spectrum(r: &RdmElements) -> [f64; 4] {
        let mut v: Vec<f64> = SymmetricEigen::new(r.to_matrix()).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        [v[0], v[1], v[2], v[3]]
    }

    #[test]
    fn product_state() {
        let c = CorrelatorSet::from_independent(1.0, 0.0, 0.0);
        let r = build_rdm(&c).unwrap();
        assert_eq!((r.u_plus, r.u_minus, r.w1, r.w2, r.z_plus, r.z_minus), (1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        let s = rdm_spectrum(&c).unwrap();
        assert_eq!(s.eps, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(von_neumann_entropy(&s), 0.0);
    }

    #[test]
    fn strong_coupling_limit() {
        let c = CorrelatorSet::from_independent(0.0, 1.0, 0.0);
        let r = build_rdm(&c).unwrap();
        for v in [r.u_plus, r.u_minus, r.w1, r.w2, r.z_plus, r.z_minus] {
            assert_eq!(v, 0.25);
        }
        let s = rdm_spectrum(&c).unwrap();
        assert_eq!(s.eps, [0.5, 0.0, 0.5, 0.0]);
        assert!((von_neumann_entropy(&s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn critical_thermodynamic_spectrum_matches_closed_form() {
        let c = CorrelatorSet::from_independent(2.0 / PI, 2.0 / PI, -2.0 / (3.0 * PI));
        let got = rdm_spectrum(&c).unwrap();
        let want = critical_spectrum_closed_form();
        for k in 0..4 {
            assert!((got.eps[k] - want.eps[k]).abs() < 1e-15);
        }
        let generic = eigensolver_spectrum(&build_rdm(&c).unwrap());
        let sorted = want.sorted();
        for k in 0..4 {
            assert!((generic[k] - sorted[k]).abs() < 1e-14);
        }
        assert!((von_neumann_entropy(&got) - 0.856_107_516_439_404_7).abs() < 1e-12);
    }

    #[test]
    fn rejects_inconsistent_correlators() {
        // sz = 1 forces every coherence to vanish
        let c = CorrelatorSet::from_independent(1.0, 0.8, 0.0);
        assert!(matches!(rdm_spectrum(&c), Err(Error::NonPhysical { .. })));
        assert!(matches!(build_rdm(&c), Err(Error::NonPhysical { .. })));
    }

    #[test]
    fn entropy_limits() {
        assert!(entropy(&fin(0.0, 50)).unwrap() < 1e-14);
        let e = entropy(&fin(50.0, 1000)).unwrap();
        assert!((e - 1.0).abs() < 1e-6, "{e}");
        // overshoots one bit near λ ≈ 3, then relaxes back from above
        let mut prev = entropy(&fin(5.0, 1000)).unwrap();
        assert!(prev > 1.0);
        for l in [10.0, 20.0, 50.0] {
            let e = entropy(&fin(l, 1000)).unwrap();
            assert!(e < prev && e > 1.0);
            prev = e;
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = fin(0.5, 500);
        let got = entropy_derivative(&p).unwrap();
        let fd = richardson_central(|l| entropy(&fin(l, 500)).unwrap(), 0.5, 1e-6);
        assert!(((got - fd) / fd).abs() < 1e-7, "{got} vs {fd}");
    }

    #[test]
    fn derivative_vanishes_at_weak_coupling() {
        let (_, method) = entropy_derivative_with_method(&fin(1e-2, 100)).unwrap();
        assert_eq!(method, DerivativeMethod::Analytic);
        // the smallest eigenvalue is below the analytic floor here
        let (d, method) = entropy_derivative_with_method(&fin(1e-4, 100)).unwrap();
        assert_eq!(method, DerivativeMethod::FiniteDifference);
        let fd = richardson_central(|l| entropy(&fin(l, 100)).unwrap(), 1e-4, 1e-6);
        assert!(((d - fd) / fd).abs() < 1e-6, "{d} vs {fd}");
        let smaller = entropy_derivative(&fin(1e-6, 100)).unwrap();
        assert!(smaller.abs() < d.abs() && d.abs() < 0.01);
        // λ = 0 itself falls back to a one-sided difference
        let (d0, m0) = entropy_derivative_with_method(&fin(0.0, 100)).unwrap();
        assert_eq!(m0, DerivativeMethod::FiniteDifference);
        assert!(d0.abs() < 1e-3);
    }

    #[test]
    fn thermodynamic_derivative_diverges_at_criticality() {
        let p = ModelPoint::thermodynamic(1.0).unwrap();
        assert!(matches!(entropy_derivative(&p), Err(Error::Divergent(_))));
        let near = ModelPoint::thermodynamic(1.0 - 1e-3).unwrap();
        assert!(entropy_derivative(&near).unwrap().is_finite());
    }

    #[test]
    fn both_assemblies_agree_on_physical_grid() {
        for n in [10, 101, 1000] {
            for k in 1..=30 {
                let l = 0.1 * k as f64;
                let (c, d) = correlators_with_derivatives(&fin(l, n)).unwrap();
                let s = rdm_spectrum(&c).unwrap();
                let f = entropy_derivative_forms(&s.eps, &spectrum_derivative(&c, &d));
                assert!((f.log_ratio - f.log_sum).abs() < 1e-12, "{l} {n}: {f:?}");
            }
        }
    }

    fn valid_correlators() -> impl Strategy<Value = CorrelatorSet> {
        (-1.0..1.0_f64, -1.0..1.0_f64, -1.0..1.0_f64)
            .prop_map(|(sz, xx, yy)| CorrelatorSet::from_independent(sz, xx, yy))
            .prop_filter("physical", |c| {
                c.zz.abs() <= 1.0 && raw_spectrum(c).iter().all(|&e| e >= 0.0)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn closed_form_matches_eigensolver(c in valid_correlators()) {
            let s = rdm_spectrum(&c).unwrap();
            prop_assert!((s.sum() - 1.0).abs() < 1e-12);
            let r = build_rdm(&c).unwrap();
            prop_assert!((r.trace() - 1.0).abs() < 1e-12);
            prop_assert_eq!(r.w1, r.w2);
            let generic = eigensolver_spectrum(&r);
            let closed = s.sorted();
            for k in 0..4 {
                prop_assert!((generic[k] - closed[k]).abs() < 1e-12, "{:?} vs {:?}", generic, closed);
            }
            let e = von_neumann_entropy(&s);
            prop_assert!((0.0..=2.0).contains(&e));
        }
    }
}
