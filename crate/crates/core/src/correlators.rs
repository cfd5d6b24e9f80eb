//! Exact free-fermion ground-state correlators of the periodic chain.
//!
//! With `ω_φ = √(1 + λ² − 2λ cos φ)` the nearest-neighbour correlators are
//!
//! ```text
//! ⟨σᶻ⟩     = avg_φ (1 − λ cos φ) / ω_φ
//! ⟨σˣ₀σˣ₁⟩ = avg_φ (λ − cos φ) / ω_φ
//! ⟨σʸ₀σʸ₁⟩ = avg_φ (λ cos 2φ − cos φ) / ω_φ
//! ⟨σᶻ₀σᶻ₁⟩ = ⟨σᶻ⟩² − ⟨σˣ₀σˣ₁⟩⟨σʸ₀σʸ₁⟩
//! ```
//!
//! where `avg_φ` is the mean over the even-parity momentum grid of a finite ring,
//! or `(1/2π)∫₀^{2π} dφ` in the thermodynamic limit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelPoint, SystemSize, MIN_SITES};
use crate::quadrature::integrate_adaptive;
use crate::summation::pairwise_sum;

/// Relative tolerance of the thermodynamic-limit quadrature.
pub const THERMODYNAMIC_REL_TOL: f64 = 1e-12;

/// Within this distance of λ = 1 the quadrature panels are graded towards φ = 0.
pub const CRITICAL_REFINE_WINDOW: f64 = 0.01;

/// Thermodynamic λ-derivatives are refused this close to the critical point.
pub const DIVERGENCE_GUARD: f64 = 1e-6;

/// Eigenvalue of the parity operator `P = ∏ σᶻ_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    /// `P = +1`: half-odd-integer momenta. Holds the ground state.
    Even,
    /// `P = −1`: integer momenta.
    Odd,
}

impl Parity {
    pub fn sign(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn from_sign(sign: i8) -> Option<Self> {
        match sign {
            1 => Some(Parity::Even),
            -1 => Some(Parity::Odd),
            _ => None,
        }
    }
}

/// Fermion momenta `φ_q = 2πq/N` of one parity sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentumGrid {
    n: usize,
    parity: Parity,
}

pub fn momentum_grid(n: usize, parity: Parity) -> Result<MomentumGrid> {
    if n < MIN_SITES {
        return Err(Error::InvalidArgument(format!(
            "momentum grid needs N ≥ {MIN_SITES}, got {n}"
        )));
    }
    Ok(MomentumGrid { n, parity })
}

impl MomentumGrid {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    #[inline]
    pub fn phi(&self, m: usize) -> f64 {
        match self.parity {
            Parity::Even => PI * (2 * m + 1) as f64 / self.n as f64,
            Parity::Odd => 2.0 * PI * m as f64 / self.n as f64,
        }
    }

    pub fn phis(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.phi(m)).collect()
    }
}

/// Single-particle dispersion `ω_φ = √(1 + λ² − 2λ cos φ)`.
///
/// Evaluated as `√((1 − λ)² + 4λ sin²(φ/2))`, which keeps full relative precision
/// near the gap closing at λ = 1, φ = 0.
#[inline]
pub fn dispersion(lambda: f64, phi: f64) -> f64 {
    let s = (0.5 * phi).sin();
    ((1.0 - lambda) * (1.0 - lambda) + 4.0 * lambda * s * s).sqrt()
}

/// Ground-state expectation values entering the two-site reduced density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    /// ⟨σᶻ⟩
    pub sz: f64,
    /// ⟨σˣ₀σˣ₁⟩
    pub xx: f64,
    /// ⟨σʸ₀σʸ₁⟩
    pub yy: f64,
    /// ⟨σᶻ₀σᶻ₁⟩
    pub zz: f64,
}

impl CorrelatorSet {
    /// Builds the set from the three independent sums; `zz` follows from Wick's theorem.
    pub fn from_independent(sz: f64, xx: f64, yy: f64) -> Self {
        CorrelatorSet {
            sz,
            xx,
            yy,
            zz: sz * sz - xx * yy,
        }
    }
}

/// d/dλ of every [`CorrelatorSet`] entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorDerivatives {
    pub d_sz: f64,
    pub d_xx: f64,
    pub d_yy: f64,
    pub d_zz: f64,
}

impl CorrelatorDerivatives {
    pub fn from_independent(c: &CorrelatorSet, d_sz: f64, d_xx: f64, d_yy: f64) -> Self {
        CorrelatorDerivatives {
            d_sz,
            d_xx,
            d_yy,
            d_zz: 2.0 * c.sz * d_sz - d_xx * c.yy - c.xx * d_yy,
        }
    }
}

// Numerators in terms of h = sin²(φ/2), so nothing cancels as λ → 1, φ → 0.
#[inline]
fn value_terms(lambda: f64, phi: f64) -> [f64; 3] {
    let s = (0.5 * phi).sin();
    let h = s * s;
    let g = 1.0 - lambda;
    let w = (g * g + 4.0 * lambda * h).sqrt();
    [
        (g + 2.0 * lambda * h) / w,
        (2.0 * h - g) / w,
        (2.0 * h - g - 8.0 * lambda * h * (1.0 - h)) / w,
    ]
}

// Quotient rule with dω/dλ = (λ − cos φ)/ω collapses every numerator to a multiple of sin²φ.
#[inline]
fn derivative_terms(lambda: f64, phi: f64) -> [f64; 3] {
    let (s, c) = phi.sin_cos();
    let w = dispersion(lambda, phi);
    let k = s * s / (w * w * w);
    [-lambda * k, k, (2.0 * lambda * c - 1.0) * k]
}

#[inline]
fn all_terms(lambda: f64, phi: f64) -> [f64; 6] {
    let v = value_terms(lambda, phi);
    let d = derivative_terms(lambda, phi);
    [v[0], v[1], v[2], d[0], d[1], d[2]]
}

fn grid_average<const K: usize>(lambda: f64, n: usize, f: impl Fn(f64, f64) -> [f64; K] + Sync) -> [f64; K] {
    let grid = MomentumGrid {
        n,
        parity: Parity::Even,
    };
    let sums = pairwise_sum(n, &|m| f(lambda, grid.phi(m)));
    sums.map(|s| s / n as f64)
}

fn critical_breakpoints(lambda: f64) -> Vec<f64> {
    let gap = (1.0 - lambda).abs();
    if gap >= CRITICAL_REFINE_WINDOW {
        return vec![0.5 * PI];
    }
    let floor = (gap / 8.0).max(1e-12);
    let mut bps = Vec::new();
    let mut x = 0.5 * PI;
    while x > floor {
        bps.push(x);
        x *= 0.5;
    }
    bps.reverse();
    bps
}

// The integrands are even about φ = π, so (1/2π)∫₀^{2π} = (1/π)∫₀^π.
fn thermodynamic_average<const K: usize>(
    point: &ModelPoint,
    f: impl Fn(f64, f64) -> [f64; K],
) -> Result<[f64; K]> {
    let lambda = point.lambda();
    let out = integrate_adaptive(
        &|phi| f(lambda, phi),
        0.0,
        PI,
        &critical_breakpoints(lambda),
        THERMODYNAMIC_REL_TOL,
    );
    if !out.converged {
        return Err(Error::QuadratureNonConvergence {
            point: *point,
            tol: THERMODYNAMIC_REL_TOL,
            estimate: out.relative_error,
        });
    }
    Ok(out.value.map(|v| v / PI))
}

fn average<const K: usize>(point: &ModelPoint, f: impl Fn(f64, f64) -> [f64; K] + Sync) -> Result<[f64; K]> {
    match point.size() {
        SystemSize::Finite(n) => Ok(grid_average(point.lambda(), n, f)),
        SystemSize::Thermodynamic => thermodynamic_average(point, f),
    }
}

fn check_derivative_point(point: &ModelPoint) -> Result<()> {
    if point.size() == SystemSize::Thermodynamic && (point.lambda() - 1.0).abs() < DIVERGENCE_GUARD {
        return Err(Error::Divergent(*point));
    }
    Ok(())
}

/// Ground-state correlators at `point`.
pub fn correlators(point: &ModelPoint) -> Result<CorrelatorSet> {
    let [sz, xx, yy] = average(point, value_terms)?;
    Ok(CorrelatorSet::from_independent(sz, xx, yy))
}

/// Analytic λ-derivatives of the correlators at `point`.
pub fn correlator_derivatives(point: &ModelPoint) -> Result<CorrelatorDerivatives> {
    Ok(correlators_with_derivatives(point)?.1)
}

/// Correlators and their λ-derivatives from a single pass over the momenta.
pub fn correlators_with_derivatives(point: &ModelPoint) -> Result<(CorrelatorSet, CorrelatorDerivatives)> {
    check_derivative_point(point)?;
    let [sz, xx, yy, d_sz, d_xx, d_yy] = average(point, all_terms)?;
    let c = CorrelatorSet::from_independent(sz, xx, yy);
    let d = CorrelatorDerivatives::from_independent(&c, d_sz, d_xx, d_yy);
    Ok((c, d))
}

/// Total ground-state energy `−Σ_φ ω_φ` of a finite ring (even-parity grid).
pub fn ground_energy(point: &ModelPoint) -> Result<f64> {
    let n = point.size().finite().ok_or_else(|| {
        Error::InvalidArgument("ground energy is only defined for a finite ring".into())
    })?;
    let grid = momentum_grid(n, Parity::Even)?;
    let lambda = point.lambda();
    let [s] = pairwise_sum(n, &|m| [dispersion(lambda, grid.phi(m))]);
    Ok(-s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numdiff::richardson_central;

    fn fin(lambda: f64, n: usize) -> ModelPoint {
        ModelPoint::finite(lambda, n).unwrap()
    }

    fn thermo(lambda: f64) -> ModelPoint {
        ModelPoint::thermodynamic(lambda).unwrap()
    }

    #[test]
    fn grids_follow_parity() {
        let even = momentum_grid(4, Parity::Even).unwrap().phis();
        let odd = momentum_grid(4, Parity::Odd).unwrap().phis();
        for (got, want) in even.iter().zip([PI / 4.0, 3.0 * PI / 4.0, 5.0 * PI / 4.0, 7.0 * PI / 4.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        for (got, want) in odd.iter().zip([0.0, PI / 2.0, PI, 3.0 * PI / 2.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(momentum_grid(2, Parity::Even).is_err());
        assert!(even.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn dispersion_values() {
        assert_eq!(dispersion(0.0, 1.234), 1.0);
        assert!((dispersion(1.0, PI) - 2.0).abs() < 1e-15);
        assert!((dispersion(1.0, PI / 2.0) - 2f64.sqrt()).abs() < 1e-15);
        for &(l, p) in &[(0.3, 0.1), (1.7, 2.0), (1.0, 1e-9)] {
            assert!(dispersion(l, p) >= (1.0_f64 - l).abs());
            let direct = (1.0 + l * l - 2.0 * l * f64::cos(p)).max(0.0).sqrt();
            assert!((dispersion(l, p) - direct).abs() < 1e-8);
        }
    }

    #[test]
    fn product_state_at_zero_coupling() {
        let c = correlators(&fin(0.0, 64)).unwrap();
        assert!((c.sz - 1.0).abs() < 1e-15);
        assert!(c.xx.abs() < 1e-15);
        assert!(c.yy.abs() < 1e-15);
        assert!((c.zz - 1.0).abs() < 1e-15);
    }

    #[test]
    fn critical_thermodynamic_values() {
        let c = correlators(&thermo(1.0)).unwrap();
        assert!((c.sz - 2.0 / PI).abs() < 1e-12);
        assert!((c.xx - 2.0 / PI).abs() < 1e-12);
        assert!((c.yy + 2.0 / (3.0 * PI)).abs() < 1e-12);
        assert!((c.zz - 16.0 / (3.0 * PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn derivatives_at_zero_coupling() {
        for n in [5, 16, 100] {
            let d = correlator_derivatives(&fin(0.0, n)).unwrap();
            assert!(d.d_sz.abs() < 1e-15);
            assert!((d.d_xx - 0.5).abs() < 1e-14);
            assert!((d.d_yy + 0.5).abs() < 1e-14);
            assert!(d.d_zz.abs() < 1e-14);
        }
    }

    #[test]
    fn critical_xx_derivative_reduces_to_log_sum() {
        // at λ = 1: sin²φ/ω³ = cos²(φ/2)/(2|sin(φ/2)|)
        for n in [100, 1000, 10_000] {
            let d = correlator_derivatives(&fin(1.0, n)).unwrap();
            let grid = momentum_grid(n, Parity::Even).unwrap();
            let direct: f64 = grid
                .phis()
                .iter()
                .map(|p| (0.5 * p).cos().powi(2) / (2.0 * (0.5 * p).sin().abs()))
                .sum::<f64>()
                / n as f64;
            assert!((d.d_xx - direct).abs() < 1e-10 * direct);
        }
        let a = correlator_derivatives(&fin(1.0, 1_000)).unwrap().d_xx;
        let b = correlator_derivatives(&fin(1.0, 100_000)).unwrap().d_xx;
        let slope = (b - a) / (100.0_f64).ln();
        assert!((slope - 1.0 / PI).abs() < 0.01 / PI, "slope {slope}");
        assert!(matches!(correlator_derivatives(&thermo(1.0)), Err(Error::Divergent(_))));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = fin(0.7, 200);
        let (_, d) = correlators_with_derivatives(&p).unwrap();
        let fd = |k: usize| {
            richardson_central(
                |l| {
                    let c = correlators(&fin(l, 200)).unwrap();
                    [c.sz, c.xx, c.yy, c.zz][k]
                },
                0.7,
                1e-3,
            )
        };
        for (k, want) in [d.d_sz, d.d_xx, d.d_yy, d.d_zz].into_iter().enumerate() {
            let got = fd(k);
            assert!((got - want).abs() <= 1e-7 * want.abs(), "component {k}: {got} vs {want}");
        }
    }

    #[test]
    fn finite_sums_converge_to_thermodynamic_limit() {
        for lambda in [0.5, 2.0] {
            let t = correlators(&thermo(lambda)).unwrap();
            let f = correlators(&fin(lambda, 10_000)).unwrap();
            for (a, b) in [(t.sz, f.sz), (t.xx, f.xx), (t.yy, f.yy), (t.zz, f.zz)] {
                assert!((a - b).abs() < 1e-8, "λ={lambda}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn thermodynamic_derivatives_near_criticality() {
        // graded panels must keep agreement with a very long ring where N|λ−1| ≫ 1
        for lambda in [1.0 - 1e-3, 1.0 + 1e-3] {
            let (_, t) = correlators_with_derivatives(&thermo(lambda)).unwrap();
            let (_, f) = correlators_with_derivatives(&fin(lambda, 2_000_000)).unwrap();
            assert!((t.d_xx - f.d_xx).abs() < 1e-8 * t.d_xx.abs(), "{} vs {}", t.d_xx, f.d_xx);
            assert!((t.d_sz - f.d_sz).abs() < 1e-8 * t.d_sz.abs());
        }
    }

    #[test]
    fn magnetization_decreases_with_coupling() {
        let mags: Vec<f64> = (0..=30)
            .map(|k| correlators(&fin(0.1 * k as f64, 1000)).unwrap().sz)
            .collect();
        assert!((mags[0] - 1.0).abs() < 1e-15);
        assert!(mags.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn zz_is_constructed_exactly() {
        for lambda in [0.3, 1.0, 2.5] {
            let c = correlators(&fin(lambda, 77)).unwrap();
            assert_eq!(c.zz.to_bits(), (c.sz * c.sz - c.xx * c.yy).to_bits());
            let (c, d) = correlators_with_derivatives(&fin(lambda, 77)).unwrap();
            let want = 2.0 * c.sz * d.d_sz - d.d_xx * c.yy - c.xx * d.d_yy;
            assert_eq!(d.d_zz.to_bits(), want.to_bits());
        }
    }

    #[test]
    fn ground_energy_values() {
        assert!((ground_energy(&fin(0.0, 8)).unwrap() + 8.0).abs() < 1e-14);
        let want: f64 = -[PI / 4.0, 3.0 * PI / 4.0, 5.0 * PI / 4.0, 7.0 * PI / 4.0]
            .iter()
            .map(|p| (2.0 - 2.0 * f64::cos(*p)).sqrt())
            .sum::<f64>();
        assert!((ground_energy(&fin(1.0, 4)).unwrap() - want).abs() < 1e-14);
        assert!(ground_energy(&thermo(0.5)).is_err());
    }
}
