//! Exact diagonalization of small periodic rings.
//!
//! Basis states are bit strings over the sites, bit `j` set meaning spin `j` points
//! down (σᶻ = −1). Site 0 is the least significant bit. The ground state is taken
//! from the even-parity sector (even number of down spins), which is where the
//! free-fermion solution with half-odd-integer momenta lives.

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};

use crate::correlators::{CorrelatorSet, Parity};
use crate::entanglement::{von_neumann_entropy, RdmSpectrum};
use crate::error::{Error, Result};
use crate::lanczos::{lowest_eigenpair, LanczosOptions, SymmetricOperator};
use crate::model::MIN_SITES;

/// Largest ring handled by the matrix-free solver.
pub const MAX_SITES: usize = 20;
/// Largest ring for which a dense matrix may be materialized.
pub const DENSE_MAX_SITES: usize = 14;

#[derive(Debug, Clone, Copy)]
pub struct EdConfig {
    /// Must not exceed [`MAX_SITES`].
    pub max_sites: usize,
    pub lanczos: LanczosOptions,
}

impl Default for EdConfig {
    fn default() -> Self {
        EdConfig {
            max_sites: MAX_SITES,
            lanczos: LanczosOptions::default(),
        }
    }
}

/// `H = −Σ_j [λ σˣ_j σˣ_{j+1} + σᶻ_j]` on a ring, applied matrix-free.
#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    n_sites: usize,
    lambda: f64,
    bond_masks: Vec<usize>,
}

pub fn build_hamiltonian(lambda: f64, n: usize) -> Result<SpinHamiltonian> {
    build_hamiltonian_with(lambda, n, &EdConfig::default())
}

pub fn build_hamiltonian_with(lambda: f64, n: usize, cfg: &EdConfig) -> Result<SpinHamiltonian> {
    let cap = cfg.max_sites.min(MAX_SITES);
    if !(MIN_SITES..=cap).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "exact diagonalization supports {MIN_SITES} ≤ N ≤ {cap}, got N = {n}"
        )));
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidArgument(format!("coupling must be non-negative, got λ = {lambda}")));
    }
    let bond_masks = (0..n).map(|j| (1 << j) | (1 << ((j + 1) % n))).collect();
    Ok(SpinHamiltonian {
        n_sites: n,
        lambda,
        bond_masks,
    })
}

fn state_parity(state: usize) -> f64 {
    if state.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl SpinHamiltonian {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn diagonal(&self, state: usize) -> f64 {
        -(self.n_sites as f64 - 2.0 * state.count_ones() as f64)
    }

    /// Dense matrix, available up to [`DENSE_MAX_SITES`] sites.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.n_sites > DENSE_MAX_SITES {
            return Err(Error::InvalidArgument(format!(
                "dense Hamiltonian limited to N ≤ {DENSE_MAX_SITES}, got {}",
                self.n_sites
            )));
        }
        let dim = self.dim();
        let mut h = DMatrix::zeros(dim, dim);
        for s in 0..dim {
            h[(s, s)] = self.diagonal(s);
            for &m in &self.bond_masks {
                h[(s ^ m, s)] -= self.lambda;
            }
        }
        Ok(h)
    }

    /// `y ← P·x` with `P = ∏ σᶻ_j`.
    pub fn apply_parity(&self, x: &[f64], y: &mut [f64]) {
        for (s, (yi, xi)) in y.iter_mut().zip(x).enumerate() {
            *yi = state_parity(s) * xi;
        }
    }
}

impl SymmetricOperator for SpinHamiltonian {
    fn dim(&self) -> usize {
        1 << self.n_sites
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (s, ys) in y.iter_mut().enumerate() {
            let mut acc = self.diagonal(s) * x[s];
            for &m in &self.bond_masks {
                acc -= self.lambda * x[s ^ m];
            }
            *ys = acc;
        }
    }
}

/// H restricted to the even-parity sector (odd amplitudes are projected out).
struct EvenSector<'a>(&'a SpinHamiltonian);

impl SymmetricOperator for EvenSector<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply(x, y);
        for (s, ys) in y.iter_mut().enumerate() {
            if s.count_ones() % 2 == 1 {
                *ys = 0.0;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub n_sites: usize,
    pub lambda: f64,
    pub energy: f64,
    pub amplitudes: Vec<f64>,
    pub parity: Parity,
    pub residual: f64,
    pub gap_estimate: Option<f64>,
}

impl GroundState {
    /// True when the in-sector gap estimate is below 1e-10.
    pub fn is_near_degenerate(&self) -> bool {
        self.gap_estimate.is_some_and(|g| g < 1e-10)
    }
}

pub fn ground_state(lambda: f64, n: usize) -> Result<GroundState> {
    ground_state_with(lambda, n, &EdConfig::default())
}

/// Lowest even-parity eigenstate, from the normalized uniform vector over that sector.
pub fn ground_state_with(lambda: f64, n: usize, cfg: &EdConfig) -> Result<GroundState> {
    let h = build_hamiltonian_with(lambda, n, cfg)?;
    let dim = h.dim();
    let start: Vec<f64> = (0..dim)
        .map(|s| if s.count_ones() % 2 == 0 { 1.0 } else { 0.0 })
        .collect();
    let pair = lowest_eigenpair(&EvenSector(&h), &start, &cfg.lanczos)?;

    let mut px = vec![0.0; dim];
    h.apply_parity(&pair.vector, &mut px);
    let p: f64 = pair.vector.iter().zip(&px).map(|(a, b)| a * b).sum();
    let parity = if (p - 1.0).abs() < 1e-8 {
        Parity::Even
    } else if (p + 1.0).abs() < 1e-8 {
        Parity::Odd
    } else {
        return Err(Error::NonConvergence {
            what: "ground-state parity",
            iterations: pair.iterations,
            residual: (p.abs() - 1.0).abs(),
        });
    };

    // residual with the full Hamiltonian, not the projected one
    let mut hx = vec![0.0; dim];
    h.apply(&pair.vector, &mut hx);
    let residual = hx
        .iter()
        .zip(&pair.vector)
        .map(|(a, b)| (a - pair.value * b).powi(2))
        .sum::<f64>()
        .sqrt();

    Ok(GroundState {
        n_sites: n,
        lambda,
        energy: pair.value,
        amplitudes: pair.vector,
        parity,
        residual,
        gap_estimate: pair.gap_estimate,
    })
}

/// Lowest eigenvalue of the full dense Hamiltonian (both sectors), for N ≤ 10.
pub fn dense_ground_energy(lambda: f64, n: usize) -> Result<f64> {
    if n > 10 {
        return Err(Error::InvalidArgument(format!("dense check limited to N ≤ 10, got {n}")));
    }
    let h = build_hamiltonian(lambda, n)?.to_dense()?;
    Ok(SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Reduced density matrix of the adjacent pair `sites`, in the basis {↑↑, ↑↓, ↓↑, ↓↓}
/// with the first listed site as the left tensor factor.
pub fn two_site_rdm(g: &GroundState, sites: (usize, usize)) -> Result<Matrix4<f64>> {
    let n = g.n_sites;
    let (i, j) = sites;
    if i >= n || j >= n || (j != (i + 1) % n && i != (j + 1) % n) {
        return Err(Error::InvalidArgument(format!(
            "sites ({i}, {j}) are not nearest neighbours on a ring of {n}"
        )));
    }
    let (bi, bj) = (1usize << i, 1usize << j);
    let mut rho = Matrix4::zeros();
    for s in 0..g.amplitudes.len() {
        if s & (bi | bj) != 0 {
            continue;
        }
        // the four states sharing the environment configuration s
        let states = [s, s | bj, s | bi, s | bi | bj];
        let amps = states.map(|t| g.amplitudes[t]);
        for a in 0..4 {
            for b in 0..4 {
                rho[(a, b)] += amps[a] * amps[b];
            }
        }
    }
    Ok(rho)
}

/// Nearest-neighbour correlators read off a two-site reduced density matrix.
pub fn correlators_from_rdm(rho: &Matrix4<f64>) -> CorrelatorSet {
    let sz = rho[(0, 0)] + rho[(1, 1)] - rho[(2, 2)] - rho[(3, 3)];
    let zz = rho[(0, 0)] - rho[(1, 1)] - rho[(2, 2)] + rho[(3, 3)];
    let xx = 2.0 * (rho[(0, 3)] + rho[(1, 2)]);
    let yy = 2.0 * (rho[(1, 2)] - rho[(0, 3)]);
    CorrelatorSet { sz, xx, yy, zz }
}

/// Eigenvalues of a 4×4 density matrix from a generic symmetric eigensolver, ascending.
pub fn generic_spectrum(rho: &Matrix4<f64>) -> [f64; 4] {
    let mut v: Vec<f64> = SymmetricEigen::new(*rho).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    [v[0], v[1], v[2], v[3]]
}

/// Two-site entanglement (bits) of the ED ground state.
pub fn oracle_entropy(lambda: f64, n: usize) -> Result<f64> {
    let g = ground_state(lambda, n)?;
    let rho = two_site_rdm(&g, (0, 1))?;
    let eps = generic_spectrum(&rho).map(|e| if (-1e-12..0.0).contains(&e) { 0.0 } else { e });
    Ok(von_neumann_entropy(&RdmSpectrum { eps }))
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::correlators::{correlators, ground_energy};
    use crate::entanglement::{build_rdm, entropy};
    use crate::model::ModelPoint;

    #[test]
    fn field_only_hamiltonian_is_diagonal() {
        let h = build_hamiltonian(0.0, 3).unwrap().to_dense().unwrap();
        for s in 0..8usize {
            let downs = s.count_ones() as f64;
            assert_eq!(h[(s, s)], -((3.0 - downs) - downs));
            for t in 0..8 {
                if s != t {
                    assert_eq!(h[(s, t)], 0.0);
                }
            }
        }
        assert_eq!(h.diagonal().min(), -3.0);
    }

    #[test]
    fn symmetric_and_parity_conserving() {
        let h = build_hamiltonian(1.0, 4).unwrap();
        let dense = h.to_dense().unwrap();
        assert_eq!(dense, dense.transpose());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dim = h.dim();
        for _ in 0..10 {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= nv);
            let (mut a, mut b, mut tmp) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
            h.apply_parity(&v, &mut tmp);
            h.apply(&tmp, &mut a);
            h.apply(&v, &mut tmp);
            h.apply_parity(&tmp, &mut b);
            let comm = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            assert!(comm < 1e-12);
        }
    }

    #[test]
    fn rejects_out_of_range_sizes() {
        assert!(build_hamiltonian(1.0, 2).is_err());
        assert!(build_hamiltonian(1.0, 21).is_err());
        let cfg = EdConfig {
            max_sites: 8,
            ..Default::default()
        };
        assert!(build_hamiltonian_with(1.0, 9, &cfg).is_err());
        assert!(build_hamiltonian(1.0, 15).unwrap().to_dense().is_err());
    }

    #[test]
    fn lowest_eigenvalue_matches_free_fermions() {
        let e = ground_state(0.5, 8).unwrap().energy;
        let ff = ground_energy(&ModelPoint::finite(0.5, 8).unwrap()).unwrap();
        assert!((e - ff).abs() < 1e-10);
        assert!((dense_ground_energy(0.5, 8).unwrap() - ff).abs() < 1e-10);
    }

    #[test]
    fn ground_state_properties() {
        let g = ground_state(0.0, 6).unwrap();
        assert!((g.energy + 6.0).abs() < 1e-12);
        assert_eq!(g.parity, Parity::Even);
        assert!((g.amplitudes[0].abs() - 1.0).abs() < 1e-12);

        let g = ground_state(1.0, 10).unwrap();
        assert_eq!(g.parity, Parity::Even);
        assert!(g.residual < 1e-10);
        let norm: f64 = g.amplitudes.iter().map(|a| a * a).sum();
        assert!((norm - 1.0).abs() < 1e-12);

        let g = ground_state(0.5, 12).unwrap();
        let ff = ground_energy(&ModelPoint::finite(0.5, 12).unwrap()).unwrap();
        assert!((g.energy - ff).abs() < 1e-10);
    }

    #[test]
    fn rdm_of_product_state() {
        let g = ground_state(0.0, 5).unwrap();
        let rho = two_site_rdm(&g, (0, 1)).unwrap();
        let want = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 0.0, 0.0, 0.0));
        assert!((rho - want).abs().max() < 1e-12);
    }

    #[test]
    fn rdm_is_translation_invariant_and_x_shaped() {
        let g = ground_state(1.0, 10).unwrap();
        let a = two_site_rdm(&g, (0, 1)).unwrap();
        let b = two_site_rdm(&g, (3, 4)).unwrap();
        let wrap = two_site_rdm(&g, (9, 0)).unwrap();
        assert!((a - b).abs().max() < 1e-12);
        assert!((a - wrap).abs().max() < 1e-12);
        assert!((a.trace() - 1.0).abs() < 1e-12);
        for (r, c) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            assert!(a[(r, c)].abs() < 1e-10 && a[(c, r)].abs() < 1e-10);
        }
        assert!((a[(1, 1)] - a[(2, 2)]).abs() < 1e-10);
        assert!(generic_spectrum(&a)[0] > -1e-12);
        assert!(two_site_rdm(&g, (0, 2)).is_err());
    }

    #[test]
    fn rdm_matches_free_fermion_elements() {
        let g = ground_state(1.5, 10).unwrap();
        let rho = two_site_rdm(&g, (0, 1)).unwrap();
        let ff = build_rdm(&correlators(&ModelPoint::finite(1.5, 10).unwrap()).unwrap())
            .unwrap()
            .to_matrix();
        assert!((rho - ff).abs().max() < 1e-10);
    }

    #[test]
    fn oracle_entropy_matches_analytics() {
        assert!(oracle_entropy(0.0, 8).unwrap().abs() < 1e-12);
        for (l, n) in [(1.0, 12), (3.0, 10)] {
            let ed = oracle_entropy(l, n).unwrap();
            let ff = entropy(&ModelPoint::finite(l, n).unwrap()).unwrap();
            assert!((ed - ff).abs() < 1e-10, "λ={l} N={n}: {ed} vs {ff}");
        }
    }

    #[test]
    fn odd_rings_agree_too() {
        for n in [5, 7, 9] {
            let g = ground_state(0.8, n).unwrap();
            let ff = ground_energy(&ModelPoint::finite(0.8, n).unwrap()).unwrap();
            assert!((g.energy - ff).abs() < 1e-10);
            assert!((dense_ground_energy(0.8, n).unwrap() - ff).abs() < 1e-10);
        }
    }
}
