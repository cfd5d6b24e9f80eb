//! Two-site local entanglement of the periodic transverse-field Ising chain
//!
//! ```text
//! H = -Σ_j [ λ σˣ_j σˣ_{j+1} + σᶻ_j ],   σ_{N+1} ≡ σ_1
//! ```
//!
//! The crate evaluates the exact free-fermion ground-state correlators of this
//! chain (finite rings and the thermodynamic limit), assembles the reduced
//! density matrix of two neighbouring spins, and derives from it the von
//! Neumann entropy `E_v`, the concurrence `C` and their analytic
//! λ-derivatives. On top of that sit the finite-size-scaling tools used to
//! study the quantum phase transition at `λ_c = 1`, and a brute-force exact
//! diagonalization oracle for small rings.
//!
//! Module map:
//!
//! * [`correlators`] momentum grids, dispersion and the four correlators
//! * [`entanglement`] reduced density matrix, spectrum, entropy and its derivative
//! * [`concurrence`] Wootters concurrence of the X-shaped two-site state
//! * [`critical`] closed-form values at the critical point
//! * [`ed`] exact diagonalization of small rings
//! * [`scaling`] pseudo-critical point search, scaling fits, data collapse
//! * [`cli`] the `tfim` command-line driver
//!
//! Runnable walkthroughs of each capability live under `examples/`.

// `!(a < b)` is used on purpose so that NaN lands in the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod concurrence;
pub mod correlators;
pub mod critical;
pub mod ed;
pub mod entanglement;
mod error;
pub mod lanczos;
mod model;
pub mod numdiff;
pub mod quadrature;
pub mod scaling;
mod summation;

pub use error::{Error, Result};
pub use model::{ModelPoint, SystemSize, LAMBDA_C};
