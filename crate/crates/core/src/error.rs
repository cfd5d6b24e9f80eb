use thiserror::Error;

use crate::model::ModelPoint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not reach relative tolerance {tol:e} at {point} (estimated error {estimate:e})")]
    QuadratureNonConvergence {
        point: ModelPoint,
        tol: f64,
        estimate: f64,
    },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("d/dλ diverges at {0}: the thermodynamic limit is singular at λ = 1")]
    Divergent(ModelPoint),

    #[error("non-physical reduced density matrix: eigenvalue {eigenvalue:e} below -1e-9")]
    NonPhysical { eigenvalue: f64 },

    #[error("concurrence is not differentiable at {0}: two branches of the max are tied")]
    NonDifferentiable(ModelPoint),

    #[error("fit rejected: {0}")]
    Fit(String),

    #[error("search failed: {0}")]
    Search(String),

    #[error("data collapse failed: {0}")]
    Collapse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
