use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Critical coupling of the transverse-field Ising chain.
pub const LAMBDA_C: f64 = 1.0;

/// Smallest ring for which the nearest-neighbour bond is not double counted.
pub const MIN_SITES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemSize {
    Finite(usize),
    Thermodynamic,
}

impl SystemSize {
    pub fn finite(self) -> Option<usize> {
        match self {
            SystemSize::Finite(n) => Some(n),
            SystemSize::Thermodynamic => None,
        }
    }

    /// Numeric label used in CSV output, with `0` standing for the infinite chain.
    pub fn as_label(self) -> usize {
        self.finite().unwrap_or(0)
    }
}

impl fmt::Display for SystemSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemSize::Finite(n) => write!(f, "N={n}"),
            SystemSize::Thermodynamic => f.write_str("N=∞"),
        }
    }
}

/// A coupling λ (in units of the transverse field) together with a chain length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    lambda: f64,
    size: SystemSize,
}

impl ModelPoint {
    pub fn new(lambda: f64, size: SystemSize) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "coupling must be finite and non-negative, got λ = {lambda}"
            )));
        }
        if let SystemSize::Finite(n) = size {
            if n < MIN_SITES {
                return Err(Error::InvalidArgument(format!(
                    "ring needs at least {MIN_SITES} sites, got N = {n}"
                )));
            }
        }
        Ok(ModelPoint { lambda, size })
    }

    pub fn finite(lambda: f64, n: usize) -> Result<Self> {
        Self::new(lambda, SystemSize::Finite(n))
    }

    pub fn thermodynamic(lambda: f64) -> Result<Self> {
        Self::new(lambda, SystemSize::Thermodynamic)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn size(&self) -> SystemSize {
        self.size
    }

    /// Same size, different coupling.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda, self.size)
    }
}

impl fmt::Display for ModelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(λ={}, {})", self.lambda, self.size)
    }
}
