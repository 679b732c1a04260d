// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (anti-Hermitian defect {defect:e})")]
    NonHermitianInput { defect: f64 },

    #[error("matrix has non-finite entries")]
    NonFiniteEntries,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("Sylvester operator is singular (spectral gap {gap:e} below {threshold:e})")]
    SingularSylvester { gap: f64, threshold: f64 },

    #[error("matrix is numerically singular (condition estimate {condition:e})")]
    SingularMatrix { condition: f64 },

    #[error("graph-subspace representation failed: {reason}")]
    GraphConditionFailed { reason: String },

    #[error("Newton iteration did not reach tolerance after {iterations} steps (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("coupling alpha must be nonzero for the quadratic branch")]
    ZeroAlpha,

    #[error("S_-tau H S_tau is not block diagonal (off-diagonal norms {upper:e}, {lower:e})")]
    NotBlockDiagonalizable { upper: f64, lower: f64 },

    #[error("evolution operator is not unitary (defect {defect:e})")]
    NonUnitaryEvolution { defect: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Stable machine-readable name, used in CLI error reports and by the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonHermitianInput { .. } => "NonHermitianInput",
            Error::NonFiniteEntries => "NonFiniteEntries",
            Error::NotSquare { .. } => "NotSquare",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SingularSylvester { .. } => "SingularSylvester",
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::GraphConditionFailed { .. } => "GraphConditionFailed",
            Error::MaxIterations { .. } => "MaxIterations",
            Error::ZeroAlpha => "ZeroAlpha",
            Error::NotBlockDiagonalizable { .. } => "NotBlockDiagonalizable",
            Error::NonUnitaryEvolution { .. } => "NonUnitaryEvolution",
            Error::InvalidState(_) => "InvalidState",
            Error::Config(_) => "ConfigError",
        }
    }
}
