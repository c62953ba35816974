//! Error types shared by the exact-series and numeric-oracle halves.

use crate::trigpoly::Rat;
use std::fmt;

/// Failures of the exact (rational) series pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesError {
    /// `solve_harmonic` was called with a resonant cos(2t) component.
    ResonantRhs { coefficient: Rat },
    /// A coefficient grew past the configured bit bound.
    CoefficientOverflow { bits: u64, limit: u64 },
    /// Two series with different truncation orders were combined.
    OrderMismatch { left: usize, right: usize },
    /// The N = 0 eigenvalue branch only exists for the even parity.
    UnsupportedParity,
    /// Invalid problem data (wrong index range, zero order, ...).
    InvalidSpec(String),
    /// The coexistence fit has no usable lowest-order equations.
    DegenerateFit(String),
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::ResonantRhs { coefficient } => {
                write!(f, "right-hand side has resonant cos(2t) coefficient {coefficient}")
            }
            SeriesError::CoefficientOverflow { bits, limit } => {
                write!(f, "coefficient size {bits} bits exceeds the {limit}-bit bound")
            }
            SeriesError::OrderMismatch { left, right } => {
                write!(f, "truncation orders differ: {left} vs {right}")
            }
            SeriesError::UnsupportedParity => {
                write!(f, "the N = 0 branch exists only for the even parity")
            }
            SeriesError::InvalidSpec(msg) => write!(f, "invalid spec: {msg}"),
            SeriesError::DegenerateFit(msg) => write!(f, "degenerate fit: {msg}"),
        }
    }
}

impl std::error::Error for SeriesError {}

/// Failures of the double-precision Floquet oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// The energy level line V(x) = E has no bracketed root on one side.
    NoTurningPoint { side: &'static str },
    /// The period quadrature did not reach the requested relative accuracy.
    QuadratureNonConvergent,
    /// Step calibration failed to stabilise the discriminant.
    IntegratorFailure(String),
    /// The scan window missed an eigenvalue; widen the window or shrink q.
    BracketNotFound { n_index: u32, q: f64 },
    /// More sign changes than eigenvalues in the scan window.
    AmbiguousBracket { n_index: u32, q: f64, count: usize },
    /// The problem data violates an admissibility invariant.
    InvalidProblem(String),
    /// Not enough usable grid points for a fit.
    InsufficientData { needed: usize, got: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::NoTurningPoint { side } => {
                write!(f, "no turning point found on the {side} side")
            }
            OracleError::QuadratureNonConvergent => {
                write!(f, "period quadrature did not converge")
            }
            OracleError::IntegratorFailure(msg) => write!(f, "integrator failure: {msg}"),
            OracleError::BracketNotFound { n_index, q } => {
                write!(f, "no eigenvalue bracket for tongue N = {n_index} at q = {q}")
            }
            OracleError::AmbiguousBracket { n_index, q, count } => {
                write!(f, "{count} sign changes for tongue N = {n_index} at q = {q}")
            }
            OracleError::InvalidProblem(msg) => write!(f, "invalid problem: {msg}"),
            OracleError::InsufficientData { needed, got } => {
                write!(f, "fit needs {needed} usable points, got {got}")
            }
        }
    }
}

impl std::error::Error for OracleError {}
