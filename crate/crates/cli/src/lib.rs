//! Companion crate to `perk-core`: file formats, golden-file caching, and the
//! `perk` command-line driver.
//!
//! All numeric serialization uses 17-significant-digit scientific decimals so
//! round trips reproduce `f64` values exactly and outputs stay diff-able.

pub mod formats;

use std::fmt;

use perk_core::butcher::ButcherError;
use perk_core::integrator::IntegratorError;
use perk_core::linalg::LinalgError;
use perk_core::optimizer::OptimizerError;
use perk_core::problems::ProblemError;
use perk_core::spectra::SpectrumError;
use perk_core::stabpoly::StabPolyError;

/// Top-level error type; each variant maps to a distinct process exit code.
#[derive(Debug)]
pub enum ToolsError {
    /// File could not be read or written. Exit code 3.
    Io { path: String, source: std::io::Error },
    /// Malformed file contents. Exit code 4.
    Parse { path: String, line: usize, message: String },
    /// Structurally well-formed input violating a mathematical invariant
    /// (spectrum in the right half plane, inconsistent tableau, ...).
    /// Exit code 5.
    Validation(String),
    /// The optimizer found no feasible timestep or was misconfigured.
    /// Exit code 6.
    Optimizer(String),
    /// A residual check exceeded its threshold. Exit code 7.
    ResidualExceeded { what: String, residual: f64, threshold: f64 },
    /// Numerical linear algebra failure. Exit code 8.
    Numerical(String),
    /// Time integration failure. Exit code 9.
    Integration(String),
}

impl ToolsError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ToolsError::Io { .. } => 3,
            ToolsError::Parse { .. } => 4,
            ToolsError::Validation(_) => 5,
            ToolsError::Optimizer(_) => 6,
            ToolsError::ResidualExceeded { .. } => 7,
            ToolsError::Numerical(_) => 8,
            ToolsError::Integration(_) => 9,
        }
    }
}

impl fmt::Display for ToolsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ToolsError::Io { path, source } => write!(f, "io error on {path}: {source}"),
            ToolsError::Parse { path, line, message } => {
                write!(f, "parse error at {path}:{line}: {message}")
            }
            ToolsError::Validation(m) => write!(f, "validation error: {m}"),
            ToolsError::Optimizer(m) => write!(f, "optimizer error: {m}"),
            ToolsError::ResidualExceeded { what, residual, threshold } => {
                write!(f, "{what}: residual {residual:e} exceeds {threshold:e}")
            }
            ToolsError::Numerical(m) => write!(f, "numerical error: {m}"),
            ToolsError::Integration(m) => write!(f, "integration error: {m}"),
        }
    }
}

impl std::error::Error for ToolsError {}

impl From<SpectrumError> for ToolsError {
    fn from(e: SpectrumError) -> Self {
        ToolsError::Validation(e.to_string())
    }
}

impl From<ButcherError> for ToolsError {
    fn from(e: ButcherError) -> Self {
        ToolsError::Validation(e.to_string())
    }
}

impl From<StabPolyError> for ToolsError {
    fn from(e: StabPolyError) -> Self {
        ToolsError::Validation(e.to_string())
    }
}

impl From<OptimizerError> for ToolsError {
    fn from(e: OptimizerError) -> Self {
        ToolsError::Optimizer(e.to_string())
    }
}

impl From<LinalgError> for ToolsError {
    fn from(e: LinalgError) -> Self {
        ToolsError::Numerical(e.to_string())
    }
}

impl From<IntegratorError> for ToolsError {
    fn from(e: IntegratorError) -> Self {
        ToolsError::Integration(e.to_string())
    }
}

impl From<ProblemError> for ToolsError {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::Integrator(i) => i.into(),
            other => ToolsError::Validation(other.to_string()),
        }
    }
}
