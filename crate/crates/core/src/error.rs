use std::path::PathBuf;

use crate::Cf64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input shape error: {0}")]
    InputShape(String),

    #[error("singular pilot: pilot symbol {index} is zero")]
    SingularPilot { index: usize },

    #[error("index {index} out of range (len {len})")]
    Index { index: usize, len: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{0}")]
    Convergence(Box<ConvergenceFailure>),

    #[error("degenerate channel estimate: all subcarriers are zero")]
    DegenerateEstimate,

    #[error("degenerate measurement: {0}")]
    DegenerateMeasurement(String),

    #[error("config error{}: {message}", key.as_ref().map(|k| format!(" at `{k}`")).unwrap_or_default())]
    Config { key: Option<String>, message: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

/// Solver state at the point the iteration cap was hit.
#[derive(Debug, Clone)]
pub struct ConvergenceFailure {
    pub iterations: usize,
    pub residual: f64,
    pub tol: f64,
    pub last_psi: Vec<Cf64>,
    pub objective_trace: Vec<f64>,
}

impl std::fmt::Display for ConvergenceFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "solver did not converge in {} iterations (residual {:.3e} > tol {:.3e})",
            self.iterations, self.residual, self.tol
        )
    }
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: Some(key.into()),
            message: message.into(),
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping any [`Error::Context`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}
