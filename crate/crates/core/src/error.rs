use thiserror::Error;

/// Errors produced by graph construction, spectral computations, and
/// trajectory integration.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("graph: {0}")]
    Graph(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("eigensolver failed to converge for {n}x{n} matrix after {iterations} QR iterations")]
    EigenConvergence { n: usize, iterations: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("measurement: {0}")]
    Measurement(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
