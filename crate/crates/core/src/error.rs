use thiserror::Error;

/// Errors raised by the lattice, solver, bounds and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("expected a diagonal gauged form, off-diagonal magnitude {0:e}")]
    NotDiagonal(f64),

    #[error("rotation field is not in SO(3) at site {site} (deviation {deviation:e})")]
    NotRotation { site: usize, deviation: f64 },

    #[error("operator assembly limited to n <= {max}, got n = {n}")]
    SizeGuard { n: usize, max: usize },

    #[error("{what} did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("configuration is not a solution: residual {residual:e} exceeds tolerance {tol:e}")]
    NotASolution { residual: f64, tol: f64 },

    #[error("bad magic bytes in field file: {0:?}")]
    BadMagic([u8; 4]),

    #[error("unsupported field file version: expected {expected}, found {found}")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
