use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("regime error: H = {hurst} is outside the supported range ({expected})")]
    Regime { hurst: f64, expected: &'static str },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix size {n} exceeds the dense cap {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("Cholesky factorization failed at leading minor {minor}")]
    Factorization { minor: usize },

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("circulant embedding has eigenvalue {min_eigenvalue:e} (max {max_eigenvalue:e})")]
    Embedding {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("model/path mismatch: {0}")]
    Mismatch(String),
}

/// Coarse classification used by front ends to map errors to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad parameters or regime (invalid H, sigma, h, ...).
    Parameter,
    /// A numerical procedure failed.
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_)
            | Error::Regime { .. }
            | Error::Parameter(_)
            | Error::Dimension { .. }
            | Error::SizeCap { .. }
            | Error::Mismatch(_) => ErrorKind::Parameter,
            Error::Factorization { .. } | Error::Quadrature { .. } | Error::Embedding { .. } => {
                ErrorKind::Numerical
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
