//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A lattice coordinate or index outside its valid range.
    #[error("domain error: {0}")]
    Domain(String),

    /// Bad command-line usage or inconsistent run inputs.
    #[error("usage error: {0}")]
    Usage(String),

    /// Invalid configuration value or file.
    #[error("config error: {0}")]
    Config(String),

    /// A numerical failure (non-SPD covariance, failed factorization, ...).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A broken internal invariant (cache audit failure).
    #[error("internal error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 2 for usage/config problems, 3 for numeric ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Usage(_) | Error::Config(_) | Error::Io(_) => 2,
            Error::Numeric(_) | Error::Internal(_) => 3,
        }
    }
}
