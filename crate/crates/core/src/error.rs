//! Error types shared across the crate.

use thiserror::Error;

/// Errors surfaced by the samplers, analytic engine and experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A truncated product/series or quadrature failed to reach its tolerance.
    #[error("numerical nonconvergence: {0}")]
    Nonconvergence(String),

    /// Division or ratio requested where the denominator is numerically zero.
    #[error("domain error: {0}")]
    Domain(String),

    /// Configuration file violates the schema; every violation is listed.
    #[error("configuration error:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code mapping used by the CLI: 1 config, 2 numerical, 3 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::Config(_) | Error::Json(_) => 1,
            Error::Nonconvergence(_) | Error::Domain(_) => 2,
            Error::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
