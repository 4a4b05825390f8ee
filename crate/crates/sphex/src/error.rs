//! Error type shared by the whole crate.

use thiserror::Error;

/// Errors produced by model validation, geometry, approximation formulas and
/// the Monte Carlo engine.
///
/// The three variants mirror the three failure classes surfaced by the `sphex`
/// command line tool: invalid input (exit 2), a method applied to a model or
/// domain it does not support (exit 3), and numerical failure (exit 4).
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter, coefficient or domain specification is out of range.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested operation does not apply to the given model or domain,
    /// e.g. the Euler characteristic approximation on a non-smooth model.
    #[error("method/model mismatch: {0}")]
    MethodMismatch(String),

    /// A numerical procedure failed (factorization, overflow guard).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn mismatch(msg: impl Into<String>) -> Self {
        Error::MethodMismatch(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
