//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by kernel construction, spectral decomposition, risk
/// evaluation, and the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A required input was empty.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A point fell outside the kernel's domain.
    #[error("point {value} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    /// Two inputs that must agree in length or shape did not.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A truncation rank outside `1..=n`.
    #[error("rank {r} out of range 1..={n}")]
    RankOutOfRange { r: usize, n: usize },

    /// The requested truncation retains a zero eigenvalue, so the
    /// rank-`r` fit is not defined.
    #[error("rank {r} unusable: retained eigenvalue index {r} is zero")]
    ZeroEigenvalue { r: usize },

    /// The problem instance admits no meaningful answer (e.g. an all-zero
    /// spectrum handed to the lambda search).
    #[error("degenerate problem: {0}")]
    Degenerate(String),

    /// A numerical routine failed to produce a trustworthy result.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A name was not found in a strategy registry.
    #[error("unknown {kind} '{name}'; known: {known}")]
    UnknownName {
        kind: &'static str,
        name: String,
        known: String,
    },

    /// A serialized artifact could not be parsed.
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
