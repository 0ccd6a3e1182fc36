use thiserror::Error;

/// Errors raised by the evaluators and verifiers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: String },

    #[error("{what} did not converge within {terms} terms (partial sum {partial:e})")]
    Truncation {
        what: &'static str,
        terms: usize,
        partial: f64,
    },

    #[error("quadrature did not converge for {what}: estimated error {estimate:e}")]
    Quadrature { what: &'static str, estimate: f64 },

    #[error("zero search found {found} sign changes up to t = {height}, expected about {expected:.2}")]
    MissedZero {
        found: usize,
        expected: f64,
        height: f64,
    },

    #[error("factorization failed: {0}")]
    Singular(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("report schema mismatch: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
