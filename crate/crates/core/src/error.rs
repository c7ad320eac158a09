use num_rational::Rational64;
use thiserror::Error;

/// Failures surfaced by the series engine and everything built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("lowest coefficient is not a unit (+1/-1); cannot invert")]
    NonUnitLeadingCoefficient,

    #[error("query at exponent {requested} exceeds the known window (order {available})")]
    OrderExceeded {
        requested: Rational64,
        available: Rational64,
    },

    #[error("infinite product (q^{start}; q^{step})_inf does not terminate under truncation")]
    NonTerminatingProduct { start: Rational64, step: Rational64 },

    #[error("infinite sum does not terminate under truncation: {0}")]
    NonTerminatingSum(String),

    #[error("negative-eta enumeration bound could not be certified: {0}")]
    EnumerationBoundUnverified(String),

    #[error("modulus mismatch: a = q^{left} vs a = q^{right}")]
    ModulusMismatch { left: i64, right: i64 },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;
