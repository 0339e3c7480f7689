//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("degree-zero polynomial has no roots")]
    NoRoots,
    #[error("complex root {0} has no conjugate partner")]
    UnpairedComplexRoot(String),
    #[error("root finding did not converge after {0} iterations")]
    RootsNotConverged(usize),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("dc gain is indeterminate (0/0)")]
    IndeterminateDcGain,
    #[error("transfer function is improper (numerator degree exceeds denominator)")]
    ImproperTransferFunction,
    #[error("need at least two poles, found {0}")]
    TooFewPoles(usize),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("feedback denominator is identically zero")]
    DegenerateFeedback,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("frequency {0} is at or above the Nyquist rate {1}")]
    AboveNyquist(f64, f64),
    #[error("horizon too short: final 10% of the series still varies by {0:.3}%")]
    HorizonTooShort(f64),
    #[error("series does not settle")]
    NonSettling,
    #[error("state became non-finite at t = {0}")]
    NonFiniteState(f64),
    #[error("empty data: {0}")]
    EmptyData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
