use thiserror::Error;

/// Which side of zero the offending p-adic valuation fell on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValuationSign {
    Positive,
    Negative,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("residue {value} is not invertible modulo {modulus}")]
    NotInvertible { value: u64, modulus: u64 },

    #[error("p = {p} has {sign:?} valuation in {what}")]
    BadValuation {
        what: String,
        p: u64,
        sign: ValuationSign,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),

    #[error("congruence violated at p = {p}: lhs {lhs} != rhs {rhs}")]
    TheoremViolation { p: u64, lhs: u64, rhs: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn invariant<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InternalInvariantViolation(msg.into()))
}
