use thiserror::Error;

/// Errors raised by the algebra, valuation, polytope and degeneration layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("negative exponent at byte {0}")]
    NegativeExponent(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("variable lists do not match: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },
    #[error("coefficient fields do not match")]
    FieldMismatch,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("valuation of the zero polynomial is undefined")]
    ZeroPolynomial,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("subsystem is not contained in the ambient system")]
    NotSubspace,
    #[error("flag member Y_{0} lies in the base locus: restricted system is empty")]
    BaseLocus(usize),
    #[error("polytope is unbounded or has an empty description")]
    Unbounded,
    #[error("resource cap exceeded: {what} ({size} > {limit})")]
    ResourceExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
