//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by constructors and operations of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The modulus is not a prime number.
    #[error("{0} is not prime")]
    NotPrime(u64),
    /// The prime is not congruent to 1 mod 4, so the Paley graph is undefined.
    #[error("p = {0} is not congruent to 1 mod 4; Paley structure requires p = 1 (mod 4)")]
    NotOneModFour(u64),
    /// A character index outside `0..=p-2`.
    #[error("character index {index} out of range for p = {p} (expected 0..={max})")]
    CharacterIndex { index: usize, p: u64, max: usize },
    /// The trivial character was passed where a non-trivial one is required.
    #[error("the trivial character is not allowed here")]
    TrivialCharacter,
    /// A zero argument where a unit of F_p is required (e.g. Kloosterman sums).
    #[error("argument must be a nonzero residue mod p")]
    ZeroArgument,
    /// A polynomial was the zero polynomial or had degree zero.
    #[error("polynomial must be nonzero with degree at least 1")]
    DegeneratePolynomial,
    /// Invalid parameter with an explanation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Unknown graph-matrix shape name.
    #[error("unknown graph-matrix shape `{0}`")]
    UnknownShape(String),
    /// Problem exceeds the configured size limit.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    /// A numerical routine failed (eigensolver, factorisation, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Input/output or parse failure in the harness.
    #[error("i/o error: {0}")]
    Io(String),
}

/// Convenient result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
