use thiserror::Error;

use crate::arith::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("exponent {0} is not positive")]
    NonPositiveExponent(Rat),
    #[error("entries {0} and {1} lie in the same Galois orbit")]
    DuplicateOrbit(usize, usize),
    #[error("multiplicities must be positive")]
    ZeroMultiplicity,
    #[error("ramification {ram} does not divide {r}")]
    RamMismatch { ram: u64, r: u64 },
    #[error("malformed level datum: {0}")]
    MalformedLevelDatum(String),
    #[error("pointed irregular type is not compatible")]
    NotCompatible,
    #[error("not a realisation: {0}")]
    NotRealisation(String),
    #[error("coefficient map is not defined on exactly the admissible vertices")]
    DomainMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("Katz bound {0} is below the Katz rank of the tree")]
    KatzBelowTree(Rat),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("search bounds too large: {0}")]
    BoundsTooLarge(String),
}

impl Error {
    /// Stable machine-readable name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::Syntax { .. } => "SyntaxError",
            Error::NonPositiveExponent(_) => "NonPositiveExponent",
            Error::DuplicateOrbit(..) => "DuplicateOrbit",
            Error::ZeroMultiplicity => "ZeroMultiplicity",
            Error::RamMismatch { .. } => "RamMismatch",
            Error::MalformedLevelDatum(_) => "MalformedLevelDatum",
            Error::NotCompatible => "NotCompatible",
            Error::NotRealisation(_) => "NotRealisation",
            Error::DomainMismatch => "DomainMismatch",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::KatzBelowTree(_) => "KatzBelowTree",
            Error::InvalidTree(_) => "InvalidTree",
            Error::BoundsTooLarge(_) => "BoundsTooLarge",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
