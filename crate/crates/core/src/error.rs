use thiserror::Error;

use crate::formula::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("primed atom `{atom}` is not allowed in {context}")]
    PrimedAtom { atom: String, context: &'static str },

    #[error("{what} has {size} atoms, exceeding the enumeration limit of {limit}")]
    EnumerationLimit {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The brute-force reference operators are only defined for satisfiable inputs.
    #[error("outside the oracle's domain: {0}")]
    OracleDomain(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
