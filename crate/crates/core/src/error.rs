use thiserror::Error;

use crate::exactlin::FieldSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid scalar `{0}`")]
    InvalidScalar(String),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),

    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("quiver has an oriented cycle through vertex `{0}`")]
    CyclicQuiver(String),

    #[error("radical computation needs characteristic 0 or p > {dim}; got {field}")]
    UnsupportedField { field: FieldSpec, dim: usize },

    #[error("semisimple quotient has a non-split simple factor ({0})")]
    NonSplit(String),

    #[error("not commutative: {0}")]
    NotCommutative(String),

    #[error("undetermined: {0}")]
    Undetermined(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
