//! Symbolic assembly of the Picard-Fuchs connection for basic iterated
//! integrals, restricted to the level direction parameterized by the base
//! point `p` on the transversal `{x = 0}`.

mod matrix;
mod reduce;

pub use matrix::{
    block_structure, build_connection, kronecker_check, kronecker_sum, Block, ConnectionMatrix,
    KroneckerOutcome, SingularPoint,
};
pub use reduce::{reduce_iterated, ReducedCombination};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConnectionError {
    #[error(transparent)]
    Petrov(#[from] crate::petrov::PetrovError),
    #[error(transparent)]
    Chen(#[from] crate::chen::ChenError),
    #[error("reduction exceeded the work budget ({0} terms)")]
    ReductionBudget(usize),
    #[error("word of length {len} does not fit the basis truncation {k_max}")]
    WordTooLong { len: usize, k_max: usize },
    #[error("connection is not lower-block-triangular at entry ({row}, {col})")]
    StructureViolation { row: usize, col: usize },
    #[error("serialized connection is malformed: {0}")]
    Malformed(String),
}
