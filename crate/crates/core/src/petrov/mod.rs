//! Genericity certification of the Hamiltonian, decomposition of polynomial
//! 1-forms over the basic forms modulo relatively exact ones, Jacobian-ideal
//! division and Gelfand-Leray derivatives.

mod decompose;
mod hamiltonian;
mod jacobian;

pub use decompose::{petrov_decompose, petrov_decompose_normalized, PetrovDecomposition};
pub use hamiltonian::{
    certify, certify_with_options, CertifyOptions, CriticalValue, GenericityReport, Hamiltonian,
    LevelProbe,
};
pub use jacobian::{gelfand_leray, gl_numerator, jacobian_divide};

use thiserror::Error;

#[derive(Debug, Error, Clone)]
pub enum PetrovError {
    #[error("degenerate Hamiltonian: {0}")]
    DegenerateHamiltonian(String),
    #[error(
        "decomposition failed for a form of degree {degree} (ansatz extended up to {tried_up_to})"
    )]
    DecompositionFailed { degree: u32, tried_up_to: u32 },
    #[error("no Jacobian-ideal representation within the degree ansatz: {0}")]
    MembershipFailed(String),
    #[error("Hamiltonian must have degree >= 2, got {0}")]
    DegreeTooSmall(u32),
    #[error("genericity precondition not satisfied: {0}")]
    GenericityViolation(String),
}
