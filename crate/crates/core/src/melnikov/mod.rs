//! The inductive Melnikov algorithm: detect the first non-relatively-exact
//! form in the sequence `ω_{j+1} = -h_j·ω`, evaluate `M_K = -∮ω_K`
//! numerically (and symbolically for small `K`), count its zeros, and
//! validate against a direct Poincaré-map integrator.

mod functional;
mod poincare;
mod sequence;
mod symbolic;
mod zeros;

pub use poincare::{displacement_coefficient, displacement_order_fit, poincare_map, OrderFit};
pub use sequence::{
    melnikov_sequence, melnikov_sequence_with, MelnikovReport, MelnikovSample, MelnikovSettings,
    OrderLog,
};
pub use symbolic::{reduce_melnikov_symbolic, MAX_SYMBOLIC_ORDER};
pub use zeros::{count_zeros, ZeroCount, ZeroCountOptions};

use crate::algebra::OneForm;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MelnikovError {
    #[error(transparent)]
    Petrov(#[from] crate::petrov::PetrovError),
    #[error(transparent)]
    Numeric(#[from] crate::numeric::NumericError),
    #[error(transparent)]
    Connection(#[from] crate::connection::ConnectionError),
    #[error(transparent)]
    Chen(#[from] crate::chen::ChenError),
    #[error(
        "all Melnikov functions up to order {k_max} vanish within tolerance; \
         the perturbation looks integrable on this nest"
    )]
    OrderExceeded { k_max: usize, log: Vec<OrderLog> },
    #[error("functional form grew past {0} terms")]
    CapacityExceeded(usize),
    #[error("symbolic reduction is limited to K <= {max}, got {got}")]
    OrderTooLarge { max: usize, got: usize },
    #[error("zero refinement stalled at the tolerance floor near p = {0}")]
    InconclusiveZero(f64),
}

/// A polynomial perturbation 1-form `ω` of `dH + εω = 0`.
#[derive(Clone, Debug)]
pub struct PerturbationForm {
    pub omega: OneForm,
    pub degree: u32,
}

impl PerturbationForm {
    pub fn new(omega: OneForm) -> Self {
        let degree = omega.deg_or_zero().max(1);
        Self { omega, degree }
    }
}
