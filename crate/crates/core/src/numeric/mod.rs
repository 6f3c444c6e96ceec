//! Numerical ground truth: trace real ovals of level curves, evaluate
//! iterated integrals by quadrature, continue the linear system along
//! complex paths, and compute monodromy.

pub mod continuation;
pub mod eig;
pub mod iterated;
pub mod rk;
pub mod roots;
pub mod trace;

pub use continuation::{
    continue_system, monodromy, nearest_root_of_unity, LinearSystem, MonodromyResult,
};
pub use iterated::{
    eval_iterated, eval_iterated_forms, eval_iterated_laps, IINumericVector, TupleIntegrals,
};
pub use trace::{trace_oval, trace_oval_with, FlowOptions, OvalTrace};

use thiserror::Error;

#[derive(Debug, Error, Clone)]
pub enum NumericError {
    #[error("orbit did not return to the section within the budget ({0})")]
    NotClosed(String),
    #[error("level drift |H - t| = {drift:.3e} exceeded tolerance {tol:.3e}")]
    LevelDrift { drift: f64, tol: f64 },
    #[error("integration failure: {0}")]
    Stiffness(#[from] rk::RkError),
    #[error("seed point is not on a closed orbit: {0}")]
    BadSeed(String),
    #[error("path comes within {dist:.3e} of a singular point (margin {margin:.3e})")]
    SingularityTooClose { dist: f64, margin: f64 },
    #[error("perturbed orbit did not return: {0}")]
    NoReturn(String),
}
