//! Symbolic-numeric machinery for Picard-Fuchs systems of iterated integrals
//! over nests of ovals of a planar polynomial Hamiltonian, and for Melnikov
//! functions of polynomial perturbations.
//!
//! The pipeline, bottom to top:
//!
//! * [`algebra`] — exact rational polynomials, rational functions and
//!   differential forms, with a documented parse/print grammar;
//! * [`linalg`] — exact elimination with cached solve transforms;
//! * [`petrov`] — Hamiltonian genericity certificates, decomposition of
//!   1-forms over the basic forms, Jacobian-ideal division and
//!   Gelfand-Leray derivatives;
//! * [`chen`] — word combinatorics and truncated tensor series for iterated
//!   integrals;
//! * [`connection`] — symbolic assembly of the connection matrix driving the
//!   vector of basic iterated integrals along the nest;
//! * [`numeric`] — oval tracing, quadrature of iterated integrals, analytic
//!   continuation and monodromy;
//! * [`melnikov`] — the inductive Melnikov algorithm, a direct Poincaré-map
//!   integrator, symbolic reduction for small orders, and zero counting.

pub mod algebra;
pub mod chen;
pub mod connection;
pub mod linalg;
pub mod melnikov;
pub mod numeric;
pub mod petrov;
