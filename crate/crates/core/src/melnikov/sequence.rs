//! The order-by-order Melnikov evaluation over a sampled nest.

use super::functional::{leaf_primitive, FunctionalForm};
use super::{MelnikovError, PerturbationForm};
use crate::algebra::OneForm;
use crate::numeric::{eval_iterated_forms, trace_oval_with, FlowOptions, OvalTrace};
use crate::petrov::{petrov_decompose_normalized, Hamiltonian};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct MelnikovSettings {
    pub k_max: usize,
    /// `∮ω_j` counts as vanishing when its maximum over the nest is below
    /// this tolerance times the oval arclength scale.
    pub vanish_tol: f64,
    pub flow: FlowOptions,
}

impl Default for MelnikovSettings {
    fn default() -> Self {
        Self {
            k_max: 3,
            vanish_tol: 1e-7,
            flow: FlowOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MelnikovSample {
    pub p: f64,
    pub t: f64,
    pub value: f64,
    pub error: f64,
}

/// Per-order record of the relative-exactness decision.
#[derive(Clone, Debug, Serialize)]
pub struct OrderLog {
    pub order: usize,
    pub max_abs_integral: f64,
    pub tolerance: f64,
    pub vanished: bool,
    /// For the first order only: whether the symbolic criterion (all Petrov
    /// coefficients of ω identically zero on the level range) also holds.
    pub symbolically_exact: Option<bool>,
    /// Number of functional terms carried at this order.
    pub terms: usize,
}

#[derive(Debug)]
pub struct MelnikovReport {
    /// First order with a non-vanishing integral.
    pub order: usize,
    /// `M_K(p) = -∮ ω_K` over the sampled nest.
    pub samples: Vec<MelnikovSample>,
    pub relative_exactness_log: Vec<OrderLog>,
    /// The functional form of ω_K, for refinement at new nest points.
    pub(crate) omega_k: FunctionalForm,
    pub(crate) ham: Arc<Hamiltonian>,
    pub(crate) flow: FlowOptions,
}

impl MelnikovReport {
    /// Evaluates `M_K` at a new nest point.
    pub fn eval(&self, p: f64) -> Result<(f64, f64), MelnikovError> {
        let trace = trace_oval_with(&self.ham, p, self.flow.clone())?;
        let (value, error) = integrate_functional(&self.omega_k, &trace)?;
        Ok((-value, error))
    }

    /// CSV rows `p,t,value,error`.
    pub fn samples_csv(&self) -> String {
        let mut out = String::from("p,t,m_k,error\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e}\n",
                s.p, s.t, s.value, s.error
            ));
        }
        out
    }
}

/// `∮ ω_j` over one oval, with a propagated error estimate.
fn integrate_functional(
    form: &FunctionalForm,
    trace: &OvalTrace,
) -> Result<(f64, f64), MelnikovError> {
    let tuples: Vec<Vec<OneForm>> = form.cycle_tuples().into_iter().map(|(_, t)| t).collect();
    let ints = eval_iterated_forms(trace, &tuples, 1)?;
    let mut value = 0.0;
    let mut error = 0.0;
    for ((c, _), (v, e)) in form
        .cycle_tuples()
        .iter()
        .zip(ints.values.iter().zip(&ints.errors))
    {
        let cv = c.eval_f64(trace.base_p);
        value += cv * v;
        error += cv.abs() * e;
    }
    Ok((value, error))
}

/// Runs the induction `ω_1 = ω`, `ω_{j+1} = -h_j·ω` until the first order
/// whose integral does not vanish over the sampled nest.
pub fn melnikov_sequence(
    ham: &Arc<Hamiltonian>,
    omega: &PerturbationForm,
    k_max: usize,
    nest: &[f64],
) -> Result<MelnikovReport, MelnikovError> {
    melnikov_sequence_with(
        ham,
        omega,
        MelnikovSettings {
            k_max,
            ..Default::default()
        },
        nest,
    )
}

pub fn melnikov_sequence_with(
    ham: &Arc<Hamiltonian>,
    omega: &PerturbationForm,
    settings: MelnikovSettings,
    nest: &[f64],
) -> Result<MelnikovReport, MelnikovError> {
    assert!(!nest.is_empty(), "need at least one nest sample");
    let traces: Vec<OvalTrace> = nest
        .par_iter()
        .map(|&p| trace_oval_with(ham, p, settings.flow.clone()))
        .collect::<Result<_, _>>()?;
    let arclength_scale = traces.iter().map(|t| t.arclength).fold(1.0, f64::max);

    let mut log = Vec::new();
    let mut omega_j = FunctionalForm::from_polynomial(&omega.omega);
    for order in 1..=settings.k_max {
        let per_p: Vec<(f64, f64)> = traces
            .par_iter()
            .map(|tr| integrate_functional(&omega_j, tr))
            .collect::<Result<_, _>>()?;
        let max_abs = per_p.iter().map(|(v, _)| v.abs()).fold(0.0, f64::max);
        let tolerance = settings.vanish_tol * arclength_scale;
        let vanished = max_abs < tolerance;
        let symbolically_exact = if order == 1 {
            let dec = petrov_decompose_normalized(&omega.omega, ham)?;
            Some(dec.f_coeffs.iter().all(|f| f.is_zero()))
        } else {
            None
        };
        log.push(OrderLog {
            order,
            max_abs_integral: max_abs,
            tolerance,
            vanished,
            symbolically_exact,
            terms: omega_j.len(),
        });
        if !vanished {
            let samples = nest
                .iter()
                .zip(&per_p)
                .map(|(&p, &(v, e))| MelnikovSample {
                    p,
                    t: ham.poly().eval_f64(0.0, p),
                    value: -v,
                    error: e,
                })
                .collect();
            return Ok(MelnikovReport {
                order,
                samples,
                relative_exactness_log: log,
                omega_k: omega_j,
                ham: ham.clone(),
                flow: settings.flow.clone(),
            });
        }
        if order == settings.k_max {
            break;
        }
        // ω_j is relatively exact on the nest: restore h_j and iterate.
        let h_j = leaf_primitive(&omega_j, ham)?;
        omega_j = FunctionalForm::minus_product(&h_j, &omega.omega).simplify();
    }
    Err(MelnikovError::OrderExceeded {
        k_max: settings.k_max,
        log,
    })
}
