//! Direct integration of the perturbed foliation `dH + εω = 0` and the
//! first-return (holonomy) map on the transversal.

use super::{MelnikovError, PerturbationForm};
use crate::numeric::trace::{run_to_section, FlowOptions, PolyF64};
use crate::numeric::NumericError;
use crate::petrov::Hamiltonian;
use serde::Serialize;
use std::sync::Arc;

/// First return `Δ(p, ε)` of the perturbed flow to `{x = 0}` with the same
/// crossing direction, started at `(0, p)`.
pub fn poincare_map(
    ham: &Arc<Hamiltonian>,
    omega: &PerturbationForm,
    eps: f64,
    p: f64,
) -> Result<f64, MelnikovError> {
    poincare_map_with(ham, omega, eps, p, FlowOptions::default())
}

pub fn poincare_map_with(
    ham: &Arc<Hamiltonian>,
    omega: &PerturbationForm,
    eps: f64,
    p: f64,
    opts: FlowOptions,
) -> Result<f64, MelnikovError> {
    let hx = PolyF64::new(ham.hx());
    let hy = PolyF64::new(ham.hy());
    let wp = PolyF64::new(&omega.omega.p);
    let wq = PolyF64::new(&omega.omega.q);
    // Tangent field of the foliation (H_x + εP)dx + (H_y + εQ)dy = 0.
    let rhs = move |_t: f64, y: &Vec<f64>| -> Vec<f64> {
        let (x, yy) = (y[0], y[1]);
        let vx = hy.eval(x, yy) + eps * wq.eval(x, yy);
        let vy = -(hx.eval(x, yy) + eps * wp.eval(x, yy));
        vec![vx, vy, vx.hypot(vy)]
    };
    let run = run_to_section(
        rhs,
        |_s: &mut Vec<f64>| Ok(()),
        vec![0.0, p, 0.0],
        1,
        &opts,
        false,
    )
    .map_err(|e| match e {
        NumericError::NotClosed(msg) => MelnikovError::Numeric(NumericError::NoReturn(msg)),
        other => MelnikovError::Numeric(other),
    })?;
    Ok(run.end_state[1])
}

/// Least-squares fit of `log|Δ(p,ε) − p|` against `log ε`.
#[derive(Clone, Debug, Serialize)]
pub struct OrderFit {
    pub p: f64,
    pub slope: f64,
    pub intercept: f64,
    pub eps: Vec<f64>,
    pub displacement: Vec<f64>,
    pub used: usize,
}

/// Fits the ε-order of the displacement at fixed `p` over a log-spaced grid.
/// Points with displacement below `noise_floor` are discarded.
pub fn displacement_order_fit(
    ham: &Arc<Hamiltonian>,
    omega: &PerturbationForm,
    p: f64,
    eps_lo: f64,
    eps_hi: f64,
    count: usize,
    noise_floor: f64,
) -> Result<OrderFit, MelnikovError> {
    assert!(count >= 2 && eps_lo > 0.0 && eps_hi > eps_lo);
    let mut eps_grid = Vec::with_capacity(count);
    let ratio = (eps_hi / eps_lo).powf(1.0 / (count as f64 - 1.0));
    let mut e = eps_lo;
    for _ in 0..count {
        eps_grid.push(e);
        e *= ratio;
    }
    let mut disp = Vec::with_capacity(count);
    for &e in &eps_grid {
        let d = poincare_map(ham, omega, e, p)? - p;
        disp.push(d);
    }
    // Least squares on the usable points.
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&e, &d) in eps_grid.iter().zip(&disp) {
        if d.abs() > noise_floor {
            xs.push(e.ln());
            ys.push(d.abs().ln());
        }
    }
    let used = xs.len();
    let (slope, intercept) = if used >= 2 {
        let n = used as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|v| v * v).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| a * b).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        (slope, (sy - slope * sx) / n)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(OrderFit {
        p,
        slope,
        intercept,
        eps: eps_grid,
        displacement: disp,
        used,
    })
}

/// Least-squares coefficient `c` of `Δ(p,ε) − p ≈ c·ε^K` over the grid.
pub fn displacement_coefficient(
    ham: &Arc<Hamiltonian>,
    omega: &PerturbationForm,
    p: f64,
    order: usize,
    eps_grid: &[f64],
) -> Result<f64, MelnikovError> {
    let mut num = 0.0;
    let mut den = 0.0;
    for &e in eps_grid {
        let d = poincare_map(ham, omega, e, p)? - p;
        let ek = e.powi(order as i32);
        num += d * ek;
        den += ek * ek;
    }
    Ok(num / den)
}
