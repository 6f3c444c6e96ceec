//! Oval tracing: adaptive integration of the Hamiltonian flow from a seed
//! on the transversal until first return, with projection back to the level
//! set after every step.

use super::rk::{RkOptions, Stepper};
use super::NumericError;
use crate::petrov::Hamiltonian;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct FlowOptions {
    /// Local relative tolerance of the integrator.
    pub rtol: f64,
    pub atol: f64,
    /// Allowed |H - t| before projection kicks in; exceeding it aborts.
    pub level_tol: f64,
    /// Budget in flow time before declaring the orbit not closed.
    pub max_time: f64,
    /// Escape radius.
    pub bbox: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            level_tol: 1e-10,
            max_time: 1e4,
            bbox: 1e4,
        }
    }
}

/// One traced closed oval of `{H = t}` based at `(0, p)`.
#[derive(Clone, Debug)]
pub struct OvalTrace {
    pub ham: Arc<Hamiltonian>,
    pub level: f64,
    pub base_p: f64,
    pub samples: Vec<(f64, f64)>,
    pub closure_residual: f64,
    /// +1 = direction of the Hamiltonian flow (x' = H_y, y' = -H_x).
    pub orientation: i8,
    pub arclength: f64,
    /// Flow time of one full turn.
    pub period: f64,
    pub options: FlowOptions,
}

/// Compiled f64 polynomial for fast repeated evaluation.
#[derive(Clone)]
pub(crate) struct PolyF64 {
    terms: Vec<(i32, i32, f64)>,
}

impl PolyF64 {
    pub fn new(p: &crate::algebra::BivarPoly) -> Self {
        Self {
            terms: p
                .to_f64_terms()
                .into_iter()
                .map(|(i, j, c)| (i as i32, j as i32, c))
                .collect(),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(i, j, c)| c * x.powi(i) * y.powi(j))
            .sum()
    }

    /// Bound on the evaluation roundoff scale: Σ|c|·|x|^i·|y|^j.
    pub fn eval_abs(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(i, j, c)| c.abs() * x.abs().powi(i) * y.abs().powi(j))
            .sum()
    }
}

/// Everything a section run produces.
pub(crate) struct SectionRun {
    pub end_state: Vec<f64>,
    pub period: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Integrates an augmented state whose first three components are
/// `(x, y, arclength)` until the `laps`-th matching-direction crossing of
/// `{x = 0}`, refining the final crossing by Newton in time.
///
/// `rhs` must fill the full state derivative; `project`, when given, is
/// applied to the state after every accepted step (level-set correction).
pub(crate) fn run_to_section<F, P>(
    mut rhs: F,
    mut project: P,
    y0: Vec<f64>,
    laps: usize,
    opts: &FlowOptions,
    record: bool,
) -> Result<SectionRun, NumericError>
where
    F: FnMut(f64, &Vec<f64>) -> Vec<f64> + Clone,
    P: FnMut(&mut Vec<f64>) -> Result<(), NumericError>,
{
    let d0 = rhs(0.0, &y0);
    let vx0 = d0[0];
    if vx0.abs() < 1e-14 {
        return Err(NumericError::BadSeed(
            "flow is tangent to the transversal at the seed".into(),
        ));
    }
    let sign0 = vx0.signum();
    let speed0 = (d0[0] * d0[0] + d0[1] * d0[1]).sqrt();

    let rk_opts = RkOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        h_max: (0.5 / speed0.max(1e-3)).min(0.5),
        ..Default::default()
    };
    let mut st = Stepper::new(rhs.clone(), 0.0, y0.clone(), rk_opts.clone());
    let mut samples = Vec::new();
    if record {
        samples.push((y0[0], y0[1]));
    }
    let mut crossings = 0usize;
    let mut armed = false;
    let arm_dist = 1e-6;
    loop {
        let prev_t = st.t;
        let prev_y = st.y.clone();
        st.step(None)?;
        project(&mut st.y)?;
        if record {
            samples.push((st.y[0], st.y[1]));
        }
        // A crossing only counts once the orbit has left the section since
        // the previous one; otherwise the departure step would be detected.
        let was_armed = armed;
        if st.y[0].abs() > arm_dist {
            armed = true;
        }
        if st.y[0].hypot(st.y[1]) > opts.bbox {
            return Err(NumericError::NotClosed(format!(
                "orbit escaped beyond |z| = {:.1e}",
                opts.bbox
            )));
        }
        if st.t > opts.max_time {
            return Err(NumericError::NotClosed(format!(
                "no return within flow time {:.1}",
                opts.max_time
            )));
        }
        // Matching-direction crossing between prev and current step?
        let crossed = was_armed && prev_y[0].signum() != st.y[0].signum();
        if !crossed {
            continue;
        }
        let d_here = rhs(st.t, &st.y);
        if d_here[0].signum() != sign0 {
            continue;
        }
        // Newton in the step-local time from the pre-step state.
        let h_taken = st.t - prev_t;
        let mut tau = h_taken * prev_y[0] / (prev_y[0] - st.y[0]);
        let mut state_at;
        for _ in 0..8 {
            state_at =
                super::rk::integrate_to(rhs.clone(), 0.0, tau, prev_y.clone(), rk_opts.clone())?;
            let d = rhs(0.0, &state_at);
            if d[0].abs() < 1e-300 {
                break;
            }
            let delta = state_at[0] / d[0];
            tau -= delta;
            if delta.abs() < 1e-15 * (1.0 + tau.abs()) {
                break;
            }
        }
        state_at = super::rk::integrate_to(rhs.clone(), 0.0, tau, prev_y.clone(), rk_opts.clone())?;
        crossings += 1;
        if crossings == laps {
            if record {
                samples.pop();
                samples.push((state_at[0], state_at[1]));
            }
            return Ok(SectionRun {
                end_state: state_at,
                period: prev_t + tau,
                samples,
            });
        }
        // Continue from the refined crossing to keep lap boundaries sharp.
        st.t = prev_t + tau;
        state_at[0] = 0.0;
        st.y = state_at;
        armed = false;
    }
}

/// Unperturbed flow RHS: `(x, y, s)' = (H_y, -H_x, |v|)`, with any extra
/// state components left at derivative zero for the caller to fill.
pub(crate) fn hamiltonian_rhs(
    ham: &Hamiltonian,
    reversed: bool,
) -> impl FnMut(f64, &Vec<f64>) -> Vec<f64> + Clone {
    let hx = Arc::new(PolyF64::new(ham.hx()));
    let hy = Arc::new(PolyF64::new(ham.hy()));
    let sign = if reversed { -1.0 } else { 1.0 };
    move |_t: f64, y: &Vec<f64>| {
        let (x, yy) = (y[0], y[1]);
        let vx = sign * hy.eval(x, yy);
        let vy = -sign * hx.eval(x, yy);
        let mut d = vec![0.0; y.len()];
        d[0] = vx;
        d[1] = vy;
        d[2] = vx.hypot(vy);
        d
    }
}

/// Level-set projection: one or two Newton corrections along ∇H.
pub(crate) fn level_projector(
    ham: &Hamiltonian,
    t_level: f64,
    tol: f64,
) -> impl FnMut(&mut Vec<f64>) -> Result<(), NumericError> {
    let h = PolyF64::new(ham.poly());
    let hx = PolyF64::new(ham.hx());
    let hy = PolyF64::new(ham.hy());
    move |state: &mut Vec<f64>| {
        for _ in 0..3 {
            let val = h.eval(state[0], state[1]) - t_level;
            if val.abs() < 1e-15 * (1.0 + t_level.abs()) {
                break;
            }
            let gx = hx.eval(state[0], state[1]);
            let gy = hy.eval(state[0], state[1]);
            let g2 = gx * gx + gy * gy;
            if g2 < 1e-30 {
                break;
            }
            state[0] -= gx * val / g2;
            state[1] -= gy * val / g2;
        }
        // If Newton cannot restore the level the trace has genuinely left
        // it. The tolerance carries a roundoff floor: far from the origin H
        // is a difference of huge terms and cannot be evaluated to 1e-10.
        let drift = (h.eval(state[0], state[1]) - t_level).abs();
        let noise = 64.0 * f64::EPSILON * h.eval_abs(state[0], state[1]);
        let scaled_tol = tol * (1.0 + t_level.abs()) + noise;
        if drift > scaled_tol {
            return Err(NumericError::LevelDrift {
                drift,
                tol: scaled_tol,
            });
        }
        Ok(())
    }
}

/// Traces the closed oval of `{H = H(0, p_seed)}` through `(0, p_seed)`.
pub fn trace_oval(ham: &Arc<Hamiltonian>, p_seed: f64) -> Result<OvalTrace, NumericError> {
    trace_oval_with(ham, p_seed, FlowOptions::default())
}

pub fn trace_oval_with(
    ham: &Arc<Hamiltonian>,
    p_seed: f64,
    opts: FlowOptions,
) -> Result<OvalTrace, NumericError> {
    let t_level = ham.poly().eval_f64(0.0, p_seed);
    let y0 = vec![0.0, p_seed, 0.0];
    let run = run_to_section(
        hamiltonian_rhs(ham, false),
        level_projector(ham, t_level, opts.level_tol),
        y0,
        1,
        &opts,
        true,
    )?;
    let closure = run.end_state[0].hypot(run.end_state[1] - p_seed);
    Ok(OvalTrace {
        ham: ham.clone(),
        level: t_level,
        base_p: p_seed,
        samples: run.samples,
        closure_residual: closure,
        orientation: 1,
        arclength: run.end_state[2],
        period: run.period,
        options: opts,
    })
}

impl OvalTrace {
    /// The same oval traversed against the flow.
    pub fn reversed(&self) -> OvalTrace {
        let mut t = self.clone();
        t.orientation = -self.orientation;
        t.samples.reverse();
        t
    }

    /// CSV rows `x,y` of the trace samples.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in &self.samples {
            out.push_str(&format!("{x:.17e},{y:.17e}\n"));
        }
        out
    }
}
