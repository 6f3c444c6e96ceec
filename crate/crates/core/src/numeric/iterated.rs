//! Quadrature of iterated integrals along traced ovals.
//!
//! A word `(θ_1, ..., θ_k)` is integrated by the nested-primitive rule: the
//! running value of every suffix word rides along in the augmented flow
//! state, `A'_{(θ_1,...,θ_k)} = θ_1(γ') · A_{(θ_2,...,θ_k)}`, with
//! `A_{()} = 1`. Error estimates come from a second run at a coarser
//! tolerance (step doubling in effect).

use super::trace::{hamiltonian_rhs, level_projector, run_to_section, OvalTrace, PolyF64};
use super::NumericError;
use crate::algebra::OneForm;
use crate::chen::{Word, WordBasis};
use std::sync::Arc;

struct FormF64 {
    p: PolyF64,
    q: PolyF64,
}

impl FormF64 {
    fn new(w: &OneForm) -> Self {
        Self {
            p: PolyF64::new(&w.p),
            q: PolyF64::new(&w.q),
        }
    }

    fn eval_on(&self, x: f64, y: f64, vx: f64, vy: f64) -> f64 {
        self.p.eval(x, y) * vx + self.q.eval(x, y) * vy
    }
}

/// A suffix-closed collection of form tuples; index 0 is the empty tuple.
pub(crate) struct TupleSet {
    forms: Vec<OneForm>,
    compiled: Vec<FormF64>,
    /// Per tuple (skipping the empty one at index 0): (head form, suffix tuple).
    links: Vec<(usize, usize)>,
    index: std::collections::HashMap<Vec<usize>, usize>,
}

impl TupleSet {
    pub fn new() -> Self {
        let mut index = std::collections::HashMap::new();
        index.insert(Vec::new(), 0);
        Self {
            forms: Vec::new(),
            compiled: Vec::new(),
            links: Vec::new(),
            index,
        }
    }

    fn form_id(&mut self, w: &OneForm) -> usize {
        if let Some(i) = self.forms.iter().position(|f| f == w) {
            return i;
        }
        self.forms.push(w.clone());
        self.compiled.push(FormF64::new(w));
        self.forms.len() - 1
    }

    /// Registers a tuple (and all its suffixes); returns its index.
    pub fn insert(&mut self, tuple: &[OneForm]) -> usize {
        let ids: Vec<usize> = tuple.iter().map(|w| self.form_id(w)).collect();
        self.insert_ids(&ids)
    }

    fn insert_ids(&mut self, ids: &[usize]) -> usize {
        if let Some(&i) = self.index.get(ids) {
            return i;
        }
        let suffix = self.insert_ids(&ids[1..]);
        self.links.push((ids[0], suffix));
        let idx = self.links.len(); // tuple indices are 1-based over links
        self.index.insert(ids.to_vec(), idx);
        idx
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    /// Derivatives of the integral components given the point and velocity.
    /// `a` holds the running values (same indexing, `a[0] = 1`).
    fn derivs(&self, x: f64, y: f64, vx: f64, vy: f64, a: &[f64], out: &mut [f64]) {
        for (k, &(form, suffix)) in self.links.iter().enumerate() {
            out[k] = self.compiled[form].eval_on(x, y, vx, vy) * a[suffix];
        }
    }
}

/// Values and error estimates for a set of requested tuples.
pub struct TupleIntegrals {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

/// Numeric vector of all basic iterated integrals over one oval.
#[derive(Clone, Debug)]
pub struct IINumericVector {
    pub basis: Arc<WordBasis>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

impl IINumericVector {
    pub fn value(&self, w: &Word) -> f64 {
        self.values[self.basis.index_of(w).expect("word in basis")]
    }

    pub fn error(&self, w: &Word) -> f64 {
        self.errors[self.basis.index_of(w).expect("word in basis")]
    }
}

/// Integrates the tuple set along `laps` turns of the oval; the state is
/// `[x, y, s, A_1..A_m]`.
fn run_tuples(
    trace: &OvalTrace,
    set: &TupleSet,
    laps: usize,
    rtol: f64,
) -> Result<(Vec<f64>, f64), NumericError> {
    let ham = &trace.ham;
    let reversed = trace.orientation < 0;
    let mut base_rhs = hamiltonian_rhs(ham, reversed);
    let m = set.len();
    let rhs = {
        move |t: f64, y: &Vec<f64>| -> Vec<f64> {
            let mut d = base_rhs(t, &y[..3].to_vec());
            d.resize(3 + m, 0.0);
            let (vx, vy) = (d[0], d[1]);
            // a[0] = 1 for the empty tuple, then the running components.
            let mut a = Vec::with_capacity(m + 1);
            a.push(1.0);
            a.extend_from_slice(&y[3..]);
            let mut out = vec![0.0; m];
            set.derivs(y[0], y[1], vx, vy, &a, &mut out);
            d[3..].copy_from_slice(&out);
            d
        }
    };
    let mut y0 = vec![0.0; 3 + m];
    y0[1] = trace.base_p;
    let mut opts = trace.options.clone();
    opts.rtol = rtol;
    opts.max_time = opts.max_time.max(trace.period * (laps as f64) * 4.0);
    let run = run_to_section(
        rhs,
        level_projector(ham, trace.level, opts.level_tol),
        y0,
        laps,
        &opts,
        false,
    )?;
    Ok((run.end_state[3..].to_vec(), run.end_state[2]))
}

/// Evaluates iterated integrals of arbitrary polynomial-form tuples over the
/// oval (traversed `laps` times).
pub fn eval_iterated_forms(
    trace: &OvalTrace,
    tuples: &[Vec<OneForm>],
    laps: usize,
) -> Result<TupleIntegrals, NumericError> {
    let mut set = TupleSet::new();
    let requested: Vec<usize> = tuples.iter().map(|t| set.insert(t)).collect();
    let rtol = trace.options.rtol;
    let (fine, arc) = run_tuples(trace, &set, laps, rtol)?;
    let (coarse, _) = run_tuples(trace, &set, laps, (rtol * 200.0).min(1e-6))?;
    let floor = 1e-14 * (1.0 + arc);
    let mut values = Vec::with_capacity(requested.len());
    let mut errors = Vec::with_capacity(requested.len());
    for &idx in &requested {
        if idx == 0 {
            values.push(1.0);
            errors.push(0.0);
            continue;
        }
        values.push(fine[idx - 1]);
        errors.push((fine[idx - 1] - coarse[idx - 1]).abs() + floor);
    }
    Ok(TupleIntegrals { values, errors })
}

/// Integrates the augmented system from the seed to `frac` of the period
/// and returns the running values of the requested tuples. Open-path values
/// like these drive the leafwise-calculus tests.
#[doc(hidden)]
pub fn integrate_words_partial(
    ham: &Arc<crate::petrov::Hamiltonian>,
    p_seed: f64,
    frac: f64,
    tuples: &[Vec<OneForm>],
) -> Result<Vec<f64>, NumericError> {
    let trace = super::trace_oval(ham, p_seed)?;
    let mut set = TupleSet::new();
    let requested: Vec<usize> = tuples.iter().map(|t| set.insert(t)).collect();
    let m = set.len();
    let mut base_rhs = hamiltonian_rhs(ham, false);
    let rhs = move |t: f64, y: &Vec<f64>| -> Vec<f64> {
        let mut d = base_rhs(t, &y[..3].to_vec());
        d.resize(3 + m, 0.0);
        let (vx, vy) = (d[0], d[1]);
        let mut a = Vec::with_capacity(m + 1);
        a.push(1.0);
        a.extend_from_slice(&y[3..]);
        let mut out = vec![0.0; m];
        set.derivs(y[0], y[1], vx, vy, &a, &mut out);
        d[3..].copy_from_slice(&out);
        d
    };
    let mut y0 = vec![0.0; 3 + m];
    y0[1] = p_seed;
    let end = super::rk::integrate_to(
        rhs,
        0.0,
        frac * trace.period,
        y0,
        super::rk::RkOptions {
            rtol: 1e-12,
            atol: 1e-14,
            ..Default::default()
        },
    )?;
    Ok(requested
        .iter()
        .map(|&i| if i == 0 { 1.0 } else { end[3 + i - 1] })
        .collect())
}

/// Word tuples of the basic forms for every word in the basis.
fn basic_tuples(trace: &OvalTrace, basis: &WordBasis) -> Vec<Vec<OneForm>> {
    basis
        .words()
        .iter()
        .map(|w| {
            w.letters()
                .iter()
                .map(|&l| trace.ham.basic_form(l).clone())
                .collect()
        })
        .collect()
}

/// Evaluates all basic iterated integrals of the word basis over the oval.
pub fn eval_iterated(
    trace: &OvalTrace,
    basis: &Arc<WordBasis>,
) -> Result<IINumericVector, NumericError> {
    eval_iterated_laps(trace, basis, 1)
}

/// Same, over the oval traversed `laps` times (the doubled-cycle series).
pub fn eval_iterated_laps(
    trace: &OvalTrace,
    basis: &Arc<WordBasis>,
    laps: usize,
) -> Result<IINumericVector, NumericError> {
    let tuples = basic_tuples(trace, basis);
    let ints = eval_iterated_forms(trace, &tuples, laps)?;
    Ok(IINumericVector {
        basis: basis.clone(),
        values: ints.values,
        errors: ints.errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_bivar;
    use crate::chen::enumerate_words;
    use crate::numeric::trace_oval;
    use crate::petrov::certify;
    use std::f64::consts::PI;

    #[test]
    fn circle_basic_integrals() {
        // ∮ y dx = πp² with the flow orientation; I_(1,1) = I²/2.
        let ham = certify(&parse_bivar("1/2*x^2 + 1/2*y^2").unwrap()).unwrap();
        let basis = enumerate_words(1, 2).unwrap();
        for p in [0.7, 1.0, 1.5] {
            let tr = trace_oval(&ham, p).unwrap();
            let v = eval_iterated(&tr, &basis).unwrap();
            assert_eq!(v.values[0], 1.0);
            let want = PI * p * p;
            assert!(
                (v.values[1] - want).abs() < 1e-9 * want,
                "I_(1)({p}) = {} vs {want}",
                v.values[1]
            );
            let want11 = want * want / 2.0;
            assert!((v.values[2] - want11).abs() < 1e-8 * want11);
            assert!(v.errors[1] < 1e-8);
        }
    }

    #[test]
    fn reversed_orientation_flips_sign() {
        let ham = certify(&parse_bivar("1/2*x^2 + 1/2*y^2").unwrap()).unwrap();
        let basis = enumerate_words(1, 1).unwrap();
        let tr = trace_oval(&ham, 1.0).unwrap();
        let v = eval_iterated(&tr, &basis).unwrap();
        let vr = eval_iterated(&tr.reversed(), &basis).unwrap();
        assert!((v.values[1] + vr.values[1]).abs() < 1e-9);
    }

    #[test]
    fn doubled_oval_is_group_square() {
        use crate::chen::TruncatedSeries;
        let ham = certify(&parse_bivar("1/2*y^2 + 1/3*x^3 - x").unwrap()).unwrap();
        let basis = enumerate_words(2, 2).unwrap();
        let tr = trace_oval(&ham, 0.8).unwrap();
        let single = eval_iterated(&tr, &basis).unwrap();
        let double = eval_iterated_laps(&tr, &basis, 2).unwrap();
        let s = TruncatedSeries::from_coeffs(basis.clone(), single.values.clone());
        let sq = s.truncated_product(&s).unwrap();
        for (i, (a, b)) in sq.coeffs.iter().zip(&double.values).enumerate() {
            assert!(
                (a - b).abs() < 1e-7 * (1.0 + b.abs()),
                "word {}: {} vs {}",
                basis.word(i),
                a,
                b
            );
        }
    }
}
