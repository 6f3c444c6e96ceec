//! Reduction of iterated integrals of arbitrary polynomial 1-forms over a
//! level oval to combinations of basic iterated integrals, with coefficients
//! rational in the base-point coordinate `p`.
//!
//! Each non-basic slot is decomposed over the basic forms; the `f·dH` part
//! pulls back to zero on the level curve, constant-in-`h` parts become
//! polynomials in `p` through `t = H(0, p)`, and exact slots `dg` are
//! eliminated by the closed-cycle integration-by-parts rules, which strictly
//! shorten the word.

use super::ConnectionError;
use crate::algebra::{OneForm, RationalFunction, UniPoly, Var};
use crate::chen::{Word, WordBasis};
use crate::numeric::IINumericVector;
use crate::petrov::{petrov_decompose_normalized, Hamiltonian};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A finished reduction: `∮ θ_1⋯θ_k = Σ_w coeffs[w] · I_w(p)`.
#[derive(Clone, Debug)]
pub struct ReducedCombination {
    pub basis: Arc<WordBasis>,
    pub coeffs: BTreeMap<Word, RationalFunction>,
}

impl ReducedCombination {
    pub fn zero(basis: Arc<WordBasis>) -> Self {
        Self {
            basis,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, w: Word, c: RationalFunction) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = &*e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &ReducedCombination, scale: &RationalFunction) {
        for (w, c) in &other.coeffs {
            self.add_term(w.clone(), c * scale);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    /// Evaluates `Σ coeffs(p)·I_w` against a numeric integral vector.
    pub fn eval(&self, p: f64, values: &IINumericVector) -> f64 {
        self.coeffs
            .iter()
            .map(|(w, c)| c.eval_f64(p) * values.value(w))
            .sum()
    }

    /// Largest degree (num + den) among coefficients, a size diagnostic.
    pub fn max_degree(&self) -> usize {
        self.coeffs.values().map(|c| c.degree()).max().unwrap_or(0)
    }
}

fn rf_from_unipoly(u: UniPoly) -> RationalFunction {
    RationalFunction::from_poly(u)
}

/// Reduces the iterated integral of `forms` over the oval based at `(0, p)`
/// to a combination of basic iterated integrals.
pub fn reduce_iterated(
    forms: &[OneForm],
    ham: &Hamiltonian,
    basis: &Arc<WordBasis>,
) -> Result<ReducedCombination, ConnectionError> {
    if forms.len() > basis.k_max {
        return Err(ConnectionError::WordTooLong {
            len: forms.len(),
            k_max: basis.k_max,
        });
    }
    let budget = 250_000usize;
    let mut spent = 0usize;
    let mut out = ReducedCombination::zero(basis.clone());
    let one = RationalFunction::one(Var::P);
    let mut work: Vec<(RationalFunction, Vec<OneForm>)> = vec![(one, forms.to_vec())];

    while let Some((coeff, tuple)) = work.pop() {
        spent += 1;
        if spent > budget {
            return Err(ConnectionError::ReductionBudget(budget));
        }
        if coeff.is_zero() || tuple.iter().any(|w| w.is_zero()) {
            continue;
        }
        // All-basic tuples land directly in the result.
        let letters: Option<Vec<u16>> = tuple.iter().map(|w| ham.basic_index(w)).collect();
        if let Some(letters) = letters {
            out.add_term(Word(letters), coeff);
            continue;
        }
        // Leftmost non-basic slot gets decomposed.
        let slot = tuple
            .iter()
            .position(|w| ham.basic_index(w).is_none())
            .expect("non-basic slot exists");
        let dec = petrov_decompose_normalized(&tuple[slot], ham)?;
        // Basic parts: f_l(t(p)) is constant along the oval.
        for (l, fl) in dec.f_coeffs.iter().enumerate() {
            if fl.is_zero() {
                continue;
            }
            let c_p = rf_from_unipoly(fl.compose(ham.level_of_p()));
            let mut t = tuple.clone();
            t[slot] = ham.basic_forms()[l].clone();
            work.push((&coeff * &c_p, t));
        }
        // The f·dH part pulls back to zero on the level curve: dropped.
        // The dg part shortens the word by the closed-cycle rules.
        if dec.g.is_zero() {
            continue;
        }
        let g = dec.g;
        let k = tuple.len();
        if k == 1 {
            continue; // ∮ dg = 0
        }
        let g0 = rf_from_unipoly(g.restrict_x0(Var::P));
        if slot == 0 {
            // ∮ (dg) θ_1 ... = g(p₀)·∮ θ_1... − ∮ (g·θ_1) θ_2 ...
            let rest: Vec<OneForm> = tuple[1..].to_vec();
            work.push((&coeff * &g0, rest.clone()));
            let mut merged = rest;
            merged[0] = merged[0].mul_poly(&g);
            work.push((-&coeff, merged));
        } else if slot == k - 1 {
            // ∮ θ_0 ... θ_{k-2} (dg) = ∮ θ_0 ... (θ_{k-2}·g) − g(p₀)·∮ θ_0 ... θ_{k-2}
            let mut merged: Vec<OneForm> = tuple[..k - 1].to_vec();
            let last = merged.len() - 1;
            merged[last] = merged[last].mul_poly(&g);
            work.push((coeff.clone(), merged));
            work.push((-&(&coeff * &g0), tuple[..k - 1].to_vec()));
        } else {
            // ∮ ...θ_{i-1} (dg) θ_{i+1}... = ∮ ...(θ_{i-1}g) θ_{i+1}...
            //                               − ∮ ...θ_{i-1} (g θ_{i+1})...
            let mut left: Vec<OneForm> = tuple.clone();
            left.remove(slot);
            let mut right = left.clone();
            left[slot - 1] = left[slot - 1].mul_poly(&g);
            right[slot] = right[slot].mul_poly(&g);
            work.push((coeff.clone(), left));
            work.push((-&coeff, right));
        }
    }
    Ok(out)
}
