//! Symbolic reduction of `M_K` to a combination of basic iterated integrals.

use super::functional::{leaf_primitive, FunctionalForm};
use super::{MelnikovError, PerturbationForm};
use crate::chen::enumerate_words;
use crate::connection::{reduce_iterated, ReducedCombination};
use crate::petrov::Hamiltonian;
use std::sync::Arc;

pub const MAX_SYMBOLIC_ORDER: usize = 3;

/// Expresses `M_K = Σ h_w(p)·I_w` over the basic words of length at most
/// `K`, by running the induction `ω_{j+1} = -h_j·ω` symbolically and
/// reducing `-∮ω_K`.
///
/// Valid as the K-th Melnikov function when the lower-order integrals
/// vanish on the nest (the theorem's hypothesis); the combination itself is
/// an identity for `-∮ω_K` regardless.
pub fn reduce_melnikov_symbolic(
    ham: &Arc<Hamiltonian>,
    omega: &PerturbationForm,
    order: usize,
) -> Result<ReducedCombination, MelnikovError> {
    if order == 0 || order > MAX_SYMBOLIC_ORDER {
        return Err(MelnikovError::OrderTooLarge {
            max: MAX_SYMBOLIC_ORDER,
            got: order,
        });
    }
    ham.require_basis_ok()?;
    let mut omega_j = FunctionalForm::from_polynomial(&omega.omega);
    for _ in 1..order {
        let h_j = leaf_primitive(&omega_j, ham)?;
        omega_j = FunctionalForm::minus_product(&h_j, &omega.omega).simplify();
    }
    let basis = enumerate_words(ham.n(), omega_j.max_word_len().max(order))?;
    let mut out = ReducedCombination::zero(basis.clone());
    for (c, tuple) in omega_j.cycle_tuples() {
        let red = reduce_iterated(&tuple, ham, &basis)?;
        out.add_scaled(&red, &-&c);
    }
    Ok(out)
}
