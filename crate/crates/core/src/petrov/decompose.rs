//! Decomposition of a polynomial 1-form over the basic forms modulo
//! relatively exact forms: `θ = Σ (f_i∘H)·ω_i + f·dH + dg`.
//!
//! The linear system for a fixed ansatz degree is eliminated once and
//! cached on the Hamiltonian; each decomposition is then a single
//! transform-and-back-substitute pass, so the canonical solution (all free
//! variables zero) is a linear function of the input form.

use super::hamiltonian::{monomials_up_to, Hamiltonian};
use super::PetrovError;
use crate::algebra::{BivarPoly, OneForm, Rat, UniPoly, Var};
use crate::linalg::EchelonSolver;
use num_traits::{One, Zero};
use std::collections::HashMap;

/// The data of `θ = Σ (f_i∘H)·ω_i + f·dH + dg`.
#[derive(Clone, Debug)]
pub struct PetrovDecomposition {
    /// One univariate `f_i` in `h` per basic form.
    pub f_coeffs: Vec<UniPoly>,
    pub f: BivarPoly,
    pub g: BivarPoly,
    pub source: OneForm,
    /// Ansatz degree actually used; equals `deg θ` when the classical
    /// bound suffices, larger when the solver had to extend it.
    pub used_degree: u32,
}

impl PetrovDecomposition {
    /// `Σ (f_i∘H)ω_i + f·dH + dg`, for residual checks.
    pub fn reassemble(&self, ham: &Hamiltonian) -> OneForm {
        let mut acc = OneForm::zero();
        for (fi, w) in self.f_coeffs.iter().zip(ham.basic_forms()) {
            let c = BivarPoly::compose_univariate(fi, ham.poly());
            acc = &acc + &w.mul_poly(&c);
        }
        let dh = OneForm::new(ham.hx().clone(), ham.hy().clone());
        acc = &acc + &dh.mul_poly(&self.f);
        &acc + &OneForm::d_of(&self.g)
    }

    /// Max degree bounds `(deg f, deg g, max deg_h f_i)`.
    pub fn degrees(&self) -> (u32, u32, usize) {
        (
            self.f.deg_or_zero(),
            self.g.deg_or_zero(),
            self.f_coeffs
                .iter()
                .map(|f| f.deg_or_zero())
                .max()
                .unwrap_or(0),
        )
    }

    /// The coefficients `f_i` evaluated at `t = H(0,p)`, as polynomials in `p`.
    pub fn f_coeffs_in_p(&self, ham: &Hamiltonian) -> Vec<UniPoly> {
        self.f_coeffs
            .iter()
            .map(|fi| fi.compose(ham.level_of_p()))
            .collect()
    }
}

/// Column layout: `[f monomials | g monomials (no constant) | f_i coeffs]`.
///
/// The relatively-exact block comes first so that, with free variables set
/// to zero, anything expressible as `f·dH + dg` is absorbed there and the
/// basic-form coefficients stay minimal.
pub struct DecompSolver {
    degree: u32,
    fh_deg: usize,
    f_monos: Vec<(u32, u32)>,
    g_monos: Vec<(u32, u32)>,
    n_basic: usize,
    eq_dx_index: HashMap<(u32, u32), usize>,
    eq_dy_index: HashMap<(u32, u32), usize>,
    n_rows: usize,
    dy_offset: usize,
    solver: EchelonSolver,
}

impl DecompSolver {
    pub fn build(ham: &Hamiltonian, degree: u32) -> Self {
        let n = ham.n() as u32;
        let fh_deg = (degree / (n + 1)) as usize;
        let f_monos = monomials_up_to(degree);
        let g_monos: Vec<_> = monomials_up_to(degree)
            .into_iter()
            .filter(|&m| m != (0, 0))
            .collect();
        let n_basic = ham.n_basic();

        let basic_max_deg = ham
            .basic_forms()
            .iter()
            .map(|w| w.deg_or_zero())
            .max()
            .unwrap_or(0);
        let e_dx = (degree + ham.hx().deg_or_zero())
            .max(fh_deg as u32 * (n + 1) + basic_max_deg)
            .max(degree.saturating_sub(1));
        let e_dy = (degree + ham.hy().deg_or_zero()).max(degree.saturating_sub(1));

        let eq_dx: Vec<_> = monomials_up_to(e_dx);
        let eq_dy: Vec<_> = monomials_up_to(e_dy);
        let eq_dx_index: HashMap<_, _> = eq_dx.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let eq_dy_index: HashMap<_, _> = eq_dy.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let dy_offset = eq_dx.len();
        let n_rows = eq_dx.len() + eq_dy.len();

        let n_cols = f_monos.len() + g_monos.len() + n_basic * (fh_deg + 1);
        let mut mat = vec![vec![Rat::zero(); n_cols]; n_rows];
        let set = |mat: &mut Vec<Vec<Rat>>, row: usize, col: usize, v: Rat| {
            mat[row][col] = v;
        };

        // f-block: f·dH contributes f_mono*Hx to dx and f_mono*Hy to dy.
        for (u, &(a, b)) in f_monos.iter().enumerate() {
            let mono = BivarPoly::monomial(Rat::one(), a, b);
            for (&(i, j), c) in (&mono * ham.hx()).iter() {
                set(&mut mat, eq_dx_index[&(i, j)], u, c.clone());
            }
            for (&(i, j), c) in (&mono * ham.hy()).iter() {
                set(&mut mat, dy_offset + eq_dy_index[&(i, j)], u, c.clone());
            }
        }
        // g-block: dg contributes ∂x to dx-rows and ∂y to dy-rows.
        let g_off = f_monos.len();
        for (u, &(a, b)) in g_monos.iter().enumerate() {
            if a > 0 {
                set(
                    &mut mat,
                    eq_dx_index[&(a - 1, b)],
                    g_off + u,
                    Rat::from_integer(a.into()),
                );
            }
            if b > 0 {
                set(
                    &mut mat,
                    dy_offset + eq_dy_index[&(a, b - 1)],
                    g_off + u,
                    Rat::from_integer(b.into()),
                );
            }
        }
        // f_i-block: H^k · ω_i lands in dx-rows only (basic forms are dx-forms).
        let fi_off = g_off + g_monos.len();
        let mut h_pow = BivarPoly::one();
        let mut h_powers = vec![h_pow.clone()];
        for _ in 0..fh_deg {
            h_pow = &h_pow * ham.poly();
            h_powers.push(h_pow.clone());
        }
        for (bi, w) in ham.basic_forms().iter().enumerate() {
            for (k, hp) in h_powers.iter().enumerate() {
                let col = fi_off + bi * (fh_deg + 1) + k;
                for (&(i, j), c) in (hp * &w.p).iter() {
                    set(&mut mat, eq_dx_index[&(i, j)], col, c.clone());
                }
            }
        }

        let solver = EchelonSolver::new(mat);
        Self {
            degree,
            fh_deg,
            f_monos,
            g_monos,
            n_basic,
            eq_dx_index,
            eq_dy_index,
            n_rows,
            dy_offset,
            solver,
        }
    }

    pub fn rank(&self) -> usize {
        self.solver.rank()
    }

    pub fn unknowns(&self) -> usize {
        self.solver.ncols()
    }

    pub fn equations(&self) -> usize {
        self.n_rows
    }

    fn rhs(&self, theta: &OneForm) -> Option<Vec<Rat>> {
        let mut b = vec![Rat::zero(); self.n_rows];
        for (&(i, j), c) in theta.p.iter() {
            b[*self.eq_dx_index.get(&(i, j))?] = c.clone();
        }
        for (&(i, j), c) in theta.q.iter() {
            b[self.dy_offset + *self.eq_dy_index.get(&(i, j))?] = c.clone();
        }
        Some(b)
    }

    fn solve(&self, theta: &OneForm) -> Option<PetrovDecomposition> {
        let b = self.rhs(theta)?;
        let x = self.solver.solve(&b)?;
        let mut f = BivarPoly::zero();
        for (u, &(i, j)) in self.f_monos.iter().enumerate() {
            f.insert_add((i, j), x[u].clone());
        }
        let g_off = self.f_monos.len();
        let mut g = BivarPoly::zero();
        for (u, &(i, j)) in self.g_monos.iter().enumerate() {
            g.insert_add((i, j), x[g_off + u].clone());
        }
        let fi_off = g_off + self.g_monos.len();
        let mut f_coeffs = Vec::with_capacity(self.n_basic);
        for bi in 0..self.n_basic {
            let coeffs: Vec<Rat> = (0..=self.fh_deg)
                .map(|k| x[fi_off + bi * (self.fh_deg + 1) + k].clone())
                .collect();
            f_coeffs.push(UniPoly::from_coeffs(Var::H, coeffs));
        }
        Some(PetrovDecomposition {
            f_coeffs,
            f,
            g,
            source: theta.clone(),
            used_degree: self.degree,
        })
    }
}

/// Moves weight on relatively-exact basic forms into the `f·dH + dg` part:
/// with `ω_l = f*·dH + dg*`, the term `f_l(H)·ω_l` rewrites exactly as
/// `[f_l(H)·f* − f_l'(H)·g*]·dH + d(f_l(H)·g*)`.
fn normalize_rel_exact(dec: &mut PetrovDecomposition, ham: &Hamiltonian) {
    for (l, fi) in dec.f_coeffs.iter_mut().enumerate() {
        if fi.is_zero() {
            continue;
        }
        let Some((fw, gw)) = ham.rel_exact_basic((l + 1) as u16) else {
            continue;
        };
        let fl_h = BivarPoly::compose_univariate(fi, ham.poly());
        let dfl_h = BivarPoly::compose_univariate(&fi.derivative(), ham.poly());
        dec.f = &dec.f + &(&(&fl_h * fw) - &(&dfl_h * gw));
        dec.g = &dec.g + &(&fl_h * gw);
        *fi = UniPoly::zero(Var::H);
    }
}

pub(crate) fn petrov_decompose_unchecked(
    theta: &OneForm,
    ham: &Hamiltonian,
) -> Result<PetrovDecomposition, PetrovError> {
    let d = theta.deg_or_zero();
    let cap = d + ham.ansatz_slack();
    let mut degree = d;
    loop {
        let solver = ham.solver_for(degree);
        if let Some(dec) = solver.solve(theta) {
            debug_assert!(
                (&dec.reassemble(ham) - theta).is_zero(),
                "decomposition residual must vanish exactly"
            );
            return Ok(dec);
        }
        degree += 1;
        if degree > cap {
            return Err(PetrovError::DecompositionFailed {
                degree: d,
                tried_up_to: cap,
            });
        }
    }
}

/// Decomposes `θ` over the basic forms of a certified Hamiltonian: the
/// canonical solution of the decomposition system (free variables zero,
/// graded-lex column order with the relatively-exact block first).
///
/// The ansatz starts at `deg f, g <= deg θ`, `deg_h f_i·(n+1) <= deg θ` and
/// is extended degree by degree when the system is inconsistent at those
/// bounds; `used_degree` records the result.
pub fn petrov_decompose(
    theta: &OneForm,
    ham: &Hamiltonian,
) -> Result<PetrovDecomposition, PetrovError> {
    ham.require_basis_ok()?;
    petrov_decompose_unchecked(theta, ham)
}

/// Like [`petrov_decompose`], then moves any weight on basic forms that are
/// themselves relatively exact into the `f·dH + dg` part. On Hamiltonians
/// that are degenerate at infinity this keeps the basic coefficients free of
/// gauge directions, which the connection's block structure relies on.
pub fn petrov_decompose_normalized(
    theta: &OneForm,
    ham: &Hamiltonian,
) -> Result<PetrovDecomposition, PetrovError> {
    let mut dec = petrov_decompose(theta, ham)?;
    normalize_rel_exact(&mut dec, ham);
    debug_assert!(
        (&dec.reassemble(ham) - theta).is_zero(),
        "normalization must preserve the identity"
    );
    Ok(dec)
}
