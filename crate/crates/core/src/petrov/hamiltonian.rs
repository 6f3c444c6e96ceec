//! The certified Hamiltonian: basic forms, the critical-value polynomial
//! `m(h)`, a Jacobian-ideal witness for it, and genericity diagnostics.

use super::decompose::DecompSolver;
use super::PetrovError;
use crate::algebra::{BivarPoly, OneForm, Rat, UniPoly, Var};
use crate::linalg::{char_poly, rref, EchelonSolver};
use crate::numeric::roots::unipoly_roots;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// One numerically located critical value with a residual-based error radius.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalValue {
    pub re: f64,
    pub im: f64,
    pub radius: f64,
}

/// Smoothness/transversality probe of a single level set.
#[derive(Clone, Debug, Serialize)]
pub struct LevelProbe {
    pub t: f64,
    pub smooth: bool,
    pub transversal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityReport {
    pub morse_distinct: bool,
    pub critical_values: Vec<CriticalValue>,
    pub petrov_basis_ok: bool,
    /// Rank witness of the decomposition system at the probe degree:
    /// `(rank, unknowns, equations)`.
    pub petrov_rank: (usize, usize, usize),
    pub transversal_ok: bool,
    pub smooth_level: bool,
    pub level_probes: Vec<LevelProbe>,
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    /// Levels at which smoothness/transversality of `{H = t}` is probed.
    /// Default: midpoints between consecutive real critical values plus
    /// points outside their range.
    pub probe_levels: Option<Vec<f64>>,
    /// Relative tolerance for critical-value collision.
    pub collision_tol: f64,
    /// Degree up to which monomial forms are probed for decomposability.
    pub basis_probe_degree: u32,
    /// How far the decomposition ansatz may be extended beyond the form
    /// degree before reporting failure.
    pub ansatz_slack: u32,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            probe_levels: None,
            collision_tol: 1e-10,
            basis_probe_degree: 0, // filled from n at certify time
            ansatz_slack: 0,
        }
    }
}

/// A degree-(n+1) Hamiltonian with cached certificates and solvers.
///
/// Immutable after construction; the solver cache behind a mutex makes it
/// shareable across parallel workers.
pub struct Hamiltonian {
    poly: BivarPoly,
    n: usize,
    basic_forms: Vec<OneForm>,
    m: UniPoly,
    level_offset: Rat,
    hx: BivarPoly,
    hy: BivarPoly,
    /// Witness `m(H) = jac_a·H_x + jac_b·H_y`.
    jac_a: BivarPoly,
    jac_b: BivarPoly,
    h_transversal: UniPoly,
    hy_transversal: UniPoly,
    /// For each basic form that is itself relatively exact (possible when H
    /// is degenerate at infinity), a witness `ω_l = f*·dH + dg*`. Used to
    /// normalize decompositions so the basic part never carries such forms.
    rel_exact_basics: Vec<Option<(BivarPoly, BivarPoly)>>,
    genericity: GenericityReport,
    ansatz_slack: u32,
    solvers: Mutex<HashMap<u32, Arc<DecompSolver>>>,
}

impl Hamiltonian {
    pub fn poly(&self) -> &BivarPoly {
        &self.poly
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_basic(&self) -> usize {
        self.n * self.n
    }

    pub fn basic_forms(&self) -> &[OneForm] {
        &self.basic_forms
    }

    pub fn basic_form(&self, letter: u16) -> &OneForm {
        &self.basic_forms[(letter - 1) as usize]
    }

    /// Letter (1-based) of a form that is exactly one of the basic forms.
    pub fn basic_index(&self, w: &OneForm) -> Option<u16> {
        if !w.q.is_zero() {
            return None;
        }
        self.basic_forms
            .iter()
            .position(|b| b == w)
            .map(|i| (i + 1) as u16)
    }

    /// The critical-value polynomial `m(h)`, monic, roots = critical values
    /// with multiplicity.
    pub fn m(&self) -> &UniPoly {
        &self.m
    }

    /// `H(0,0)`, the level offset λ00.
    pub fn level_offset(&self) -> &Rat {
        &self.level_offset
    }

    pub fn hx(&self) -> &BivarPoly {
        &self.hx
    }

    pub fn hy(&self) -> &BivarPoly {
        &self.hy
    }

    pub fn jacobian_witness(&self) -> (&BivarPoly, &BivarPoly) {
        (&self.jac_a, &self.jac_b)
    }

    /// Relatively-exact witness of the `l`-th basic form (1-based), if any.
    pub fn rel_exact_basic(&self, letter: u16) -> Option<&(BivarPoly, BivarPoly)> {
        self.rel_exact_basics[(letter - 1) as usize].as_ref()
    }

    /// `t(p) = H(0, p)` as a polynomial in `p`.
    pub fn level_of_p(&self) -> &UniPoly {
        &self.h_transversal
    }

    /// `H_y(0, p)` as a polynomial in `p` (the chain-rule factor `dt/dp`).
    pub fn hy_of_p(&self) -> &UniPoly {
        &self.hy_transversal
    }

    /// `m(t(p))` as a polynomial in `p`.
    pub fn m_of_p(&self) -> UniPoly {
        self.m.compose(&self.h_transversal)
    }

    pub fn genericity(&self) -> &GenericityReport {
        &self.genericity
    }

    pub fn require_basis_ok(&self) -> Result<(), PetrovError> {
        if self.genericity.petrov_basis_ok {
            Ok(())
        } else {
            Err(PetrovError::GenericityViolation(
                "petrov_basis_ok is false for this Hamiltonian".into(),
            ))
        }
    }

    pub(crate) fn ansatz_slack(&self) -> u32 {
        self.ansatz_slack
    }

    pub(crate) fn solver_for(&self, degree: u32) -> Arc<DecompSolver> {
        let mut cache = self.solvers.lock().expect("solver cache poisoned");
        cache
            .entry(degree)
            .or_insert_with(|| Arc::new(DecompSolver::build(self, degree)))
            .clone()
    }

    /// Numeric preimages `p` of `H(0, p) = c` in the complex plane.
    pub fn level_preimages(&self, c: num_complex::Complex64) -> Vec<num_complex::Complex64> {
        crate::numeric::roots::poly_roots_shifted(&self.h_transversal.coeffs_f64(), c)
    }
}

impl std::fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Hamiltonian(n={}, H={}, m={})",
            self.n, self.poly, self.m
        )
    }
}

/// Monomials of total degree at most `d` in graded-lex order, x before y:
/// degree ascending, then x-exponent descending.
pub(crate) fn monomials_up_to(d: u32) -> Vec<(u32, u32)> {
    let mut v = Vec::new();
    for total in 0..=d {
        for i in (0..=total).rev() {
            v.push((i, total - i));
        }
    }
    v
}

/// Builds the normal-form reducer for the Jacobian ideal slice of degree `d`:
/// RREF rows over monomials ordered degree-descending.
struct JacQuotient {
    /// Column order: monomials of degree <= d, highest degree first.
    cols: Vec<(u32, u32)>,
    col_index: HashMap<(u32, u32), usize>,
    rref_rows: Vec<Vec<Rat>>,
    rref_pivots: Vec<usize>,
    /// Non-pivot columns = quotient basis monomials.
    quotient: Vec<(u32, u32)>,
}

impl JacQuotient {
    fn build(hx: &BivarPoly, hy: &BivarPoly, d: u32) -> Self {
        let mut cols = monomials_up_to(d);
        cols.reverse(); // highest degree first
        let col_index: HashMap<_, _> = cols.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut rows = Vec::new();
        for gen in [hx, hy] {
            let gd = gen.deg_or_zero();
            if gen.is_zero() {
                continue;
            }
            for (a, b) in monomials_up_to(d.saturating_sub(gd)) {
                let prod = gen * &BivarPoly::monomial(Rat::one(), a, b);
                let mut row = vec![Rat::zero(); cols.len()];
                for (&(i, j), c) in prod.iter() {
                    row[col_index[&(i, j)]] = c.clone();
                }
                rows.push(row);
            }
        }
        let (rref_rows, rref_pivots) = rref(rows);
        let pivot_set: std::collections::HashSet<usize> = rref_pivots.iter().copied().collect();
        let quotient: Vec<(u32, u32)> = cols
            .iter()
            .enumerate()
            .filter(|(i, _)| !pivot_set.contains(i))
            .map(|(_, m)| *m)
            .collect();
        Self {
            cols,
            col_index,
            rref_rows,
            rref_pivots,
            quotient,
        }
    }

    /// Coordinates of `f` mod the ideal slice over the quotient monomials.
    fn normal_form(&self, f: &BivarPoly) -> Option<Vec<Rat>> {
        let mut v = vec![Rat::zero(); self.cols.len()];
        for (&(i, j), c) in f.iter() {
            let idx = self.col_index.get(&(i, j))?;
            v[*idx] = c.clone();
        }
        for (row, &p) in self.rref_rows.iter().zip(&self.rref_pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (vc, rc) in v.iter_mut().zip(row) {
                if !rc.is_zero() {
                    *vc -= f.clone() * rc.clone();
                }
            }
        }
        let mut out = Vec::with_capacity(self.quotient.len());
        for m in &self.quotient {
            out.push(v[self.col_index[m]].clone());
        }
        // Everything outside the quotient support must have cancelled.
        let quotient_set: std::collections::HashSet<usize> =
            self.quotient.iter().map(|m| self.col_index[m]).collect();
        for (i, val) in v.iter().enumerate() {
            if !val.is_zero() && !quotient_set.contains(&i) {
                return None;
            }
        }
        Some(out)
    }
}

/// Computes `m(h)` as the characteristic polynomial of multiplication by `H`
/// on the Jacobian quotient, built by bounded-degree elimination.
fn critical_value_poly(
    h: &BivarPoly,
    hx: &BivarPoly,
    hy: &BivarPoly,
    n: usize,
) -> Result<UniPoly, PetrovError> {
    let deg_h = h.deg_or_zero();
    let n2 = n * n;
    let mut prev_quotient: Option<Vec<(u32, u32)>> = None;
    let start = 2 * deg_h.max(1);
    let cap = 4 * deg_h + 10;
    for d in start..=cap {
        let q = JacQuotient::build(hx, hy, d);
        if q.quotient.len() > n2 {
            prev_quotient = None;
            continue;
        }
        let stable = prev_quotient.as_ref() == Some(&q.quotient);
        prev_quotient = Some(q.quotient.clone());
        if !stable {
            continue;
        }
        // Need room for H * (quotient monomial) inside the slice.
        let max_q = q.quotient.iter().map(|&(a, b)| a + b).max().unwrap_or(0);
        if d < deg_h + max_q {
            continue;
        }
        let dim = q.quotient.len();
        let mut t = vec![vec![Rat::zero(); dim]; dim];
        let mut ok = true;
        for (col, &(a, b)) in q.quotient.iter().enumerate() {
            let prod = h * &BivarPoly::monomial(Rat::one(), a, b);
            match q.normal_form(&prod) {
                Some(coords) => {
                    for (row, v) in coords.into_iter().enumerate() {
                        t[row][col] = v;
                    }
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let cp = char_poly(&t);
        return Ok(UniPoly::from_coeffs(Var::H, cp));
    }
    Err(PetrovError::DegenerateHamiltonian(
        "Jacobian quotient did not stabilize at a finite dimension <= n^2".into(),
    ))
}

/// Solves `a·H_x + b·H_y = rhs` with `deg a, deg b <= ansatz`; canonical
/// solution (free variables zero).
fn solve_jacobian_membership(
    hx: &BivarPoly,
    hy: &BivarPoly,
    rhs: &BivarPoly,
    ansatz: u32,
) -> Option<(BivarPoly, BivarPoly)> {
    let unknown_monos = monomials_up_to(ansatz);
    let eq_deg = ansatz
        + hx.deg_or_zero()
            .max(hy.deg_or_zero())
            .max(rhs.deg_or_zero());
    let eq_monos = monomials_up_to(eq_deg);
    let eq_index: HashMap<_, _> = eq_monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let nrows = eq_monos.len();
    let ncols = 2 * unknown_monos.len();
    let mut mat = vec![vec![Rat::zero(); ncols]; nrows];
    for (u, &(a, b)) in unknown_monos.iter().enumerate() {
        let mono = BivarPoly::monomial(Rat::one(), a, b);
        for (which, gen) in [hx, hy].into_iter().enumerate() {
            let prod = gen * &mono;
            let col = which * unknown_monos.len() + u;
            for (&(i, j), c) in prod.iter() {
                mat[eq_index[&(i, j)]][col] = c.clone();
            }
        }
    }
    let solver = EchelonSolver::new(mat);
    let mut b = vec![Rat::zero(); nrows];
    for (&(i, j), c) in rhs.iter() {
        b[*eq_index.get(&(i, j))?] = c.clone();
    }
    let x = solver.solve(&b)?;
    let mut a_poly = BivarPoly::zero();
    let mut b_poly = BivarPoly::zero();
    for (u, &(i, j)) in unknown_monos.iter().enumerate() {
        a_poly.insert_add((i, j), x[u].clone());
        b_poly.insert_add((i, j), x[unknown_monos.len() + u].clone());
    }
    Some((a_poly, b_poly))
}

/// Solves `f·dH + dg = w` with `deg f <= ansatz`, `deg g <= ansatz + 1`.
fn solve_relatively_exact(
    hx: &BivarPoly,
    hy: &BivarPoly,
    w: &crate::algebra::OneForm,
    ansatz: u32,
) -> Option<(BivarPoly, BivarPoly)> {
    let f_monos = monomials_up_to(ansatz);
    let g_monos: Vec<_> = monomials_up_to(ansatz + 1)
        .into_iter()
        .filter(|&m| m != (0, 0))
        .collect();
    let e_deg = ansatz + hx.deg_or_zero().max(hy.deg_or_zero()).max(w.deg_or_zero()) + 1;
    let eq_monos = monomials_up_to(e_deg);
    let eq_index: HashMap<_, _> = eq_monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let half = eq_monos.len();
    let nrows = 2 * half;
    let ncols = f_monos.len() + g_monos.len();
    let mut mat = vec![vec![Rat::zero(); ncols]; nrows];
    for (u, &(a, b)) in f_monos.iter().enumerate() {
        let mono = BivarPoly::monomial(Rat::one(), a, b);
        for (&(i, j), c) in (&mono * hx).iter() {
            mat[eq_index[&(i, j)]][u] = c.clone();
        }
        for (&(i, j), c) in (&mono * hy).iter() {
            mat[half + eq_index[&(i, j)]][u] = c.clone();
        }
    }
    let g_off = f_monos.len();
    for (u, &(a, b)) in g_monos.iter().enumerate() {
        if a > 0 {
            mat[eq_index[&(a - 1, b)]][g_off + u] = Rat::from_integer(a.into());
        }
        if b > 0 {
            mat[half + eq_index[&(a, b - 1)]][g_off + u] = Rat::from_integer(b.into());
        }
    }
    let solver = EchelonSolver::new(mat);
    let mut rhs = vec![Rat::zero(); nrows];
    for (&(i, j), c) in w.p.iter() {
        rhs[*eq_index.get(&(i, j))?] = c.clone();
    }
    for (&(i, j), c) in w.q.iter() {
        rhs[half + *eq_index.get(&(i, j))?] = c.clone();
    }
    let x = solver.solve(&rhs)?;
    let mut f = BivarPoly::zero();
    for (u, &(i, j)) in f_monos.iter().enumerate() {
        f.insert_add((i, j), x[u].clone());
    }
    let mut g = BivarPoly::zero();
    for (u, &(i, j)) in g_monos.iter().enumerate() {
        g.insert_add((i, j), x[g_off + u].clone());
    }
    Some((f, g))
}

/// Certifies a Hamiltonian with default options.
pub fn certify(h: &BivarPoly) -> Result<Arc<Hamiltonian>, PetrovError> {
    certify_with_options(h, CertifyOptions::default())
}

pub fn certify_with_options(
    h: &BivarPoly,
    opts: CertifyOptions,
) -> Result<Arc<Hamiltonian>, PetrovError> {
    let deg = h.deg_or_zero();
    if deg < 2 {
        return Err(PetrovError::DegreeTooSmall(deg));
    }
    let n = (deg - 1) as usize;
    let hx = h.partial_x();
    let hy = h.partial_y();

    // Basic forms ω_{ij} = x^{i-1} y^j dx, 1 <= i, j <= n, j outer.
    let mut basic_forms = Vec::with_capacity(n * n);
    for j in 1..=n {
        for i in 1..=n {
            basic_forms.push(OneForm::dx(BivarPoly::monomial(
                Rat::one(),
                (i - 1) as u32,
                j as u32,
            )));
        }
    }

    let m = critical_value_poly(h, &hx, &hy, n)?;

    // Jacobian-ideal witness for m(H).
    let m_of_big_h = BivarPoly::compose_univariate(&m, h);
    let base_ansatz = m_of_big_h.deg_or_zero();
    let mut witness = None;
    for slack in 0..=4u32 {
        if let Some(w) = solve_jacobian_membership(&hx, &hy, &m_of_big_h, base_ansatz + slack) {
            witness = Some(w);
            break;
        }
    }
    let (jac_a, jac_b) = witness.ok_or_else(|| {
        PetrovError::DegenerateHamiltonian(
            "m(H) has no bounded Jacobian-ideal representation".into(),
        )
    })?;
    debug_assert!(
        (&(&(&jac_a * &hx) + &(&jac_b * &hy)) - &m_of_big_h).is_zero(),
        "jacobian witness identity"
    );

    // Numeric critical values from the roots of m.
    let m_f64 = m.coeffs_f64();
    let dm = m.derivative();
    let roots = unipoly_roots(&m);
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let critical_values: Vec<CriticalValue> = roots
        .iter()
        .map(|z| {
            let p = {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for c in m_f64.iter().rev() {
                    acc = acc * z + c;
                }
                acc
            };
            let dp = dm.eval_complex(*z);
            let radius = if dp.norm() > 0.0 {
                (p / dp).norm() + 1e-14 * scale
            } else {
                1e-7 * scale
            };
            CriticalValue {
                re: z.re,
                im: z.im,
                radius,
            }
        })
        .collect();
    let mut morse_distinct = critical_values.len() == m.deg_or_zero();
    let tol = opts.collision_tol * scale;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < tol {
                morse_distinct = false;
            }
        }
    }

    // Level probes.
    let h_transversal = {
        let mut u = BivarPoly::zero();
        for (&(i, j), c) in h.iter() {
            if i == 0 {
                u.insert_add((0, j), c.clone());
            }
        }
        u.restrict_x0(Var::P)
    };
    let hy_transversal = hy.restrict_x0(Var::P);
    let probe_levels = opts.probe_levels.clone().unwrap_or_else(|| {
        let mut reals: Vec<f64> = critical_values
            .iter()
            .filter(|c| c.im.abs() < 1e-8 * scale.max(1.0))
            .map(|c| c.re)
            .collect();
        reals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut probes = Vec::new();
        if reals.is_empty() {
            probes.extend([0.0, 1.0, -1.0]);
        } else {
            probes.push(reals[0] - 1.0);
            for w in reals.windows(2) {
                probes.push(0.5 * (w[0] + w[1]));
            }
            probes.push(reals[reals.len() - 1] + 1.0);
        }
        probes
    });
    let transversal_degenerate = hy_transversal.is_zero() || h_transversal.degree().is_none();
    let mut level_probes = Vec::new();
    for &t in &probe_levels {
        let smooth = critical_values
            .iter()
            .all(|c| ((c.re - t).powi(2) + c.im.powi(2)).sqrt() > tol.max(1e-12));
        let transversal = if transversal_degenerate {
            false
        } else {
            // Real intersections p of {H(0,p) = t} must be simple:
            // H_y(0,p) != 0 there. Vacuously true when there are none.
            let mut coeffs = h_transversal.coeffs_f64();
            if coeffs.is_empty() {
                coeffs = vec![0.0];
            }
            coeffs[0] -= t;
            let ys = crate::numeric::roots::real_roots(&coeffs, 1e-8);
            ys.iter()
                .all(|&y| hy_transversal.eval_f64(y).abs() > 1e-9 * (1.0 + y.abs()))
        };
        level_probes.push(LevelProbe {
            t,
            smooth,
            transversal,
        });
    }
    let smooth_level = level_probes.iter().all(|p| p.smooth);
    let transversal_ok = !transversal_degenerate && level_probes.iter().all(|p| p.transversal);

    let ansatz_slack = if opts.ansatz_slack == 0 {
        2 * n as u32 + 6
    } else {
        opts.ansatz_slack
    };

    // Basic forms that are themselves relatively exact (degenerate-at-infinity
    // Hamiltonians have them); decompositions are normalized against these.
    let rel_exact_basics: Vec<Option<(BivarPoly, BivarPoly)>> = basic_forms
        .iter()
        .map(|w| {
            let d0 = w.deg_or_zero();
            for slack in 0..=(3 * (n as u32 + 1) + 4) {
                if let Some(fg) = solve_relatively_exact(&hx, &hy, w, d0 + slack) {
                    return Some(fg);
                }
            }
            None
        })
        .collect();

    let ham = Hamiltonian {
        poly: h.clone(),
        n,
        basic_forms,
        m,
        level_offset: h.coeff(0, 0),
        hx,
        hy,
        jac_a,
        jac_b,
        h_transversal,
        hy_transversal,
        rel_exact_basics,
        genericity: GenericityReport {
            morse_distinct,
            critical_values,
            petrov_basis_ok: false,
            petrov_rank: (0, 0, 0),
            transversal_ok,
            smooth_level,
            level_probes,
        },
        ansatz_slack,
        solvers: Mutex::new(HashMap::new()),
    };

    // Probe decomposability of all monomial forms up to the probe degree.
    let probe_degree = if opts.basis_probe_degree == 0 {
        2 * n as u32 + 1
    } else {
        opts.basis_probe_degree
    };
    let mut basis_ok = true;
    'probe: for (a, b) in monomials_up_to(probe_degree) {
        let mono = BivarPoly::monomial(Rat::one(), a, b);
        for w in [OneForm::dx(mono.clone()), OneForm::dy(mono.clone())] {
            if super::decompose::petrov_decompose_unchecked(&w, &ham).is_err() {
                basis_ok = false;
                break 'probe;
            }
        }
    }
    let witness_solver = ham.solver_for(probe_degree);
    let rank_witness = (
        witness_solver.rank(),
        witness_solver.unknowns(),
        witness_solver.equations(),
    );

    let mut ham = ham;
    ham.genericity.petrov_basis_ok = basis_ok;
    ham.genericity.petrov_rank = rank_witness;
    if !basis_ok {
        return Err(PetrovError::DegenerateHamiltonian(
            "a probe monomial form has no decomposition over the basic forms".into(),
        ));
    }
    Ok(Arc::new(ham))
}
