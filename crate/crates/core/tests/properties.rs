//! Cross-module invariants: exact algebra laws as property tests, and the
//! numeric consistency identities that tie the symbolic layer to quadrature.

use nestpf::algebra::{
    exterior_derivative, parse_bivar, parse_one_form, rat, rat_frac, wedge, BivarPoly, OneForm, Rat,
};
use nestpf::chen::{enumerate_words, shuffle, TruncatedSeries, Word};
use nestpf::numeric::{eval_iterated, trace_oval};
use nestpf::petrov::{certify, gelfand_leray, petrov_decompose, Hamiltonian};
use proptest::prelude::*;
use std::sync::Arc;

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| rat_frac(n, d))
}

fn arb_poly(max_deg: u32, max_terms: usize) -> impl Strategy<Value = BivarPoly> {
    prop::collection::vec(((0..=max_deg, 0..=max_deg), arb_rat()), 0..=max_terms).prop_map(
        move |terms| {
            BivarPoly::from_terms(terms.into_iter().filter(|((i, j), _)| i + j <= max_deg))
        },
    )
}

fn arb_form(max_deg: u32) -> impl Strategy<Value = OneForm> {
    (arb_poly(max_deg, 6), arb_poly(max_deg, 6)).prop_map(|(p, q)| OneForm::new(p, q))
}

proptest! {
    #[test]
    fn norm_is_submultiplicative(p in arb_poly(6, 8), q in arb_poly(6, 8)) {
        let prod = &p * &q;
        prop_assert!(prod.norm() <= p.norm() * q.norm());
    }

    #[test]
    fn d_of_dg_vanishes(g in arb_poly(10, 10)) {
        prop_assert!(exterior_derivative(&OneForm::d_of(&g)).is_zero());
    }

    #[test]
    fn wedge_is_antisymmetric(a in arb_form(5), b in arb_form(5)) {
        let ab = wedge(&a, &b);
        let ba = wedge(&b, &a);
        prop_assert_eq!(ab.r, -&ba.r);
    }

    #[test]
    fn parse_print_roundtrip(p in arb_poly(7, 9)) {
        let printed = p.to_string();
        let back = parse_bivar(&printed).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn form_parse_print_roundtrip(w in arb_form(6)) {
        let printed = w.to_string();
        let back = parse_one_form(&printed).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn shuffle_count_is_binomial(u in prop::collection::vec(1u16..=3, 0..=3),
                                 v in prop::collection::vec(1u16..=3, 0..=3)) {
        let (lu, lv) = (u.len(), v.len());
        let out = shuffle(&Word(u), &Word(v));
        let binom = {
            let mut c = 1usize;
            for k in 0..lu.min(lv) {
                c = c * (lu + lv - k) / (k + 1);
            }
            c
        };
        prop_assert_eq!(out.len(), binom);
        for w in &out {
            prop_assert_eq!(w.len(), lu + lv);
        }
    }
}

fn elliptic() -> Arc<Hamiltonian> {
    certify(&parse_bivar("1/2*y^2 + 1/3*x^3 - x").unwrap()).unwrap()
}

/// Deterministic pseudo-random rational in [-3, 3].
fn lcg_rat(state: &mut u64) -> Rat {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let n = ((*state >> 33) % 49) as i64 - 24;
    let d = ((*state >> 17) % 8) as i64 + 1;
    rat_frac(n, d)
}

fn random_form(state: &mut u64, deg: u32) -> OneForm {
    let mut p = Vec::new();
    let mut q = Vec::new();
    for i in 0..=deg {
        for j in 0..=(deg - i) {
            p.push(((i, j), lcg_rat(state)));
            q.push(((i, j), lcg_rat(state)));
        }
    }
    OneForm::new(BivarPoly::from_terms(p), BivarPoly::from_terms(q))
}

#[test]
fn decomposition_residual_and_linearity() {
    let ham = elliptic();
    let mut state = 0xfeed5_u64;
    let mut forms = Vec::new();
    for k in 0..20 {
        let deg = 1 + (k % 6) as u32;
        forms.push(random_form(&mut state, deg));
    }
    for theta in &forms {
        let dec = petrov_decompose(theta, &ham).unwrap();
        // Residual is checked exactly inside decompose; re-verify here.
        assert_eq!(&dec.reassemble(&ham), theta);
    }
    // Linearity under the canonical-solution rule (same-degree pairs).
    let a = random_form(&mut state, 4);
    let b = random_form(&mut state, 4);
    let combo = &a.scale(&rat(2)) + &b.scale(&rat(5));
    let da = petrov_decompose(&a, &ham).unwrap();
    let db = petrov_decompose(&b, &ham).unwrap();
    let dc = petrov_decompose(&combo, &ham).unwrap();
    for i in 0..ham.n_basic() {
        let want = &da.f_coeffs[i].scale(&rat(2)) + &db.f_coeffs[i].scale(&rat(5));
        assert_eq!(dc.f_coeffs[i], want);
    }
}

#[test]
fn gelfand_leray_consistency_on_elliptic() {
    // d/dt ∮θ = ∮η/m(t) for the basic forms, against central differences.
    let ham = elliptic();
    let basis = enumerate_words(2, 1).unwrap();
    let p0 = 0.9;
    let t_of = |p: f64| ham.poly().eval_f64(0.0, p);
    let dp = 1e-4;

    let integrals = |p: f64| -> Vec<f64> {
        let tr = trace_oval(&ham, p).unwrap();
        eval_iterated(&tr, &basis).unwrap().values[1..=4].to_vec()
    };
    let plus = integrals(p0 + dp);
    let minus = integrals(p0 - dp);
    let dt = t_of(p0 + dp) - t_of(p0 - dp);

    let tr = trace_oval(&ham, p0).unwrap();
    for (k, w) in ham.basic_forms().iter().enumerate() {
        let (eta, m) = gelfand_leray(w, &ham);
        let ints = nestpf::numeric::eval_iterated_forms(&tr, &[vec![eta]], 1).unwrap();
        let lhs = (plus[k] - minus[k]) / dt;
        let rhs = ints.values[0] / m.eval_f64(t_of(p0));
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        assert!(
            (lhs - rhs).abs() / scale < 1e-6,
            "form {k}: fd {lhs} vs GL {rhs}"
        );
    }
}

#[test]
fn reversed_series_is_group_inverse() {
    // The group-like series of the reversed path is the truncated inverse.
    let ham = elliptic();
    let basis = enumerate_words(2, 2).unwrap();
    let tr = trace_oval(&ham, 0.85).unwrap();
    let fwd = eval_iterated(&tr, &basis).unwrap();
    let rev = eval_iterated(&tr.reversed(), &basis).unwrap();
    let s = TruncatedSeries::from_coeffs(basis.clone(), fwd.values.clone());
    let inv = s.group_inverse();
    for (i, (a, b)) in inv.coeffs.iter().zip(&rev.values).enumerate() {
        assert!(
            (a - b).abs() < 1e-7 * (1.0 + b.abs()),
            "word {}: inverse {a} vs reversed {b}",
            basis.word(i)
        );
    }
}

#[test]
fn connection_poles_lie_in_singular_locus() {
    // Poles of Ω entries lie in {m(t(p)) = 0} ∪ {H_y(0,p) = 0} within 1e-8.
    let ham = elliptic();
    let omega = nestpf::connection::build_connection(&ham, 2).unwrap();
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    for z in nestpf::numeric::roots::unipoly_roots(&ham.m_of_p()) {
        candidates.push((z.re, z.im));
    }
    for z in nestpf::numeric::roots::unipoly_roots(ham.hy_of_p()) {
        candidates.push((z.re, z.im));
    }
    for s in &omega.singular_locus {
        let ok = candidates
            .iter()
            .any(|&(re, im)| ((s.re - re).powi(2) + (s.im - im).powi(2)).sqrt() < 1e-8);
        assert!(
            ok,
            "pole {}+{}i not in the allowed singular set",
            s.re, s.im
        );
    }
}

#[test]
fn connection_size_diagnostics_are_monotone() {
    let ham = elliptic();
    let mut prev_deg = 0;
    for k in 0..=2 {
        let omega = nestpf::connection::build_connection(&ham, k).unwrap();
        let d = omega.measured_degree();
        assert!(d >= prev_deg, "measured degree dropped at K = {k}");
        prev_deg = d;
    }
}

#[test]
fn decomposition_bounds_hold_on_a_generic_cubic() {
    // On a cubic with the full n² = 4 Morse critical points the bounds of
    // the decomposition statement hold (degree convention: the exterior
    // derivative has degree zero, so a coefficient-degree-8 form has d = 9).
    // The elliptic test Hamiltonian is degenerate at infinity and genuinely
    // violates them; see the acceptance suite.
    let h = parse_bivar("1/3*x^3 - x + 1/3*y^3 - 1/2*y").unwrap();
    let ham = certify(&h).unwrap();
    let mut state = 0xabcd_u64;
    for _ in 0..40 {
        let theta = random_form(&mut state, 8);
        let dec = petrov_decompose(&theta, &ham).unwrap();
        let (df, dg, dh) = dec.degrees();
        let d = theta.deg_or_zero() + 1;
        assert!(df <= d, "deg f = {df} > {d}");
        assert!(dg <= d, "deg g = {dg} > {d}");
        assert!(dh as u32 * 3 <= d, "deg_h f_i = {dh} > {d}/3");
    }
}

#[test]
fn kronecker_identity_holds_through_k3() {
    use nestpf::connection::{block_structure, build_connection, kronecker_check, KroneckerOutcome};
    let ham = elliptic();
    let omega = build_connection(&ham, 3).unwrap();
    assert_eq!(omega.dim(), 85);
    let blocks = block_structure(&omega).unwrap();
    for k in 1..=3 {
        match kronecker_check(&blocks[1], &blocks[k], k) {
            KroneckerOutcome::Match { .. } => {}
            KroneckerOutcome::Mismatch { row, col, expected, got } => {
                panic!("k = {k}: mismatch at ({row},{col}): {expected} vs {got}")
            }
        }
    }
}
