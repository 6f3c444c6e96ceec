//! Univariate polynomial roots via the balanced companion matrix, with a
//! Newton polish.

use super::eig::{eigenvalues, CMat, C64};
use crate::algebra::UniPoly;

/// Complex roots of a polynomial given by ascending real coefficients.
pub fn poly_roots(coeffs: &[f64]) -> Vec<C64> {
    let mut c = coeffs.to_vec();
    while c.last().map_or(false, |v| *v == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return vec![];
    }
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = CMat::zeros(n);
    for i in 0..n {
        if i + 1 < n {
            m[(i + 1, i)] = C64::new(1.0, 0.0);
        }
        m[(i, n - 1)] = C64::new(-c[i] / lead, 0.0);
    }
    balance(&mut m);
    let mut roots = eigenvalues(&m);
    for r in roots.iter_mut() {
        *r = polish(&c, *r);
    }
    roots
}

pub fn unipoly_roots(p: &UniPoly) -> Vec<C64> {
    poly_roots(&p.coeffs_f64())
}

/// Complex roots of `p(x) - shift` for real-coefficient `p`.
pub fn poly_roots_shifted(coeffs: &[f64], shift: C64) -> Vec<C64> {
    let mut c: Vec<C64> = coeffs.iter().map(|&v| C64::new(v, 0.0)).collect();
    if let Some(c0) = c.first_mut() {
        *c0 -= shift;
    }
    while c.last().map_or(false, |v| v.norm() == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return vec![];
    }
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = CMat::zeros(n);
    for i in 0..n {
        if i + 1 < n {
            m[(i + 1, i)] = C64::new(1.0, 0.0);
        }
        m[(i, n - 1)] = -c[i] / lead;
    }
    balance(&mut m);
    let mut roots = eigenvalues(&m);
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let mut p = C64::new(0.0, 0.0);
            let mut dp = C64::new(0.0, 0.0);
            for &cc in c.iter().rev() {
                dp = dp * *r + p;
                p = p * *r + cc;
            }
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            *r -= step;
            if step.norm() < 1e-15 * r.norm().max(1.0) {
                break;
            }
        }
    }
    roots
}

/// Real roots only, deduplicated within `tol` of the real axis.
pub fn real_roots(coeffs: &[f64], imag_tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = poly_roots(coeffs)
        .into_iter()
        .filter(|z| z.im.abs() <= imag_tol)
        .map(|z| z.re)
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

fn balance(m: &mut CMat) {
    let n = m.n;
    // One sweep of diagonal balancing in powers of 2.
    for _ in 0..4 {
        let mut done = true;
        for i in 0..n {
            let mut rnorm = 0.0;
            let mut cnorm = 0.0;
            for j in 0..n {
                if j != i {
                    rnorm += m[(i, j)].norm();
                    cnorm += m[(j, i)].norm();
                }
            }
            if rnorm == 0.0 || cnorm == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = rnorm + cnorm;
            let mut c = cnorm;
            while c < rnorm / 2.0 {
                f *= 2.0;
                c *= 4.0;
            }
            while c > rnorm * 2.0 {
                f /= 2.0;
                c /= 4.0;
            }
            if (rnorm / f + cnorm * f) < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] = m[(i, j)] / f;
                }
                for j in 0..n {
                    m[(j, i)] = m[(j, i)] * f;
                }
            }
        }
        if done {
            break;
        }
    }
}

fn polish(coeffs: &[f64], mut z: C64) -> C64 {
    for _ in 0..8 {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() < 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_quadratic() {
        // (x - 2/3)(x + 2/3) = x^2 - 4/9
        let mut r = real_roots(&[-4.0 / 9.0, 0.0, 1.0], 1e-9);
        assert_eq!(r.len(), 2);
        assert!((r[0] + 2.0 / 3.0).abs() < 1e-12);
        assert!((r[1] - 2.0 / 3.0).abs() < 1e-12);
        r = real_roots(&[1.0, 0.0, 1.0], 1e-9); // x^2 + 1
        assert!(r.is_empty());
    }

    #[test]
    fn roots_of_wilkinson_ish() {
        // (x-1)(x-2)(x-3)(x-4) expanded
        let c = [24.0, -50.0, 35.0, -10.0, 1.0];
        let r = real_roots(&c, 1e-8);
        assert_eq!(r.len(), 4);
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn complex_roots_come_in_pairs() {
        // x^3 - 1: roots 1, e^{±2πi/3}
        let r = poly_roots(&[-1.0, 0.0, 0.0, 1.0]);
        assert_eq!(r.len(), 3);
        for z in r {
            assert!((z.norm() - 1.0).abs() < 1e-10);
            assert!((z * z * z - C64::new(1.0, 0.0)).norm() < 1e-9);
        }
    }
}
