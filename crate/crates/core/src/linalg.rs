//! Exact linear algebra over the rationals.
//!
//! The decomposition engines in `petrov` solve one linear system for many
//! right-hand sides, so elimination happens once and the recorded row
//! transform is replayed per solve. Rows are kept as primitive integer
//! vectors; a stored row `[E_r | T_r]` means the equation `E_r·x = T_r·b`,
//! which is invariant under joint row scaling.

use crate::algebra::{rat_to_f64, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub(crate) fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    let mut x = a.abs();
    let mut y = b.abs();
    while !y.is_zero() {
        let r = &x % &y;
        x = y;
        y = r;
    }
    x
}

pub(crate) fn lcm_int(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    let g = gcd_int(a, b);
    (a / &g * b).abs()
}

fn normalize_row(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for v in row.iter() {
        if !v.is_zero() {
            g = gcd_int(&g, v);
            if g.is_one() {
                return;
            }
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for v in row.iter_mut() {
        *v /= &g;
    }
}

/// Echelon factorization of a rational matrix with recorded transform,
/// supporting repeated canonical solves (all free variables zero).
pub struct EchelonSolver {
    cols: usize,
    nrows: usize,
    /// Echelon rows: `aug[r] = [E_r (cols) | T_r (nrows)]`, primitive integers.
    aug: Vec<Vec<BigInt>>,
    /// Pivot column of each echelon row, strictly increasing.
    pivots: Vec<usize>,
    /// Number of echelon (non-null) rows = rank.
    rank: usize,
}

impl EchelonSolver {
    pub fn new(m: Vec<Vec<Rat>>) -> Self {
        let nrows = m.len();
        let cols = m.first().map_or(0, |r| r.len());
        let mut aug: Vec<Vec<BigInt>> = Vec::with_capacity(nrows);
        for (ri, row) in m.into_iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            let mut l = BigInt::one();
            for c in &row {
                l = lcm_int(&l, c.denom());
            }
            let mut v: Vec<BigInt> = row
                .iter()
                .map(|c| (c.clone() * Rat::from_integer(l.clone())).numer().clone())
                .collect();
            v.resize(cols + nrows, BigInt::zero());
            v[cols + ri] = l;
            aug.push(v);
        }

        let mut pivots = Vec::new();
        let mut next = 0usize;
        for col in 0..cols {
            let Some(sel) = (next..nrows).find(|&r| !aug[r][col].is_zero()) else {
                continue;
            };
            aug.swap(next, sel);
            let pivot = aug[next].clone();
            let pv = pivot[col].clone();
            for r in next + 1..nrows {
                if aug[r][col].is_zero() {
                    continue;
                }
                let f = aug[r][col].clone();
                for c in col..cols + nrows {
                    let v = &pv * &aug[r][c] - &f * &pivot[c];
                    aug[r][c] = v;
                }
                // Entries left of `col` are already zero in both rows.
                normalize_row(&mut aug[r]);
            }
            pivots.push(col);
            next += 1;
            if next == nrows {
                break;
            }
        }
        let rank = pivots.len();
        Self {
            cols,
            nrows,
            aug,
            pivots,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    fn transformed_rhs(&self, row: usize, b: &[Rat]) -> Rat {
        let t = &self.aug[row][self.cols..];
        let mut acc = Rat::zero();
        for (ti, bi) in t.iter().zip(b) {
            if !ti.is_zero() && !bi.is_zero() {
                acc += Rat::from_integer(ti.clone()) * bi.clone();
            }
        }
        acc
    }

    /// Canonical solve of `M·x = b`: free variables are zero. Returns `None`
    /// when the system is inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.nrows, "rhs length mismatch");
        for r in self.rank..self.nrows {
            if !self.transformed_rhs(r, b).is_zero() {
                return None;
            }
        }
        let mut x = vec![Rat::zero(); self.cols];
        for r in (0..self.rank).rev() {
            let pc = self.pivots[r];
            let mut acc = self.transformed_rhs(r, b);
            let row = &self.aug[r];
            for c in pc + 1..self.cols {
                if !row[c].is_zero() && !x[c].is_zero() {
                    acc -= Rat::from_integer(row[c].clone()) * x[c].clone();
                }
            }
            x[pc] = acc / Rat::from_integer(row[pc].clone());
        }
        Some(x)
    }
}

/// Reduced row echelon form over the rationals, for quotient-space bases.
/// Returns `(rref_rows, pivot_cols)`.
pub fn rref(mut m: Vec<Vec<Rat>>) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let nrows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut next = 0usize;
    for col in 0..cols {
        let Some(sel) = (next..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(next, sel);
        let inv = m[next][col].clone().recip();
        for c in col..cols {
            let v = m[next][c].clone() * inv.clone();
            m[next][c] = v;
        }
        for r in 0..nrows {
            if r == next || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..cols {
                let v = m[r][c].clone() - f.clone() * m[next][c].clone();
                m[r][c] = v;
            }
        }
        pivots.push(col);
        next += 1;
        if next == nrows {
            break;
        }
    }
    m.truncate(next);
    (m, pivots)
}

/// Characteristic polynomial of a square rational matrix by the
/// Faddeev-LeVerrier recurrence. Coefficients ascending; monic.
pub fn char_poly(a: &[Vec<Rat>]) -> Vec<Rat> {
    let n = a.len();
    for row in a {
        assert_eq!(row.len(), n, "char_poly needs a square matrix");
    }
    if n == 0 {
        return vec![Rat::one()];
    }
    let ident = |k: usize, l: usize| if k == l { Rat::one() } else { Rat::zero() };
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| ident(i, j)).collect())
        .collect();
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[n] = Rat::one();
    for k in 1..=n {
        // m <- a * m
        let mut am = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            for l in 0..n {
                if m[l].iter().all(|v| v.is_zero()) {
                    continue;
                }
                let ail = &a[i][l];
                if ail.is_zero() {
                    continue;
                }
                for j in 0..n {
                    if !m[l][j].is_zero() {
                        let v = ail.clone() * m[l][j].clone();
                        am[i][j] += v;
                    }
                }
            }
        }
        let tr: Rat = (0..n)
            .map(|i| am[i][i].clone())
            .fold(Rat::zero(), |s, v| s + v);
        let c = -(tr / Rat::from_integer(BigInt::from(k)));
        coeffs[n - k] = c.clone();
        for i in 0..n {
            am[i][i] += c.clone();
        }
        m = am;
    }
    coeffs
}

/// Converts an exact rational matrix to `f64` entries.
pub fn mat_to_f64(a: &[Vec<Rat>]) -> Vec<Vec<f64>> {
    a.iter()
        .map(|r| r.iter().map(rat_to_f64).collect())
        .collect()
}
