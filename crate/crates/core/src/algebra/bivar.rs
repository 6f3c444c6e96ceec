//! Sparse bivariate polynomials over the rationals.

use super::{rat_to_f64, rat_to_string, Rat, UniPoly, Var};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A polynomial in `x`, `y` stored as a sparse exponent map.
///
/// Invariant: no zero coefficients are stored, so equality of maps is
/// equality of polynomials.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Self::default();
        if !c.is_zero() {
            p.terms.insert((0, 0), c);
        }
        p
    }

    /// The monomial `c * x^i * y^j`.
    pub fn monomial(c: Rat, i: u32, j: u32) -> Self {
        let mut p = Self::default();
        if !c.is_zero() {
            p.terms.insert((i, j), c);
        }
        p
    }

    /// Accumulates `(exponents, coefficient)` pairs into a polynomial.
    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), Rat)>) -> Self {
        let mut p = Self::default();
        for (key, c) in terms {
            p.insert_add(key, c);
        }
        p
    }

    pub fn var_x() -> Self {
        Self::monomial(Rat::one(), 1, 0)
    }

    pub fn var_y() -> Self {
        Self::monomial(Rat::one(), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn deg_or_zero(&self) -> u32 {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn insert_add(&mut self, key: (u32, u32), c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (*k, v.clone() * c.clone()))
            .collect();
        Self { terms }
    }

    pub fn partial_x(&self) -> Self {
        let mut out = Self::default();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                out.insert_add((i - 1, j), c.clone() * Rat::from_integer(i.into()));
            }
        }
        out
    }

    pub fn partial_y(&self) -> Self {
        let mut out = Self::default();
        for (&(i, j), c) in &self.terms {
            if j > 0 {
                out.insert_add((i, j - 1), c.clone() * Rat::from_integer(j.into()));
            }
        }
        out
    }

    /// Sum of absolute coefficient values; multiplicative up to `<=`.
    pub fn norm(&self) -> Rat {
        self.terms
            .values()
            .fold(Rat::zero(), |acc, c| acc + c.abs())
    }

    pub fn eval_rat(&self, x: &Rat, y: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (&(i, j), c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..i {
                t *= x.clone();
            }
            for _ in 0..j {
                t *= y.clone();
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        let (max_i, max_j) = self
            .terms
            .keys()
            .fold((0u32, 0u32), |(a, b), &(i, j)| (a.max(i), b.max(j)));
        let mut xp = vec![1.0; max_i as usize + 1];
        for k in 1..xp.len() {
            xp[k] = xp[k - 1] * x;
        }
        let mut yp = vec![1.0; max_j as usize + 1];
        for k in 1..yp.len() {
            yp[k] = yp[k - 1] * y;
        }
        self.terms
            .iter()
            .map(|(&(i, j), c)| rat_to_f64(c) * xp[i as usize] * yp[j as usize])
            .sum()
    }

    pub fn eval_complex(&self, x: Complex64, y: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(i, j), c) in &self.terms {
            acc += Complex64::new(rat_to_f64(c), 0.0) * x.powu(i) * y.powu(j);
        }
        acc
    }

    /// Restriction to the transversal `{x = 0}`, as a univariate polynomial
    /// in the given variable (standing for the `y`-coordinate).
    pub fn restrict_x0(&self, var: Var) -> UniPoly {
        let mut coeffs: Vec<Rat> = Vec::new();
        for (&(i, j), c) in &self.terms {
            if i == 0 {
                if coeffs.len() <= j as usize {
                    coeffs.resize(j as usize + 1, Rat::zero());
                }
                coeffs[j as usize] += c.clone();
            }
        }
        UniPoly::from_coeffs(var, coeffs)
    }

    /// `f(H)` for a univariate `f`, expanded exactly (Horner in `H`).
    pub fn compose_univariate(f: &UniPoly, h: &BivarPoly) -> BivarPoly {
        let mut acc = BivarPoly::zero();
        for c in f.coeffs().iter().rev() {
            acc = &acc * h;
            acc.insert_add((0, 0), c.clone());
        }
        acc
    }

    /// Dense `f64` snapshot for fast repeated evaluation in the numeric layer.
    pub fn to_f64_terms(&self) -> Vec<(u32, u32, f64)> {
        self.terms
            .iter()
            .map(|(&(i, j), c)| (i, j, rat_to_f64(c)))
            .collect()
    }
}

impl Add for &BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert_add(*k, c.clone());
        }
        out
    }
}

impl Sub for &BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert_add(*k, -c.clone());
        }
        out
    }
}

impl Mul for &BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::default();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                out.insert_add((i1 + i2, j1 + j2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

/// Canonical print order: total degree descending, then x-power descending.
fn print_order(terms: &BTreeMap<(u32, u32), Rat>) -> Vec<((u32, u32), &Rat)> {
    let mut v: Vec<_> = terms.iter().map(|(k, c)| (*k, c)).collect();
    v.sort_by(|a, b| {
        let da = a.0 .0 + a.0 .1;
        let db = b.0 .0 + b.0 .1;
        db.cmp(&da).then(b.0 .0.cmp(&a.0 .0))
    });
    v
}

pub(crate) fn write_monomial(
    f: &mut fmt::Formatter<'_>,
    c: &Rat,
    vars: &[(&str, u32)],
) -> fmt::Result {
    let powers: Vec<String> = vars
        .iter()
        .filter(|(_, e)| *e > 0)
        .map(|(name, e)| {
            if *e == 1 {
                name.to_string()
            } else {
                format!("{}^{}", name, e)
            }
        })
        .collect();
    if powers.is_empty() {
        return write!(f, "{}", rat_to_string(c));
    }
    if c.is_one() {
        write!(f, "{}", powers.join("*"))
    } else if (-c.clone()).is_one() {
        write!(f, "-{}", powers.join("*"))
    } else {
        write!(f, "{}*{}", rat_to_string(c), powers.join("*"))
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, ((i, j), c)) in print_order(&self.terms).into_iter().enumerate() {
            let c = if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                c.abs()
            } else if c.is_negative() {
                write!(f, " - ")?;
                c.abs()
            } else {
                write!(f, " + ")?;
                c.clone()
            };
            write_monomial(f, &c, &[("x", i), ("y", j)])?;
        }
        Ok(())
    }
}

impl fmt::Debug for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

pub(crate) use write_monomial as fmt_monomial;
