//! Dense univariate polynomials over the rationals, tagged by variable.

use super::{rat_to_f64, Rat};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Variable tag for univariate objects: the level `h`/`t` or the base-point
/// coordinate `p` on the transversal.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub enum Var {
    H,
    T,
    P,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::H => "h",
            Var::T => "t",
            Var::P => "p",
        }
    }
}

/// Dense univariate polynomial, ascending coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    var: Var,
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn from_coeffs(var: Var, mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Self { var, coeffs }
    }

    pub fn zero(var: Var) -> Self {
        Self {
            var,
            coeffs: vec![],
        }
    }

    pub fn one(var: Var) -> Self {
        Self::constant(var, Rat::one())
    }

    pub fn constant(var: Var, c: Rat) -> Self {
        Self::from_coeffs(var, vec![c])
    }

    pub fn identity(var: Var) -> Self {
        Self::from_coeffs(var, vec![Rat::zero(), Rat::one()])
    }

    pub fn monomial(var: Var, c: Rat, deg: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(var, coeffs)
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// Retags the variable without changing coefficients (e.g. `h` read as `t`).
    pub fn with_var(&self, var: Var) -> Self {
        Self {
            var,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    fn check_var(&self, other: &Self) {
        assert_eq!(
            self.var, other.var,
            "univariate arithmetic on mismatched variables"
        );
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.var);
        }
        Self {
            var: self.var,
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * Rat::from_integer(k.into()))
            .collect();
        Self::from_coeffs(self.var, coeffs)
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    /// Composition `self(inner)`; the result carries `inner`'s variable.
    pub fn compose(&self, inner: &UniPoly) -> UniPoly {
        let mut acc = UniPoly::zero(inner.var);
        for c in self.coeffs.iter().rev() {
            acc = &acc * inner;
            acc = &acc + &UniPoly::constant(inner.var, c.clone());
        }
        acc
    }

    /// Euclidean division: returns `(q, r)` with `self = q*d + r`, `deg r < deg d`.
    pub fn divrem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        self.check_var(d);
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.coeffs.len() - 1;
        let lead = d.coeffs.last().unwrap().clone();
        if r.len() <= dd {
            return (UniPoly::zero(self.var), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        while r.len() > dd {
            let c = r.last().unwrap().clone() / lead.clone();
            let k = r.len() - 1 - dd;
            q[k] = c.clone();
            for (i, dc) in d.coeffs.iter().enumerate() {
                let v = r[k + i].clone() - c.clone() * dc.clone();
                r[k + i] = v;
            }
            // The top coefficient cancels exactly.
            while r.last().map_or(false, |c| c.is_zero()) {
                r.pop();
            }
            if r.len() <= dd {
                break;
            }
        }
        (
            UniPoly::from_coeffs(self.var, q),
            UniPoly::from_coeffs(self.var, r),
        )
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        self.check_var(other);
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Size diagnostic: sum of absolute values of the integer coefficients
    /// after clearing denominators.
    pub fn int_size(&self) -> Rat {
        use num_bigint::BigInt;
        let mut l = BigInt::from(1);
        for c in &self.coeffs {
            l = crate::linalg::lcm_int(&l, c.denom());
        }
        let mut s = BigInt::from(0);
        for c in &self.coeffs {
            let v = (c.clone() * Rat::from_integer(l.clone())).numer().clone();
            s += v.abs();
        }
        Rat::from_integer(s)
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        self.check_var(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        UniPoly::from_coeffs(self.var, coeffs)
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        self.check_var(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        UniPoly::from_coeffs(self.var, coeffs)
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        self.check_var(rhs);
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero(self.var);
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a.clone() * b.clone();
            }
        }
        UniPoly::from_coeffs(self.var, coeffs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly {
            var: self.var,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let name = self.var.name();
        let terms: Vec<(usize, &Rat)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        for (idx, (k, c)) in terms.into_iter().enumerate() {
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
            super::bivar::fmt_monomial(f, &c, &[(name, k as u32)])?;
        }
        Ok(())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
