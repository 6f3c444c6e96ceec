//! Univariate rational functions, kept reduced with a monic denominator.

use super::{Rat, UniPoly, Var};
use num_complex::Complex64;
use num_traits::Zero;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A reduced rational function `num/den` in one variable.
///
/// Canonical form: `gcd(num, den) = 1`, `den` monic, and the zero function
/// is `0/1`. Equality of representations is equality of functions.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: UniPoly,
    den: UniPoly,
}

impl RationalFunction {
    pub fn new(num: UniPoly, den: UniPoly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let mut out = Self { num, den };
        out.reduce();
        out
    }

    pub fn from_poly(num: UniPoly) -> Self {
        let den = UniPoly::one(num.var());
        Self { num, den }
    }

    pub fn zero(var: Var) -> Self {
        Self::from_poly(UniPoly::zero(var))
    }

    pub fn one(var: Var) -> Self {
        Self::from_poly(UniPoly::one(var))
    }

    pub fn constant(var: Var, c: Rat) -> Self {
        Self::from_poly(UniPoly::constant(var, c))
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = UniPoly::one(self.den.var());
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree().unwrap_or(0) > 0 {
            self.num = self.num.divrem(&g).0;
            self.den = self.den.divrem(&g).0;
        }
        let lead = self.den.leading().expect("nonzero denominator").clone();
        self.num = self.num.scale(&lead.recip());
        self.den = self.den.scale(&lead.recip());
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn var(&self) -> Var {
        self.num.var()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Degree in the sense of `deg num + deg den` (both zero for constants).
    pub fn degree(&self) -> usize {
        self.num.deg_or_zero() + self.den.deg_or_zero()
    }

    /// Size diagnostic: sum of integer-coefficient magnitudes of a cleared
    /// representation of numerator and denominator.
    pub fn size(&self) -> Rat {
        self.num.int_size() + self.den.int_size()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of the zero function");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = &self.den * &self.den;
        Self::new(n, d)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.num.eval_complex(x) / self.den.eval_complex(x)
    }

    /// Exact evaluation; `None` at a pole.
    pub fn eval_rat(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval_rat(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval_rat(x) / d)
        }
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction::new(n, &self.den * &rhs.den)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        let n = &(&self.num * &rhs.den) - &(&rhs.num * &self.den);
        RationalFunction::new(n, &self.den * &rhs.den)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        assert!(!rhs.is_zero(), "division by the zero function");
        RationalFunction::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            let c = self.den.coeff(0);
            if c == num_traits::One::one() {
                return write!(f, "{}", self.num);
            }
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn up(coeffs: &[i64]) -> UniPoly {
        UniPoly::from_coeffs(Var::P, coeffs.iter().map(|&c| rat(c)).collect())
    }

    #[test]
    fn reduction_is_canonical() {
        // (2p^2 - 2) / (4p - 4) = (p + 1)/2
        let r = RationalFunction::new(up(&[-2, 0, 2]), up(&[-4, 4]));
        assert_eq!(r.to_string(), "1/2*p + 1/2");
        assert!(r.is_polynomial());
    }

    #[test]
    fn field_ops_and_derivative() {
        let r = RationalFunction::new(up(&[0, 1]), up(&[1, 0, 1])); // p/(p^2+1)
        let s = &r + &r;
        assert_eq!(&s - &r, r);
        let d = r.derivative(); // (1 - p^2)/(p^2+1)^2
        assert_eq!(d.num(), &up(&[1, 0, -1]));
        let prod = &r * &r.recip();
        assert_eq!(prod, RationalFunction::one(Var::P));
    }

    #[test]
    fn degree_matches_num_plus_den() {
        let r = RationalFunction::new(up(&[0, 1]), up(&[1, 0, 1]));
        assert_eq!(r.degree(), 3);
    }
}
