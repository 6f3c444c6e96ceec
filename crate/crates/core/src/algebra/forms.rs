//! Polynomial differential 1- and 2-forms on the (x, y) plane.

use super::{BivarPoly, Rat, UniPoly, Var};
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// `ω = P dx + Q dy` with polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct OneForm {
    pub p: BivarPoly,
    pub q: BivarPoly,
}

impl OneForm {
    pub fn new(p: BivarPoly, q: BivarPoly) -> Self {
        Self { p, q }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dx(p: BivarPoly) -> Self {
        Self {
            p,
            q: BivarPoly::zero(),
        }
    }

    pub fn dy(q: BivarPoly) -> Self {
        Self {
            p: BivarPoly::zero(),
            q,
        }
    }

    /// The exact form `dg`.
    pub fn d_of(g: &BivarPoly) -> Self {
        Self {
            p: g.partial_x(),
            q: g.partial_y(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn degree(&self) -> Option<u32> {
        match (self.p.degree(), self.q.degree()) {
            (None, d) | (d, None) => d,
            (Some(a), Some(b)) => Some(a.max(b)),
        }
    }

    pub fn deg_or_zero(&self) -> u32 {
        self.degree().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self {
            p: self.p.scale(c),
            q: self.q.scale(c),
        }
    }

    /// `g·ω` for a polynomial `g`.
    pub fn mul_poly(&self, g: &BivarPoly) -> Self {
        Self {
            p: &self.p * g,
            q: &self.q * g,
        }
    }

    /// Pullback along a parameterized path point: value of `ω` on the
    /// tangent `(vx, vy)` at `(x, y)`.
    pub fn eval_on(&self, x: f64, y: f64, vx: f64, vy: f64) -> f64 {
        self.p.eval_f64(x, y) * vx + self.q.eval_f64(x, y) * vy
    }

    pub fn norm(&self) -> Rat {
        self.p.norm() + self.q.norm()
    }
}

impl Add for &OneForm {
    type Output = OneForm;
    fn add(self, rhs: &OneForm) -> OneForm {
        OneForm {
            p: &self.p + &rhs.p,
            q: &self.q + &rhs.q,
        }
    }
}

impl Sub for &OneForm {
    type Output = OneForm;
    fn sub(self, rhs: &OneForm) -> OneForm {
        OneForm {
            p: &self.p - &rhs.p,
            q: &self.q - &rhs.q,
        }
    }
}

impl Neg for &OneForm {
    type Output = OneForm;
    fn neg(self) -> OneForm {
        OneForm {
            p: -&self.p,
            q: -&self.q,
        }
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.p.is_zero(), self.q.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "({})dx", self.p),
            (true, false) => write!(f, "({})dy", self.q),
            (false, false) => write!(f, "({})dx + ({})dy", self.p, self.q),
        }
    }
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// `μ = R dx∧dy`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct TwoForm {
    pub r: BivarPoly,
}

impl TwoForm {
    pub fn new(r: BivarPoly) -> Self {
        Self { r }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self { r: self.r.scale(c) }
    }
}

impl Add for &TwoForm {
    type Output = TwoForm;
    fn add(self, rhs: &TwoForm) -> TwoForm {
        TwoForm {
            r: &self.r + &rhs.r,
        }
    }
}

impl Neg for &TwoForm {
    type Output = TwoForm;
    fn neg(self) -> TwoForm {
        TwoForm { r: -&self.r }
    }
}

impl fmt::Display for TwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})dx^dy", self.r)
    }
}

impl fmt::Debug for TwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// `dω = (∂Q/∂x − ∂P/∂y) dx∧dy`.
pub fn exterior_derivative(w: &OneForm) -> TwoForm {
    TwoForm::new(&w.q.partial_x() - &w.p.partial_y())
}

/// `α∧β = (P_α Q_β − Q_α P_β) dx∧dy`.
pub fn wedge(a: &OneForm, b: &OneForm) -> TwoForm {
    TwoForm::new(&(&a.p * &b.q) - &(&a.q * &b.p))
}

/// Pullback of `ω` to the transversal `{x = 0}` parameterized by `p`:
/// `x = 0`, `dx = 0`, leaving `Q(0, p)` as the coefficient of `dp`.
pub fn pullback_to_transversal(w: &OneForm) -> UniPoly {
    w.q.restrict_x0(Var::P)
}
