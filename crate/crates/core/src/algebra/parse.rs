//! Parser for the human-readable polynomial grammar.
//!
//! ```text
//! expr     := ['-'] term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := atom ['^' uint]
//! atom     := rational | var | 'dx' | 'dy' | '(' expr ')'
//! rational := int ['/' uint]
//! ```
//!
//! Bivariate polynomials use variables `x`, `y`; univariate ones use the
//! single tag variable (`h`, `t` or `p`). One-forms are sums of terms each
//! carrying exactly one `dx` or `dy` factor, e.g. `(y)dx + (x^2 - 1)dy`.

use super::{BivarPoly, Rat, UniPoly, Var};
use crate::algebra::OneForm;
use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        msg: msg.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1
            }
            '/' => {
                out.push((i, Tok::Slash));
                i += 1
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = s[start..i].parse().expect("digits");
                out.push((start, Tok::Num(n)));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                out.push((start, Tok::Ident(s[start..i].to_string())));
            }
            _ => return err(i, format!("unexpected character '{}'", c)),
        }
    }
    Ok(out)
}

/// Value of a sub-expression: a polynomial plus dx- and dy-components.
/// Plain polynomials keep `dx = dy = 0`.
#[derive(Clone)]
struct FormVal {
    s: BivarPoly,
    dx: BivarPoly,
    dy: BivarPoly,
}

impl FormVal {
    fn scalar(p: BivarPoly) -> Self {
        Self {
            s: p,
            dx: BivarPoly::zero(),
            dy: BivarPoly::zero(),
        }
    }

    fn is_scalar(&self) -> bool {
        self.dx.is_zero() && self.dy.is_zero()
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    vars: &'a [(&'a str, u8)], // name -> axis (0 = x-slot, 1 = y-slot)
    allow_forms: bool,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<FormVal, ParseError> {
        let mut negate = false;
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = FormVal {
                s: -&acc.s,
                dx: -&acc.dx,
                dy: -&acc.dy,
            };
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = FormVal {
                        s: &acc.s + &t.s,
                        dx: &acc.dx + &t.dx,
                        dy: &acc.dy + &t.dy,
                    };
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = FormVal {
                        s: &acc.s - &t.s,
                        dx: &acc.dx - &t.dx,
                        dy: &acc.dy - &t.dy,
                    };
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FormVal, ParseError> {
        let mut acc = self.factor()?;
        loop {
            // Explicit '*' or juxtaposition like `(y)dx`, `3x`.
            let implicit = matches!(
                self.peek(),
                Some(Tok::Ident(_)) | Some(Tok::LParen) | Some(Tok::Num(_))
            );
            if self.peek() == Some(&Tok::Star) {
                self.bump();
            } else if !implicit {
                return Ok(acc);
            }
            let pos = self.here();
            let f = self.factor()?;
            acc = mul_vals(&acc, &f).map_err(|m| ParseError { pos, msg: m })?;
        }
    }

    fn factor(&mut self) -> Result<FormVal, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let pos = self.here();
            match self.bump() {
                Some(Tok::Num(n)) => {
                    let e: u32 = n.try_into().map_err(|_| ParseError {
                        pos,
                        msg: "exponent too large".into(),
                    })?;
                    if !base.is_scalar() {
                        return err(pos, "cannot raise a form to a power");
                    }
                    let mut acc = BivarPoly::one();
                    for _ in 0..e {
                        acc = &acc * &base.s;
                    }
                    Ok(FormVal::scalar(acc))
                }
                _ => err(pos, "expected an integer exponent after '^'"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<FormVal, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(n)) => {
                // Optional '/ uint' for a rational literal.
                if self.peek() == Some(&Tok::Slash) {
                    self.bump();
                    let dpos = self.here();
                    match self.bump() {
                        Some(Tok::Num(d)) => {
                            if d == BigInt::from(0) {
                                return err(dpos, "zero denominator");
                            }
                            Ok(FormVal::scalar(BivarPoly::constant(Rat::new(n, d))))
                        }
                        _ => err(dpos, "expected denominator after '/'"),
                    }
                } else {
                    Ok(FormVal::scalar(BivarPoly::constant(Rat::from_integer(n))))
                }
            }
            Some(Tok::Ident(name)) => {
                if name == "dx" || name == "dy" {
                    if !self.allow_forms {
                        return err(pos, format!("'{}' not allowed in a polynomial", name));
                    }
                    let one = BivarPoly::one();
                    return Ok(if name == "dx" {
                        FormVal {
                            s: BivarPoly::zero(),
                            dx: one,
                            dy: BivarPoly::zero(),
                        }
                    } else {
                        FormVal {
                            s: BivarPoly::zero(),
                            dx: BivarPoly::zero(),
                            dy: one,
                        }
                    });
                }
                for (vname, axis) in self.vars {
                    if *vname == name {
                        let p = if *axis == 0 {
                            BivarPoly::var_x()
                        } else {
                            BivarPoly::var_y()
                        };
                        return Ok(FormVal::scalar(p));
                    }
                }
                err(pos, format!("unknown variable '{}'", name))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let pos2 = self.here();
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => err(pos2, "expected ')'"),
                }
            }
            Some(t) => err(pos, format!("unexpected token {:?}", t)),
            None => err(pos, "unexpected end of input"),
        }
    }
}

fn mul_vals(a: &FormVal, b: &FormVal) -> Result<FormVal, String> {
    if !a.is_scalar() && !b.is_scalar() {
        return Err("product of two differential forms".into());
    }
    let (c, w) = if a.is_scalar() { (a, b) } else { (b, a) };
    Ok(FormVal {
        s: &c.s * &w.s,
        dx: &c.s * &w.dx,
        dy: &c.s * &w.dy,
    })
}

fn run_parser(input: &str, vars: &[(&str, u8)], allow_forms: bool) -> Result<FormVal, ParseError> {
    let toks = tokenize(input)?;
    if toks.is_empty() {
        return err(0, "empty input");
    }
    let mut p = Parser {
        toks,
        pos: 0,
        vars,
        allow_forms,
        len: input.len(),
    };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return err(p.here(), "trailing input");
    }
    Ok(v)
}

/// Parses a bivariate polynomial in `x`, `y`.
pub fn parse_bivar(input: &str) -> Result<BivarPoly, ParseError> {
    let v = run_parser(input, &[("x", 0), ("y", 1)], false)?;
    Ok(v.s)
}

/// Parses a univariate polynomial in the tag variable of `var`.
pub fn parse_unipoly(input: &str, var: Var) -> Result<UniPoly, ParseError> {
    let v = run_parser(input, &[(var.name(), 1)], false)?;
    // The variable was parsed into the y-slot; restrict to it.
    if !v.s.iter().all(|(&(i, _), _)| i == 0) {
        unreachable!("x-slot unused for univariate parsing");
    }
    Ok(v.s.restrict_x0(var))
}

/// Parses a one-form `(P)dx + (Q)dy`.
pub fn parse_one_form(input: &str) -> Result<OneForm, ParseError> {
    let v = run_parser(input, &[("x", 0), ("y", 1)], true)?;
    if !v.s.is_zero() {
        return err(
            0,
            "expression has a scalar part; a one-form needs dx/dy in every term",
        );
    }
    Ok(OneForm::new(v.dx, v.dy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{exterior_derivative, rat, rat_frac};

    #[test]
    fn parse_print_roundtrip_bivar() {
        let p = parse_bivar("3/2*x^2*y - y^3 + 1").unwrap();
        assert_eq!(p.coeff(2, 1), rat_frac(3, 2));
        assert_eq!(parse_bivar(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn parse_unipoly_in_h() {
        let m = parse_unipoly("h^2 - 4/9", Var::H).unwrap();
        assert_eq!(m.coeff(2), rat(1));
        assert_eq!(m.coeff(0), rat_frac(-4, 9));
        assert_eq!(parse_unipoly(&m.to_string(), Var::H).unwrap(), m);
    }

    #[test]
    fn parse_one_form_both_components() {
        let w = parse_one_form("(y)dx + (x^2 - 1)dy").unwrap();
        assert_eq!(w.p, BivarPoly::var_y());
        assert_eq!(w.q.coeff(2, 0), rat(1));
        assert_eq!(parse_one_form(&w.to_string()).unwrap(), w);
        // d(x^2 y) parses as 2xy dx + x^2 dy and d of it is 0
        let dg = parse_one_form("(2*x*y)dx + (x^2)dy").unwrap();
        assert!(exterior_derivative(&dg).is_zero());
    }

    #[test]
    fn errors_carry_position() {
        let e = parse_bivar("x + $").unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(parse_one_form("x + y").is_err());
        assert!(parse_bivar("x ^ y").is_err());
    }
}
