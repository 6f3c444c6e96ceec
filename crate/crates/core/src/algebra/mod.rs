//! Exact-rational scalars, polynomials and differential forms.
//!
//! Everything in this module is exact: coefficients are arbitrary-precision
//! rationals and no operation rounds. The numeric layer converts to `f64`
//! only at evaluation time.

mod bivar;
mod forms;
mod parse;
mod ratfunc;
mod unipoly;

pub use bivar::BivarPoly;
pub use forms::{exterior_derivative, pullback_to_transversal, wedge, OneForm, TwoForm};
pub use parse::{parse_bivar, parse_one_form, parse_unipoly, ParseError};
pub use ratfunc::RationalFunction;
pub use unipoly::{UniPoly, Var};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational scalar. Always stored reduced with a positive denominator.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics if `d == 0`.
pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Renders a rational as `n` or `n/d`.
pub fn rat_to_string(r: &Rat) -> String {
    use num_traits::One;
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn rat_is_canonical() {
        let r = rat_frac(2, -4);
        assert_eq!(rat_to_string(&r), "-1/2");
        assert!(rat(0).is_zero());
    }
}
