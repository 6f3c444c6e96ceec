//! Jacobian-ideal division: the operator `m(H)/dH` on polynomial 2-forms,
//! and Gelfand-Leray derivatives of 1-forms.

use super::hamiltonian::Hamiltonian;
use crate::algebra::{OneForm, TwoForm, UniPoly};

/// Divides `μ = R dx∧dy` by `dH` after clearing with `m(H)`:
/// returns `η = B dx − A dy` with `m(H)·R = A·H_x + B·H_y`, so that
/// `η∧dH = m(H)·μ` exactly.
pub fn jacobian_divide(mu: &TwoForm, ham: &Hamiltonian) -> OneForm {
    let (a, b) = ham.jacobian_witness();
    // A = R·a, B = R·b.
    let big_a = &mu.r * a;
    let big_b = &mu.r * b;
    OneForm::new(big_b, -&big_a)
}

/// The Gelfand-Leray numerator: `η` with `dH∧η = m(H)·μ`, i.e. the
/// representative of `m(H)·(μ/dH)` modulo `dH`-multiples.
pub fn gl_numerator(mu: &TwoForm, ham: &Hamiltonian) -> OneForm {
    // dH∧η = -η∧dH, so negate the jacobian_divide output.
    -&jacobian_divide(mu, ham)
}

/// Gelfand-Leray derivative data of a 1-form: `(η, m)` with
/// `dH∧η = m(H)·dθ`, so `dθ/dH = η/m(H)` on level curves and
/// `d/dt ∮_{δ(t)} θ = (1/m(t)) ∮_{δ(t)} η`.
pub fn gelfand_leray(theta: &OneForm, ham: &Hamiltonian) -> (OneForm, UniPoly) {
    let d_theta = crate::algebra::exterior_derivative(theta);
    (gl_numerator(&d_theta, ham), ham.m().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{exterior_derivative, parse_bivar, parse_one_form, wedge, BivarPoly, Rat};
    use crate::petrov::certify;
    use num_traits::One;

    fn wedge_with_dh(eta: &OneForm, ham: &Hamiltonian) -> TwoForm {
        let dh = OneForm::new(ham.hx().clone(), ham.hy().clone());
        wedge(eta, &dh)
    }

    #[test]
    fn jacobian_divide_circle_area_form() {
        let ham = certify(&parse_bivar("1/2*x^2 + 1/2*y^2").unwrap()).unwrap();
        let mu = TwoForm::new(BivarPoly::one());
        let eta = jacobian_divide(&mu, &ham);
        // η = (y dx - x dy)/2
        assert_eq!(eta.to_string(), "(1/2*y)dx + (-1/2*x)dy");
        // η∧dH = m(H)·μ = H dx∧dy
        let lhs = wedge_with_dh(&eta, &ham);
        let rhs = BivarPoly::compose_univariate(ham.m(), ham.poly());
        assert_eq!(lhs.r, rhs);
    }

    #[test]
    fn wedge_identity_holds_for_random_forms() {
        let ham = certify(&parse_bivar("1/2*y^2 + 1/3*x^3 - x").unwrap()).unwrap();
        let m_of_h = BivarPoly::compose_univariate(ham.m(), ham.poly());
        for (i, j) in [(0u32, 0u32), (1, 2), (3, 1), (0, 4)] {
            let mu = TwoForm::new(BivarPoly::monomial(Rat::one(), i, j));
            let eta = jacobian_divide(&mu, &ham);
            assert_eq!(wedge_with_dh(&eta, &ham).r, &m_of_h * &mu.r);
        }
        // μ = 0 -> η = 0
        assert!(jacobian_divide(&TwoForm::zero(), &ham).is_zero());
    }

    #[test]
    fn gelfand_leray_of_exact_form_wedges_to_zero() {
        let ham = certify(&parse_bivar("1/2*y^2 + 1/3*x^3 - x").unwrap()).unwrap();
        let g = parse_bivar("x^2*y - y^2").unwrap();
        let (eta, _m) = gelfand_leray(&OneForm::d_of(&g), &ham);
        assert!(wedge_with_dh(&eta, &ham).is_zero());
    }

    #[test]
    fn gelfand_leray_sign_on_circle() {
        // For θ = y dx on the circle, the derivative of ∮θ with respect to
        // the level is ∮η/m(t); with the flow orientation this must be the
        // form (y dx - x dy)/2, not its negative.
        let ham = certify(&parse_bivar("1/2*x^2 + 1/2*y^2").unwrap()).unwrap();
        let theta = parse_one_form("(y)dx").unwrap();
        let (eta, m) = gelfand_leray(&theta, &ham);
        assert_eq!(m.to_string(), "h");
        assert_eq!(eta.to_string(), "(1/2*y)dx + (-1/2*x)dy");
        // dH∧η = m(H)·dθ exactly.
        let dh = OneForm::new(ham.hx().clone(), ham.hy().clone());
        let lhs = wedge(&dh, &eta);
        let dtheta = exterior_derivative(&theta);
        let rhs = &BivarPoly::compose_univariate(ham.m(), ham.poly()) * &dtheta.r;
        assert_eq!(lhs.r, rhs);
    }

    #[test]
    fn gl_of_zero_is_zero() {
        let ham = certify(&parse_bivar("1/2*x^2 + 1/2*y^2").unwrap()).unwrap();
        let (eta, m) = gelfand_leray(&OneForm::zero(), &ham);
        assert!(eta.is_zero());
        assert!(m.leading().map(|c| c == &Rat::one()).unwrap_or(false));
    }
}
