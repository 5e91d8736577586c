//! The Euler (variational derivative) operator on scalar differential polynomials.
//!
//! A scalar polynomial without constant term is a total x-derivative exactly when its
//! variational derivative vanishes, which makes this an exactness oracle that shares
//! no code with the ansatz integrator.

use super::scalar::ScalarPoly;
use super::vector::VectorPoly;

/// `∂p/∂u_k`, a vector polynomial: `∂<u_i,u_j>/∂u_k = δ_ik u_j + δ_jk u_i`.
pub fn partial(p: &ScalarPoly, k: u32) -> VectorPoly {
    let mut out = VectorPoly::zero();
    for (m, c) in p.terms() {
        for (pos, pairing) in m.pairings().iter().enumerate() {
            let rest = ScalarPoly::term(m.without(pos), c.clone());
            if pairing.i() == k {
                out.add_assign_ref(&VectorPoly::term(pairing.j(), rest.clone()));
            }
            if pairing.j() == k {
                out.add_assign_ref(&VectorPoly::term(pairing.i(), rest));
            }
        }
    }
    out
}

/// `E(p) = sum_k (-D_x)^k ∂p/∂u_k`
pub fn variational_derivative(p: &ScalarPoly) -> VectorPoly {
    let Some(max) = p.max_order() else {
        return VectorPoly::zero();
    };
    let mut out = VectorPoly::zero();
    for k in 0..=max {
        let mut term = partial(p, k);
        for _ in 0..k {
            term = -term.d_x();
        }
        out.add_assign_ref(&term);
    }
    out
}

/// True when `p` (ignoring any constant term) is a total x-derivative.
pub fn is_total_derivative(p: &ScalarPoly) -> bool {
    variational_derivative(p).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffalg::scalar::rat;

    #[test]
    fn norm_squared_has_nonzero_variation() {
        let e = variational_derivative(&ScalarPoly::pairing(0, 0));
        assert_eq!(e, VectorPoly::u(0).scale(&rat(2, 1)));
    }

    #[test]
    fn total_derivatives_are_annihilated() {
        let q = &ScalarPoly::pairing(0, 0) * &ScalarPoly::pairing(0, 1) + ScalarPoly::pairing(1, 3);
        assert!(is_total_derivative(&q.d_x()));
        assert!(!is_total_derivative(&q));
    }
}
