//! Evolutionary derivatives `D_t` along a flow `u_t = K`, acting by `u_k -> D_x^k K`.

use super::bivector::BivectorPoly;
use super::scalar::ScalarPoly;
use super::vector::VectorPoly;

/// `D_x^k K` for `k = 0..=max_order`, computed once per call.
struct FlowDerivatives(Vec<VectorPoly>);

impl FlowDerivatives {
    fn new(flow: &VectorPoly, max_order: Option<u32>) -> Self {
        let mut out = vec![flow.clone()];
        if let Some(m) = max_order {
            for _ in 0..m {
                let next = out.last().unwrap().d_x();
                out.push(next);
            }
        }
        FlowDerivatives(out)
    }

    fn get(&self, k: u32) -> &VectorPoly {
        &self.0[k as usize]
    }
}

fn evolve_scalar(p: &ScalarPoly, d: &FlowDerivatives) -> ScalarPoly {
    let mut out = ScalarPoly::zero();
    for (m, c) in p.terms() {
        for (pos, pairing) in m.pairings().iter().enumerate() {
            let (i, j) = (pairing.i(), pairing.j());
            let dt = &d.get(i).dot(&VectorPoly::u(j)) + &VectorPoly::u(i).dot(d.get(j));
            out.add_assign_ref(&dt.mul_monomial(&m.without(pos), c));
        }
    }
    out
}

impl ScalarPoly {
    pub fn evolutionary_derivative(&self, flow: &VectorPoly) -> ScalarPoly {
        let d = FlowDerivatives::new(flow, self.max_order());
        evolve_scalar(self, &d)
    }
}

impl VectorPoly {
    pub fn evolutionary_derivative(&self, flow: &VectorPoly) -> VectorPoly {
        let d = FlowDerivatives::new(flow, self.max_order());
        let mut out = VectorPoly::zero();
        for (k, c) in self.terms() {
            out.add_assign_ref(&VectorPoly::term(k, evolve_scalar(c, &d)));
            out.add_assign_ref(&(c * d.get(k)));
        }
        out
    }
}

impl BivectorPoly {
    pub fn evolutionary_derivative(&self, flow: &VectorPoly) -> BivectorPoly {
        let d = FlowDerivatives::new(flow, self.max_order());
        let mut out = BivectorPoly::zero();
        for ((k, l), a) in self.terms() {
            out.add_wedge(k, l, &evolve_scalar(a, &d));
            let moved = &d.get(k).wedge(&VectorPoly::u(l)) + &VectorPoly::u(k).wedge(d.get(l));
            out.add_assign_ref(&(a * &moved));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffalg::scalar::rat;

    #[test]
    fn translation_flow_is_d_x() {
        let p = &ScalarPoly::pairing(0, 0) * &ScalarPoly::pairing(1, 2);
        assert_eq!(p.evolutionary_derivative(&VectorPoly::u(1)), p.d_x());
        let v = ScalarPoly::pairing(0, 1) * VectorPoly::u(2);
        assert_eq!(v.evolutionary_derivative(&VectorPoly::u(1)), v.d_x());
        let b = &ScalarPoly::pairing(0, 0) * &BivectorPoly::wedge_basis(0, 1);
        assert_eq!(b.evolutionary_derivative(&VectorPoly::u(1)), b.d_x());
    }

    #[test]
    fn u0_along_vmkdv_flow() {
        let flow = &(-&VectorPoly::u(3)) - &(ScalarPoly::pairing(0, 0).scale(&rat(3, 2)) * VectorPoly::u(1));
        assert_eq!(VectorPoly::u(0).evolutionary_derivative(&flow), flow);
    }

    #[test]
    fn norm_along_translation() {
        let got = ScalarPoly::pairing(0, 0).evolutionary_derivative(&VectorPoly::u(1));
        assert_eq!(got, ScalarPoly::pairing(0, 1).scale(&rat(2, 1)));
    }
}
