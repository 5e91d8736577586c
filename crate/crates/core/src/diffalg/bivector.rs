use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::{Coeff, ScalarPoly};
use super::vector::{accumulate_poly, VectorPoly};

/// `sum a_kl (u_k u_l^T - u_l u_k^T)` over `k < l`: an antisymmetric N x N matrix polynomial.
///
/// Only keys with `k < l` are ever stored, so antisymmetry holds by construction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BivectorPoly {
    terms: BTreeMap<(u32, u32), ScalarPoly>,
}

impl BivectorPoly {
    pub fn zero() -> Self {
        BivectorPoly::default()
    }

    /// `u_k u_l^T - u_l u_k^T`
    pub fn wedge_basis(k: u32, l: u32) -> Self {
        let mut out = Self::zero();
        out.add_wedge(k, l, &ScalarPoly::one());
        out
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), ScalarPoly)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for ((k, l), c) in iter {
            out.add_wedge(k, l, &c);
        }
        out
    }

    /// Adds `c * (u_k ∧ u_l)`, normalising the key order.
    pub(crate) fn add_wedge(&mut self, k: u32, l: u32, c: &ScalarPoly) {
        use std::cmp::Ordering;
        match k.cmp(&l) {
            Ordering::Less => accumulate_poly(&mut self.terms, (k, l), c),
            Ordering::Greater => accumulate_poly(&mut self.terms, (l, k), &(-c)),
            Ordering::Equal => {}
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = ((u32, u32), &ScalarPoly)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: u32, l: u32) -> ScalarPoly {
        if k < l {
            self.terms.get(&(k, l)).cloned().unwrap_or_default()
        } else if k > l {
            -self.terms.get(&(l, k)).cloned().unwrap_or_default()
        } else {
            ScalarPoly::zero()
        }
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, p)| (*k, p.scale(c))))
    }

    pub fn max_order(&self) -> Option<u32> {
        self.terms
            .iter()
            .map(|((_, l), c)| c.max_order().map_or(*l, |m| m.max(*l)))
            .max()
    }

    pub fn weight(&self) -> Option<u32> {
        let mut ws = self
            .terms
            .iter()
            .flat_map(|((k, l), c)| c.terms().map(move |(m, _)| m.weight() + k + l + 2));
        let w = ws.next()?;
        ws.all(|x| x == w).then_some(w)
    }

    /// Matrix-vector product: `(u_k u_l^T - u_l u_k^T) v = <u_l,v> u_k - <u_k,v> u_l`.
    pub fn apply(&self, v: &VectorPoly) -> VectorPoly {
        let mut out = VectorPoly::zero();
        for ((k, l), a) in &self.terms {
            let ul_v = VectorPoly::u(*l).dot(v);
            let uk_v = VectorPoly::u(*k).dot(v);
            out.add_assign_ref(&VectorPoly::term(*k, a * &ul_v));
            out.add_assign_ref(&VectorPoly::term(*l, -(a * &uk_v)));
        }
        out
    }

    /// Matrix commutator `[self, other]`, closed in antisymmetric matrices.
    pub fn bracket(&self, other: &BivectorPoly) -> BivectorPoly {
        let mut out = BivectorPoly::zero();
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &other.terms {
                let xy = x * y;
                // [a∧b, c∧d] = <b,c> a∧d - <b,d> a∧c - <a,c> b∧d + <a,d> b∧c
                out.add_wedge(*a, *d, &(&xy * &ScalarPoly::pairing(*b, *c)));
                out.add_wedge(*a, *c, &-(&xy * &ScalarPoly::pairing(*b, *d)));
                out.add_wedge(*b, *d, &-(&xy * &ScalarPoly::pairing(*a, *c)));
                out.add_wedge(*b, *c, &(&xy * &ScalarPoly::pairing(*a, *d)));
            }
        }
        out
    }

    pub fn d_x(&self) -> Self {
        let mut out = BivectorPoly::zero();
        for ((k, l), c) in &self.terms {
            out.add_wedge(*k, *l, &c.d_x());
            out.add_wedge(k + 1, *l, c);
            out.add_wedge(*k, l + 1, c);
        }
        out
    }

    pub(crate) fn add_assign_ref(&mut self, other: &BivectorPoly) {
        for (k, c) in &other.terms {
            accumulate_poly(&mut self.terms, *k, c);
        }
    }
}

impl Add<&BivectorPoly> for &BivectorPoly {
    type Output = BivectorPoly;
    fn add(self, rhs: &BivectorPoly) -> BivectorPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Neg for &BivectorPoly {
    type Output = BivectorPoly;
    fn neg(self) -> BivectorPoly {
        BivectorPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Sub<&BivectorPoly> for &BivectorPoly {
    type Output = BivectorPoly;
    fn sub(self, rhs: &BivectorPoly) -> BivectorPoly {
        self + &(-rhs)
    }
}

impl Mul<&BivectorPoly> for &ScalarPoly {
    type Output = BivectorPoly;
    fn mul(self, rhs: &BivectorPoly) -> BivectorPoly {
        BivectorPoly::from_terms(rhs.terms.iter().map(|(k, c)| (*k, self * c)))
    }
}

super::forward_binops!(BivectorPoly);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_rule() {
        // (u0∧u1) u0 = <u1,u0> u0 - <u0,u0> u1
        let got = BivectorPoly::wedge_basis(0, 1).apply(&VectorPoly::u(0));
        let expected = VectorPoly::from_terms([
            (0, ScalarPoly::pairing(0, 1)),
            (1, -ScalarPoly::pairing(0, 0)),
        ]);
        assert_eq!(got, expected);
    }

    #[test]
    fn wedge_is_antisymmetric() {
        let a = BivectorPoly::wedge_basis(2, 0);
        let b = BivectorPoly::wedge_basis(0, 2);
        assert!((a + b).is_zero());
        assert!(BivectorPoly::wedge_basis(3, 3).is_zero());
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let x = BivectorPoly::wedge_basis(0, 1);
        let y = BivectorPoly::wedge_basis(1, 2);
        assert_eq!(x.bracket(&y), -y.bracket(&x));
    }

    #[test]
    fn d_x_leibniz() {
        // D_x (u0∧u1) = u1∧u1 + u0∧u2 = u0∧u2
        assert_eq!(BivectorPoly::wedge_basis(0, 1).d_x(), BivectorPoly::wedge_basis(0, 2));
    }
}
