use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::bivector::BivectorPoly;
use super::scalar::{Coeff, ScalarPoly};

/// `sum_k c_k * u_k` with pairing-polynomial coefficients `c_k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VectorPoly {
    terms: BTreeMap<u32, ScalarPoly>,
}

pub(crate) fn accumulate_poly<K: Ord>(map: &mut BTreeMap<K, ScalarPoly>, key: K, c: &ScalarPoly) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c.clone());
        }
        Entry::Occupied(mut e) => {
            e.get_mut().add_assign_ref(c);
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl VectorPoly {
    pub fn zero() -> Self {
        VectorPoly::default()
    }

    /// The k-th x-derivative `u_k`.
    pub fn u(k: u32) -> Self {
        Self::term(k, ScalarPoly::one())
    }

    pub fn term(k: u32, c: ScalarPoly) -> Self {
        let mut terms = BTreeMap::new();
        accumulate_poly(&mut terms, k, &c);
        VectorPoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, ScalarPoly)>>(iter: I) -> Self {
        let mut terms = BTreeMap::new();
        for (k, c) in iter {
            accumulate_poly(&mut terms, k, &c);
        }
        VectorPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u32, &ScalarPoly)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: u32) -> ScalarPoly {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    /// Number of `(order, monomial)` terms.
    pub fn term_count(&self) -> usize {
        self.terms.values().map(ScalarPoly::len).sum()
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, p)| (*k, p.scale(c))))
    }

    pub fn max_order(&self) -> Option<u32> {
        self.terms
            .iter()
            .map(|(k, c)| c.max_order().map_or(*k, |m| m.max(*k)))
            .max()
    }

    /// Weight if homogeneous.
    pub fn weight(&self) -> Option<u32> {
        let mut ws = self
            .terms
            .iter()
            .flat_map(|(k, c)| c.terms().map(move |(m, _)| m.weight() + k + 1));
        let w = ws.next()?;
        ws.all(|x| x == w).then_some(w)
    }

    /// Inner product `<self, other>`, expanded over pairings.
    pub fn dot(&self, other: &VectorPoly) -> ScalarPoly {
        let mut out = ScalarPoly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let prod = &(ca * cb) * &ScalarPoly::pairing(*a, *b);
                out.add_assign_ref(&prod);
            }
        }
        out
    }

    /// `self * other^T - other * self^T`
    pub fn wedge(&self, other: &VectorPoly) -> BivectorPoly {
        let mut out = BivectorPoly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_wedge(*a, *b, &(ca * cb));
            }
        }
        out
    }

    pub fn d_x(&self) -> Self {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            accumulate_poly(&mut terms, *k, &c.d_x());
            accumulate_poly(&mut terms, k + 1, c);
        }
        VectorPoly { terms }
    }

    pub fn d_x_n(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |p, _| p.d_x())
    }

    pub(crate) fn add_assign_ref(&mut self, other: &VectorPoly) {
        for (k, c) in &other.terms {
            accumulate_poly(&mut self.terms, *k, c);
        }
    }
}

impl Add<&VectorPoly> for &VectorPoly {
    type Output = VectorPoly;
    fn add(self, rhs: &VectorPoly) -> VectorPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Neg for &VectorPoly {
    type Output = VectorPoly;
    fn neg(self) -> VectorPoly {
        VectorPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Sub<&VectorPoly> for &VectorPoly {
    type Output = VectorPoly;
    fn sub(self, rhs: &VectorPoly) -> VectorPoly {
        self + &(-rhs)
    }
}

impl Mul<&VectorPoly> for &ScalarPoly {
    type Output = VectorPoly;
    fn mul(self, rhs: &VectorPoly) -> VectorPoly {
        VectorPoly::from_terms(rhs.terms.iter().map(|(k, c)| (*k, self * c)))
    }
}

impl Mul<VectorPoly> for ScalarPoly {
    type Output = VectorPoly;
    fn mul(self, rhs: VectorPoly) -> VectorPoly {
        &self * &rhs
    }
}

super::forward_binops!(VectorPoly);
