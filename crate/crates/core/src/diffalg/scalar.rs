use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::monomial::Monomial;

/// Exact rational coefficient.
pub type Coeff = BigRational;

pub(crate) fn rat(n: i64, d: i64) -> Coeff {
    BigRational::new(n.into(), d.into())
}

/// Adds `c` to the entry at `key`, removing the entry when it cancels.
pub(crate) fn accumulate<K: Ord>(map: &mut BTreeMap<K, Coeff>, key: K, c: Coeff) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// A polynomial in the pairings `<u_i,u_j>` with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarPoly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl ScalarPoly {
    pub fn zero() -> Self {
        ScalarPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        accumulate(&mut terms, m, c);
        ScalarPoly { terms }
    }

    /// `<u_i,u_j>`
    pub fn pairing(i: u32, j: u32) -> Self {
        Self::term(Monomial::pairing(i, j), Coeff::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Coeff)>>(iter: I) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in iter {
            accumulate(&mut terms, m, c);
        }
        ScalarPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    /// The constant coefficient if this polynomial has no other terms.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ScalarPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ScalarPoly {
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    /// Weight if every term shares one weight; `None` for the zero polynomial or mixed weights.
    pub fn weight(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::weight);
        let w = it.next()?;
        it.all(|x| x == w).then_some(w)
    }

    pub fn max_order(&self) -> Option<u32> {
        self.terms.keys().filter_map(Monomial::max_order).max()
    }

    /// Splits into components keyed by `(weight, pairing count)`.
    pub fn graded_parts(&self) -> BTreeMap<(u32, usize), ScalarPoly> {
        let mut out: BTreeMap<(u32, usize), ScalarPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry((m.weight(), m.len()))
                .or_default()
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Total x-derivative.
    pub fn d_x(&self) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            for (dm, k) in m.d_x() {
                accumulate(&mut terms, dm, c * Coeff::from_integer(k.into()));
            }
        }
        ScalarPoly { terms }
    }

    pub fn d_x_n(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |p, _| p.d_x())
    }

    pub(crate) fn add_assign_ref(&mut self, other: &ScalarPoly) {
        for (m, c) in &other.terms {
            accumulate(&mut self.terms, m.clone(), c.clone());
        }
    }
}

impl From<Coeff> for ScalarPoly {
    fn from(c: Coeff) -> Self {
        ScalarPoly::constant(c)
    }
}

impl From<i64> for ScalarPoly {
    fn from(c: i64) -> Self {
        ScalarPoly::constant(Coeff::from_integer(c.into()))
    }
}

impl Add<&ScalarPoly> for &ScalarPoly {
    type Output = ScalarPoly;
    fn add(self, rhs: &ScalarPoly) -> ScalarPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Neg for &ScalarPoly {
    type Output = ScalarPoly;
    fn neg(self) -> ScalarPoly {
        ScalarPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Sub<&ScalarPoly> for &ScalarPoly {
    type Output = ScalarPoly;
    fn sub(self, rhs: &ScalarPoly) -> ScalarPoly {
        self + &(-rhs)
    }
}

impl Mul<&ScalarPoly> for &ScalarPoly {
    type Output = ScalarPoly;
    fn mul(self, rhs: &ScalarPoly) -> ScalarPoly {
        let mut terms = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                accumulate(&mut terms, a.mul(b), x * y);
            }
        }
        ScalarPoly { terms }
    }
}

impl Mul<ScalarPoly> for ScalarPoly {
    type Output = ScalarPoly;
    fn mul(self, rhs: ScalarPoly) -> ScalarPoly {
        &self * &rhs
    }
}

super::forward_binops!(ScalarPoly);
