use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;

use super::bivector::BivectorPoly;
use super::monomial::Monomial;
use super::scalar::{Coeff, ScalarPoly};
use super::vector::VectorPoly;
use crate::error::{Error, Result};

/// Numeric values `u, u_1, ..., u_m` of a vector field and its x-derivatives at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    orders: Vec<DVector<f64>>,
}

impl Jet {
    pub fn new(orders: Vec<DVector<f64>>) -> Result<Self> {
        let Some(first) = orders.first() else {
            return Err(Error::InvalidJet("empty jet".into()));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::InvalidJet("N must be at least 1".into()));
        }
        if orders.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidJet("orders have different lengths".into()));
        }
        Ok(Jet { orders })
    }

    pub fn from_slices(orders: &[&[f64]]) -> Result<Self> {
        Self::new(orders.iter().map(|o| DVector::from_column_slice(o)).collect())
    }

    /// Number of components N.
    pub fn dim(&self) -> usize {
        self.orders[0].len()
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn order(&self, k: u32) -> Result<&DVector<f64>> {
        self.orders.get(k as usize).ok_or(Error::MissingJetOrder {
            order: k,
            available: self.orders.len(),
        })
    }

    fn check(&self, max_order: Option<u32>) -> Result<()> {
        match max_order {
            Some(m) => self.order(m).map(|_| ()),
            None => Ok(()),
        }
    }
}

pub(crate) fn coeff_f64(c: &Coeff) -> f64 {
    c.to_f64().expect("rational coefficient representable as f64")
}

fn eval_monomial(m: &Monomial, jet: &Jet) -> Result<f64> {
    m.pairings().iter().try_fold(1.0, |acc, p| {
        Ok(acc * jet.order(p.i())?.dot(jet.order(p.j())?))
    })
}

impl ScalarPoly {
    pub fn eval(&self, jet: &Jet) -> Result<f64> {
        jet.check(self.max_order())?;
        self.terms()
            .try_fold(0.0, |acc, (m, c)| Ok(acc + coeff_f64(c) * eval_monomial(m, jet)?))
    }
}

impl VectorPoly {
    pub fn eval(&self, jet: &Jet) -> Result<DVector<f64>> {
        jet.check(self.max_order())?;
        let mut out = DVector::zeros(jet.dim());
        for (k, c) in self.terms() {
            out.axpy(c.eval(jet)?, jet.order(k)?, 1.0);
        }
        Ok(out)
    }
}

impl BivectorPoly {
    pub fn eval(&self, jet: &Jet) -> Result<DMatrix<f64>> {
        jet.check(self.max_order())?;
        let n = jet.dim();
        let mut out = DMatrix::zeros(n, n);
        for ((k, l), c) in self.terms() {
            let a = c.eval(jet)?;
            let (uk, ul) = (jet.order(k)?, jet.order(l)?);
            out += (uk * ul.transpose() - ul * uk.transpose()) * a;
        }
        Ok(out)
    }
}
