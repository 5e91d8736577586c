//! Formal integration `D_x^{-1}` by a weight-graded ansatz.
//!
//! `D_x` preserves polynomial degree in `u` and raises the scaling weight by one, so
//! an integrand of weight `w` and degree `d` can only come from the span of basis
//! elements of weight `w - 1` and degree `d`. That span is finite; we apply `D_x` to
//! each basis element and solve the resulting exact linear system. On polynomials
//! without a constant term `D_x` is injective, so a solution is unique when it exists.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::bivector::BivectorPoly;
use super::monomial::Monomial;
use super::scalar::{accumulate, Coeff, ScalarPoly};
use super::vector::VectorPoly;
use crate::error::{Error, Result};

/// A polynomial kind that can be flattened into basis coordinates graded by
/// `(weight, degree)`.
pub trait Graded: Sized {
    type Key: Ord + Clone + std::fmt::Debug;

    fn flatten(&self) -> BTreeMap<Self::Key, Coeff>;
    fn unflatten(terms: BTreeMap<Self::Key, Coeff>) -> Self;
    /// `(weight, degree in u)` of a basis element.
    fn grade(key: &Self::Key) -> (u32, u32);
    /// Every basis element of the given weight and degree.
    fn basis(weight: u32, degree: u32) -> Vec<Self::Key>;
    fn d_x_key(key: &Self::Key) -> BTreeMap<Self::Key, Coeff>;

    /// Splits into homogeneous components keyed by `(weight, degree)`.
    fn graded_components(&self) -> BTreeMap<(u32, u32), BTreeMap<Self::Key, Coeff>> {
        let mut out: BTreeMap<(u32, u32), BTreeMap<Self::Key, Coeff>> = BTreeMap::new();
        for (k, c) in self.flatten() {
            out.entry(Self::grade(&k)).or_default().insert(k, c);
        }
        out
    }
}

fn monomial_coeffs(m: &Monomial) -> BTreeMap<Monomial, Coeff> {
    m.d_x()
        .into_iter()
        .map(|(k, n)| (k, Coeff::from_integer(n.into())))
        .collect()
}

impl Graded for ScalarPoly {
    type Key = Monomial;

    fn flatten(&self) -> BTreeMap<Monomial, Coeff> {
        self.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
    }

    fn unflatten(terms: BTreeMap<Monomial, Coeff>) -> Self {
        ScalarPoly::from_terms(terms)
    }

    fn grade(key: &Monomial) -> (u32, u32) {
        (key.weight(), 2 * key.len() as u32)
    }

    fn basis(weight: u32, degree: u32) -> Vec<Monomial> {
        if degree % 2 == 1 {
            return Vec::new();
        }
        Monomial::enumerate(weight, (degree / 2) as usize)
    }

    fn d_x_key(key: &Monomial) -> BTreeMap<Monomial, Coeff> {
        monomial_coeffs(key)
    }
}

impl Graded for VectorPoly {
    type Key = (u32, Monomial);

    fn flatten(&self) -> BTreeMap<(u32, Monomial), Coeff> {
        self.terms()
            .flat_map(|(k, c)| c.terms().map(move |(m, x)| ((k, m.clone()), x.clone())))
            .collect()
    }

    fn unflatten(terms: BTreeMap<(u32, Monomial), Coeff>) -> Self {
        VectorPoly::from_terms(
            terms
                .into_iter()
                .map(|((k, m), c)| (k, ScalarPoly::term(m, c))),
        )
    }

    fn grade((k, m): &(u32, Monomial)) -> (u32, u32) {
        (m.weight() + k + 1, 2 * m.len() as u32 + 1)
    }

    fn basis(weight: u32, degree: u32) -> Vec<(u32, Monomial)> {
        if degree % 2 == 0 {
            return Vec::new();
        }
        let count = ((degree - 1) / 2) as usize;
        (0..weight)
            .flat_map(|k| {
                Monomial::enumerate(weight - k - 1, count)
                    .into_iter()
                    .map(move |m| (k, m))
            })
            .collect()
    }

    fn d_x_key((k, m): &(u32, Monomial)) -> BTreeMap<(u32, Monomial), Coeff> {
        VectorPoly::term(*k, ScalarPoly::term(m.clone(), Coeff::one()))
            .d_x()
            .flatten()
    }
}

impl Graded for BivectorPoly {
    type Key = ((u32, u32), Monomial);

    fn flatten(&self) -> BTreeMap<((u32, u32), Monomial), Coeff> {
        self.terms()
            .flat_map(|(kl, c)| c.terms().map(move |(m, x)| ((kl, m.clone()), x.clone())))
            .collect()
    }

    fn unflatten(terms: BTreeMap<((u32, u32), Monomial), Coeff>) -> Self {
        BivectorPoly::from_terms(
            terms
                .into_iter()
                .map(|(((k, l), m), c)| ((k, l), ScalarPoly::term(m, c))),
        )
    }

    fn grade(((k, l), m): &((u32, u32), Monomial)) -> (u32, u32) {
        (m.weight() + k + l + 2, 2 * m.len() as u32 + 2)
    }

    fn basis(weight: u32, degree: u32) -> Vec<((u32, u32), Monomial)> {
        if degree % 2 == 1 || degree < 2 || weight < 3 {
            return Vec::new();
        }
        let count = ((degree - 2) / 2) as usize;
        let mut out = Vec::new();
        for l in 1..=weight - 2 {
            for k in 0..l {
                if k + l + 2 > weight {
                    break;
                }
                for m in Monomial::enumerate(weight - k - l - 2, count) {
                    out.push(((k, l), m));
                }
            }
        }
        out
    }

    fn d_x_key(((k, l), m): &((u32, u32), Monomial)) -> BTreeMap<((u32, u32), Monomial), Coeff> {
        BivectorPoly::from_terms([((*k, *l), ScalarPoly::term(m.clone(), Coeff::one()))])
            .d_x()
            .flatten()
    }
}

/// Returns `q` with `D_x q = p` and no constant term, or `NotExact`.
pub fn d_x_inverse<T: Graded>(p: &T) -> Result<T> {
    let mut solution = BTreeMap::new();
    for ((weight, degree), component) in p.graded_components() {
        if weight == 0 {
            return Err(Error::NotExact { weight, degree });
        }
        for (k, c) in integrate_component::<T>(weight, degree, &component)? {
            accumulate(&mut solution, k, c);
        }
    }
    Ok(T::unflatten(solution))
}

fn integrate_component<T: Graded>(
    weight: u32,
    degree: u32,
    target: &BTreeMap<T::Key, Coeff>,
) -> Result<BTreeMap<T::Key, Coeff>> {
    let not_exact = Error::NotExact { weight, degree };
    let basis = T::basis(weight - 1, degree);
    let columns: Vec<BTreeMap<T::Key, Coeff>> = basis.iter().map(T::d_x_key).collect();

    let mut row_index: BTreeMap<T::Key, usize> = BTreeMap::new();
    for key in columns.iter().flat_map(|c| c.keys()) {
        let next = row_index.len();
        row_index.entry(key.clone()).or_insert(next);
    }
    if target.keys().any(|k| !row_index.contains_key(k)) {
        return Err(not_exact);
    }

    let (rows, cols) = (row_index.len(), basis.len());
    let mut a = vec![vec![Coeff::zero(); cols + 1]; rows];
    for (j, col) in columns.iter().enumerate() {
        for (k, c) in col {
            a[row_index[k]][j] = c.clone();
        }
    }
    for (k, c) in target {
        a[row_index[k]][cols] = c.clone();
    }

    let x = solve_exact(a, cols).ok_or(not_exact)?;
    Ok(basis
        .into_iter()
        .zip(x)
        .filter(|(_, c)| !c.is_zero())
        .collect())
}

/// Gauss-Jordan elimination on an augmented matrix; `None` when inconsistent.
/// Free variables are set to zero.
fn solve_exact(mut a: Vec<Vec<Coeff>>, cols: usize) -> Option<Vec<Coeff>> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r][c..].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Coeff::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = a[i][cols].clone();
    }
    Some(x)
}

impl ScalarPoly {
    pub fn d_x_inverse(&self) -> Result<ScalarPoly> {
        d_x_inverse(self)
    }
}

impl VectorPoly {
    pub fn d_x_inverse(&self) -> Result<VectorPoly> {
        d_x_inverse(self)
    }
}

impl BivectorPoly {
    pub fn d_x_inverse(&self) -> Result<BivectorPoly> {
        d_x_inverse(self)
    }
}
