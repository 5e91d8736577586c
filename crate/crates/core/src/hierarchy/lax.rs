use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diffalg::{BivectorPoly, Coeff, Jet, ScalarPoly, VectorPoly};
use crate::error::{Error, Result};

/// One λ-coefficient of a Lax matrix: the so(N+2) element
///
/// ```text
/// [  0    a   v1^T ]
/// [ -a    0   v2^T ]
/// [ -v1  -v2   W   ]
/// ```
///
/// Skew-symmetry holds by construction since `W` is a bivector.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaxCoeff {
    pub a: ScalarPoly,
    pub v1: VectorPoly,
    pub v2: VectorPoly,
    pub w: BivectorPoly,
}

impl LaxCoeff {
    pub fn zero() -> Self {
        LaxCoeff::default()
    }

    /// The constant element `J` (a = 1).
    pub fn j() -> Self {
        LaxCoeff { a: ScalarPoly::one(), ..Default::default() }
    }

    /// The potential `U` (v2 = u).
    pub fn u() -> Self {
        Self::from_v2(VectorPoly::u(0))
    }

    pub fn from_v2(v2: VectorPoly) -> Self {
        LaxCoeff { v2, ..Default::default() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.v1.is_zero() && self.v2.is_zero() && self.w.is_zero()
    }

    fn map(&self, fs: impl Fn(&ScalarPoly) -> ScalarPoly, fv: impl Fn(&VectorPoly) -> VectorPoly, fw: impl Fn(&BivectorPoly) -> BivectorPoly) -> Self {
        LaxCoeff { a: fs(&self.a), v1: fv(&self.v1), v2: fv(&self.v2), w: fw(&self.w) }
    }

    pub fn add(&self, other: &LaxCoeff) -> Self {
        LaxCoeff {
            a: &self.a + &other.a,
            v1: &self.v1 + &other.v1,
            v2: &self.v2 + &other.v2,
            w: &self.w + &other.w,
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a, |v| -v, |w| -w)
    }

    pub fn sub(&self, other: &LaxCoeff) -> Self {
        self.add(&other.neg())
    }

    /// Multiplication by a scalar differential polynomial.
    pub fn times(&self, s: &ScalarPoly) -> Self {
        self.map(|a| s * a, |v| s * v, |w| s * w)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        self.map(|a| a.scale(c), |v| v.scale(c), |w| w.scale(c))
    }

    /// Matrix commutator `[self, other]`, computed block-wise.
    pub fn commutator(&self, y: &LaxCoeff) -> LaxCoeff {
        let x = self;
        let a = &y.v1.dot(&x.v2) - &x.v1.dot(&y.v2);
        let v1 = &(&x.a * &y.v2) - &(&y.a * &x.v2);
        let v1 = &(&v1 - &y.w.apply(&x.v1)) + &x.w.apply(&y.v1);
        let v2 = &(&y.a * &x.v1) - &(&x.a * &y.v1);
        let v2 = &(&v2 - &y.w.apply(&x.v2)) + &x.w.apply(&y.v2);
        let w = &(&x.w.bracket(&y.w) - &x.v1.wedge(&y.v1)) - &x.v2.wedge(&y.v2);
        LaxCoeff { a, v1, v2, w }
    }

    pub fn d_x(&self) -> Self {
        self.map(ScalarPoly::d_x, VectorPoly::d_x, BivectorPoly::d_x)
    }

    pub fn evolutionary_derivative(&self, flow: &VectorPoly) -> Self {
        self.map(
            |a| a.evolutionary_derivative(flow),
            |v| v.evolutionary_derivative(flow),
            |w| w.evolutionary_derivative(flow),
        )
    }

    /// Block-wise `D_x^{-1}`.
    pub fn d_x_inverse(&self) -> Result<Self> {
        Ok(LaxCoeff {
            a: self.a.d_x_inverse()?,
            v1: self.v1.d_x_inverse()?,
            v2: self.v2.d_x_inverse()?,
            w: self.w.d_x_inverse()?,
        })
    }

    /// Numeric (N+2) x (N+2) matrix at a jet.
    pub fn eval(&self, jet: &Jet) -> Result<DMatrix<f64>> {
        let n = jet.dim();
        let mut m = DMatrix::zeros(n + 2, n + 2);
        let a = self.a.eval(jet)?;
        m[(0, 1)] = a;
        m[(1, 0)] = -a;
        for (row, v) in [(0, &self.v1), (1, &self.v2)] {
            let vals = v.eval(jet)?;
            for k in 0..n {
                m[(row, k + 2)] = vals[k];
                m[(k + 2, row)] = -vals[k];
            }
        }
        let w = self.w.eval(jet)?;
        m.view_mut((2, 2), (n, n)).copy_from(&w);
        Ok(m)
    }
}

/// Text form of one coefficient, used in the JSON block-matrix schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaxCoeffText {
    pub a: String,
    pub v1: String,
    pub v2: String,
    #[serde(rename = "W")]
    pub w: String,
}

impl From<&LaxCoeff> for LaxCoeffText {
    fn from(c: &LaxCoeff) -> Self {
        LaxCoeffText {
            a: c.a.to_string(),
            v1: c.v1.to_string(),
            v2: c.v2.to_string(),
            w: c.w.to_string(),
        }
    }
}

impl TryFrom<&LaxCoeffText> for LaxCoeff {
    type Error = Error;
    fn try_from(t: &LaxCoeffText) -> Result<Self> {
        Ok(LaxCoeff {
            a: t.a.parse()?,
            v1: t.v1.parse()?,
            v2: t.v2.parse()?,
            w: t.w.parse()?,
        })
    }
}

/// A polynomial in the spectral parameter λ with so(N+2)-valued coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaxMatrix {
    coeffs: BTreeMap<u32, LaxCoeff>,
}

impl LaxMatrix {
    pub fn zero() -> Self {
        LaxMatrix::default()
    }

    pub fn from_coeffs<I: IntoIterator<Item = (u32, LaxCoeff)>>(iter: I) -> Self {
        let mut out = LaxMatrix::zero();
        for (d, c) in iter {
            out.add_at(d, &c);
        }
        out
    }

    pub fn monomial(degree: u32, c: LaxCoeff) -> Self {
        Self::from_coeffs([(degree, c)])
    }

    fn add_at(&mut self, degree: u32, c: &LaxCoeff) {
        if c.is_zero() {
            return;
        }
        let sum = match self.coeffs.get(&degree) {
            Some(prev) => prev.add(c),
            None => c.clone(),
        };
        if sum.is_zero() {
            self.coeffs.remove(&degree);
        } else {
            self.coeffs.insert(degree, sum);
        }
    }

    pub fn coeff(&self, degree: u32) -> LaxCoeff {
        self.coeffs.get(&degree).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> impl DoubleEndedIterator<Item = (u32, &LaxCoeff)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    /// Highest λ-degree present; `None` for the zero matrix.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &LaxMatrix) -> Self {
        let mut out = self.clone();
        for (d, c) in &other.coeffs {
            out.add_at(*d, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|(d, c)| (*d, c.neg())))
    }

    pub fn sub(&self, other: &LaxMatrix) -> Self {
        self.add(&other.neg())
    }

    /// Multiplication by `λ^k`.
    pub fn shift(&self, k: u32) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|(d, c)| (d + k, c.clone())))
    }

    pub fn commutator(&self, other: &LaxMatrix) -> Self {
        let mut out = LaxMatrix::zero();
        for (d1, x) in &self.coeffs {
            for (d2, y) in &other.coeffs {
                out.add_at(d1 + d2, &x.commutator(y));
            }
        }
        out
    }

    pub fn d_x(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|(d, c)| (*d, c.d_x())))
    }

    pub fn evolutionary_derivative(&self, flow: &VectorPoly) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .map(|(d, c)| (*d, c.evolutionary_derivative(flow))),
        )
    }

    /// Apply an arbitrary block-level edit to one coefficient (fault injection, tests).
    pub fn with_coeff(&self, degree: u32, c: LaxCoeff) -> Self {
        let mut out = self.clone();
        out.coeffs.remove(&degree);
        out.add_at(degree, &c);
        out
    }

    /// Numeric matrix `sum_d λ^d X_d(jet)`.
    pub fn eval(&self, lambda: Complex64, jet: &Jet) -> Result<DMatrix<Complex64>> {
        let n = jet.dim() + 2;
        let mut out = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (d, c) in &self.coeffs {
            let m = c.eval(jet)?;
            let p = lambda.powu(*d);
            out += m.map(|x| p * x);
        }
        Ok(out)
    }

    /// `{degree: {a, v1, v2, W}}`
    pub fn to_json(&self) -> serde_json::Value {
        let map: BTreeMap<String, LaxCoeffText> = self
            .coeffs
            .iter()
            .map(|(d, c)| (d.to_string(), LaxCoeffText::from(c)))
            .collect();
        serde_json::to_value(map).expect("string map serialises")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let map: BTreeMap<String, LaxCoeffText> = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse { pos: 0, msg: e.to_string() })?;
        let mut out = LaxMatrix::zero();
        for (d, t) in &map {
            let degree: u32 = d
                .parse()
                .map_err(|_| Error::Parse { pos: 0, msg: format!("bad λ-degree key {d:?}") })?;
            out.add_at(degree, &LaxCoeff::try_from(t)?);
        }
        Ok(out)
    }
}

impl fmt::Display for LaxMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return writeln!(f, "0");
        }
        for (d, c) in self.coeffs.iter().rev() {
            writeln!(f, "lambda^{d}:")?;
            writeln!(f, "  a  = {}", c.a)?;
            writeln!(f, "  v1 = {}", c.v1)?;
            writeln!(f, "  v2 = {}", c.v2)?;
            writeln!(f, "  W  = {}", c.w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffalg::ratio;

    fn sample_jet() -> Jet {
        Jet::from_slices(&[
            &[0.3, -1.1, 0.7],
            &[1.2, 0.4, -0.5],
            &[-0.8, 0.9, 0.2],
            &[0.1, -0.6, 1.3],
        ])
        .unwrap()
    }

    fn sample_coeff(shift: u32) -> LaxCoeff {
        LaxCoeff {
            a: ScalarPoly::pairing(0, 1 + shift),
            v1: ScalarPoly::pairing(0, 0) * VectorPoly::u(shift),
            v2: &VectorPoly::u(1) - &VectorPoly::u(2).scale(&ratio(3, 2)),
            w: &ScalarPoly::pairing(1, 1) * &BivectorPoly::wedge_basis(0, 1 + shift),
        }
    }

    #[test]
    fn symbolic_commutator_matches_matrix_commutator() {
        let jet = sample_jet();
        let (x, y) = (sample_coeff(0), sample_coeff(1));
        let (mx, my) = (x.eval(&jet).unwrap(), y.eval(&jet).unwrap());
        let expected = &mx * &my - &my * &mx;
        let got = x.commutator(&y).eval(&jet).unwrap();
        assert!((got - expected).abs().max() < 1e-12);
    }

    #[test]
    fn reconstruction_is_skew() {
        let m = sample_coeff(1).eval(&sample_jet()).unwrap();
        assert!((&m + m.transpose()).abs().max() < 1e-15);
    }

    #[test]
    fn j_squared_bracket_returns_minus_u_form() {
        // [J,[J,X]] = -X for X with only v-blocks
        let x = LaxCoeff { v1: VectorPoly::u(2), v2: VectorPoly::u(1), ..Default::default() };
        let j = LaxCoeff::j();
        assert_eq!(j.commutator(&j.commutator(&x)), x.neg());
    }

    #[test]
    fn json_round_trip() {
        let m = LaxMatrix::from_coeffs([(1, LaxCoeff::j()), (0, sample_coeff(0))]);
        assert_eq!(LaxMatrix::from_json(&m.to_json()).unwrap(), m);
        assert_eq!(m.to_json()["1"]["a"], "1");
    }
}
