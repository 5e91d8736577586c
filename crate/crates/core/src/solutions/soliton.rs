use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::times::{fundamental_solution, xi, TimeVector, Variant};
use super::{q_diag, REAL_RESIDUE_TOL};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// One-soliton data: pole at `λ = iμ` and the unit vector `(c0, c)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    pub mu: f64,
    pub c0: f64,
    pub c: Vec<f64>,
}

impl SolitonParams {
    /// Checks `μ > 0`, `N >= 1` and `c0² + |c|² = 1` to 1e-12.
    pub fn new(mu: f64, c0: f64, c: Vec<f64>) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParams(format!("mu must be positive, got {mu}")));
        }
        if c.is_empty() {
            return Err(Error::InvalidParams("c must have at least one component".into()));
        }
        let norm = c0 * c0 + c.iter().map(|x| x * x).sum::<f64>();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "c0^2 + |c|^2 = {norm}, expected 1"
            )));
        }
        Ok(SolitonParams { mu, c0, c })
    }

    /// Scales `(c0, c)` onto the unit sphere.
    pub fn normalized(mu: f64, c0: f64, c: Vec<f64>) -> Result<Self> {
        let n = (c0 * c0 + c.iter().map(|x| x * x).sum::<f64>()).sqrt();
        if n == 0.0 {
            return Err(Error::InvalidParams("(c0, c) must be nonzero".into()));
        }
        Self::new(mu, c0 / n, c.into_iter().map(|x| x / n).collect())
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn xi(&self, times: &TimeVector) -> f64 {
        xi(times, Complex64::new(self.mu, 0.0), Variant::Soliton).re
    }

    /// `(i, c0, c)`
    pub fn constant_vector(&self) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.dim() + 2);
        v[0] = I;
        v[1] = Complex64::new(self.c0, 0.0);
        for (k, x) in self.c.iter().enumerate() {
            v[k + 2] = Complex64::new(*x, 0.0);
        }
        v
    }
}

/// `cosh ξ + c0 sinh ξ` and `sinh ξ + c0 cosh ξ`, free of cancellation when `c0 ≈ ±1`.
fn hyperbolic_pair(xi: f64, c0: f64) -> (f64, f64) {
    let (ep, em) = (xi.exp(), (-xi).exp());
    let (a, b) = ((1.0 + c0) * ep, (1.0 - c0) * em);
    ((a + b) / 2.0, (a - b) / 2.0)
}

/// `q = (i(cosh ξ + c0 sinh ξ), c0 cosh ξ + sinh ξ, c)`, equal to `Ψ(iμ)(i, c0, c)`.
pub fn soliton_q(params: &SolitonParams, times: &TimeVector) -> DVector<Complex64> {
    let (d, s) = hyperbolic_pair(params.xi(times), params.c0);
    let mut q = params.constant_vector();
    q[0] = I * d;
    q[1] = Complex64::new(s, 0.0);
    q
}

/// `q = Ψ(iμ) C` evaluated through the fundamental solution.
pub fn soliton_q_from_psi(params: &SolitonParams, times: &TimeVector) -> DVector<Complex64> {
    fundamental_solution(times, I * params.mu, params.dim()) * params.constant_vector()
}

/// `qᵀQq = -q_1² + Σ_{k>=2} q_k²`
pub fn q_form(q: &DVector<Complex64>) -> Complex64 {
    q.iter().enumerate().map(|(k, z)| if k == 0 { -z * z } else { z * z }).sum()
}

/// `P = Q q qᵀ / (qᵀQq)`
pub fn projector(q: &DVector<Complex64>) -> Result<DMatrix<Complex64>> {
    let den = q_form(q);
    let scale = q.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if den.norm() <= 1e-14 * scale || scale == 0.0 {
        return Err(Error::DegenerateDenominator { what: "q^T Q q", value: den.norm() });
    }
    let qq = q_diag(q.len()) * q * q.transpose();
    Ok(qq / den)
}

/// `M(λ) = 1 + 2iμ/(λ-iμ) P - 2iμ/(λ+iμ) QPQ`
pub fn darboux_from_projector(p: &DMatrix<Complex64>, mu: f64, lambda: Complex64) -> Result<DMatrix<Complex64>> {
    let pole = I * mu;
    if (lambda - pole).norm() < 1e-12 * mu.max(1.0) || (lambda + pole).norm() < 1e-12 * mu.max(1.0) {
        return Err(Error::PoleEvaluation { lambda: lambda.to_string() });
    }
    let n = p.nrows();
    let q = q_diag(n);
    let qpq = &q * p * &q;
    Ok(DMatrix::identity(n, n) + p * (2.0 * pole / (lambda - pole)) - qpq * (2.0 * pole / (lambda + pole)))
}

pub fn soliton_darboux(params: &SolitonParams, times: &TimeVector, lambda: Complex64) -> Result<DMatrix<Complex64>> {
    let p = projector(&soliton_q(params, times))?;
    darboux_from_projector(&p, params.mu, lambda)
}

/// `ũ = 2μ c / (cosh ξ + c0 sinh ξ)`
pub fn one_soliton(params: &SolitonParams, times: &TimeVector) -> DVector<f64> {
    let c = DVector::from_column_slice(&params.c);
    if c.iter().all(|x| *x == 0.0) {
        return c;
    }
    c * (2.0 * params.mu * sech_factor(params.xi(times), params.c0))
}

/// `1 / (cosh ξ + c0 sinh ξ)` without overflow for large `|ξ|`.
fn sech_factor(xi: f64, c0: f64) -> f64 {
    let sigma = xi.signum();
    let a = xi.abs();
    let e = (-a).exp();
    2.0 * e / ((1.0 + sigma * c0) + (1.0 - sigma * c0) * e * e)
}

/// `(sinh ξ + c0 cosh ξ) / (cosh ξ + c0 sinh ξ)` without overflow.
fn slope_factor(xi: f64, c0: f64) -> f64 {
    let sigma = if xi < 0.0 { -1.0 } else { 1.0 };
    let e2 = (-2.0 * xi.abs()).exp();
    let (a, b) = (1.0 + sigma * c0, (1.0 - sigma * c0) * e2);
    if a + b == 0.0 {
        0.0
    } else {
        sigma * (a - b) / (a + b)
    }
}

/// `∂ũ/∂ξ = -2μ c (sinh ξ + c0 cosh ξ) / (cosh ξ + c0 sinh ξ)²`
pub fn one_soliton_dxi(params: &SolitonParams, times: &TimeVector) -> DVector<f64> {
    let xi = params.xi(times);
    let k = -slope_factor(xi, params.c0);
    one_soliton(params, times) * k
}

/// Bäcklund amplitude `a0 = (sinh ξ + c0 cosh ξ) / (cosh ξ + c0 sinh ξ)` linking the vacuum to the soliton.
pub fn soliton_a0(params: &SolitonParams, times: &TimeVector) -> f64 {
    slope_factor(params.xi(times), params.c0)
}

/// `ũ_j = u_j - 4iμ q_1 q_{j+2} / (qᵀQq)`; the result must be real to 1e-10.
pub fn dressing_apply(q: &DVector<Complex64>, mu: f64, u: &DVector<f64>) -> Result<DVector<f64>> {
    if q.len() != u.len() + 2 {
        return Err(Error::InvalidParams(format!(
            "q has {} components, expected N + 2 = {}",
            q.len(),
            u.len() + 2
        )));
    }
    let den = q_form(q);
    let scale = q.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if den.norm() <= 1e-14 * scale || scale == 0.0 {
        return Err(Error::DegenerateDenominator { what: "q^T Q q", value: den.norm() });
    }
    let k = -4.0 * I * mu * q[0] / den;
    let mut out = u.clone();
    let mut residue = 0.0f64;
    for j in 0..u.len() {
        let d = k * q[j + 2];
        residue = residue.max(d.im.abs());
        out[j] += d.re;
    }
    if residue > REAL_RESIDUE_TOL {
        return Err(Error::NonRealOutput { residue });
    }
    Ok(out)
}

impl SolitonParams {
    /// Uniformly random `(c0, c)` on the unit sphere `S^N`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, mu: f64, n: usize) -> Self {
        loop {
            let v: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let r2: f64 = v.iter().map(|x| x * x).sum();
            if r2 > 1e-4 && r2 <= 1.0 {
                if let Ok(p) = Self::normalized(mu, v[0], v[1..].to_vec()) {
                    return p;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SolitonParams {
        SolitonParams::normalized(1.3, 0.4, vec![0.5, -0.7]).unwrap()
    }

    #[test]
    fn q_at_origin() {
        let p = SolitonParams::new(1.0, 0.0, vec![1.0, 0.0]).unwrap();
        let q = soliton_q(&p, &TimeVector::new(0.0));
        let want = [I, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(q.as_slice(), &want);
    }

    #[test]
    fn q_is_isotropic_and_matches_psi() {
        let t = TimeVector::new(0.8).with(1, -0.3);
        let q = soliton_q(&params(), &t);
        assert!((q.transpose() * &q)[(0, 0)].norm() < 1e-14);
        assert!((soliton_q_from_psi(&params(), &t) - q).norm() < 1e-13);
    }

    #[test]
    fn projector_properties() {
        let q = soliton_q(&params(), &TimeVector::new(0.3));
        let p = projector(&q).unwrap();
        assert!((&p * &p - &p).norm() < 1e-14);
        assert!((p.trace() - 1.0).norm() < 1e-14);
        let qd = q_diag(4);
        assert!((p.map(|z| z.conj()) - &qd * &p * &qd).norm() < 1e-14);
    }

    #[test]
    fn simple_dressing() {
        let q = DVector::from_vec(vec![I, 0.0.into(), 1.0.into(), 0.0.into()]);
        let u = dressing_apply(&q, 1.0, &DVector::zeros(2)).unwrap();
        assert_eq!(u.as_slice(), &[2.0, 0.0]);
        let q0 = DVector::from_vec(vec![0.0.into(), 1.0.into(), 1.0.into(), 0.0.into()]);
        let u = DVector::from_vec(vec![0.3, -0.2]);
        assert_eq!(dressing_apply(&q0, 1.0, &u).unwrap(), u);
    }

    #[test]
    fn non_real_q_is_rejected() {
        let q = DVector::from_vec(vec![1.0.into(), 0.0.into(), 1.0.into(), 1.0.into()]);
        assert!(matches!(
            dressing_apply(&q, 1.0, &DVector::zeros(2)),
            Err(Error::NonRealOutput { .. })
        ));
    }

    #[test]
    fn lightlike_q_is_degenerate() {
        let q = DVector::from_vec(vec![1.0.into(), 1.0.into(), 0.0.into()]);
        assert!(matches!(projector(&q), Err(Error::DegenerateDenominator { .. })));
    }

    #[test]
    fn soliton_peak_value() {
        let p = SolitonParams::new(1.0, 0.0, vec![1.0, 0.0]).unwrap();
        assert_eq!(one_soliton(&p, &TimeVector::new(0.0)).as_slice(), &[2.0, 0.0]);
    }

    #[test]
    fn darboux_pole_is_rejected() {
        let r = soliton_darboux(&params(), &TimeVector::new(0.0), I * 1.3);
        assert!(matches!(r, Err(Error::PoleEvaluation { .. })));
    }

    #[test]
    fn invalid_params() {
        assert!(SolitonParams::new(1.0, 0.5, vec![0.5]).is_err());
        assert!(SolitonParams::new(-1.0, 1.0, vec![0.0]).is_err());
    }
}
