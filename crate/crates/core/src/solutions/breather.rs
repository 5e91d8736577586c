use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

use super::times::{fundamental_solution, xi, TimeVector, Variant};
use super::q_diag;

/// Pole distance from either axis below which μ is rejected.
pub const AXIS_TOL: f64 = 1e-8;
/// Reciprocal condition number below which H or the D-defining matrix is singular.
pub const RCOND_TOL: f64 = 1e-12;

/// Breather data: pole μ off both axes and an isotropic, full-rank (N+2)x s matrix C.
#[derive(Clone, Debug, PartialEq)]
pub struct BreatherParams {
    pub mu: Complex64,
    pub c: DMatrix<Complex64>,
}

fn check_axis(mu: Complex64) -> Result<()> {
    if mu.re.abs() < AXIS_TOL || mu.im.abs() < AXIS_TOL {
        Err(Error::AxisPole { mu: mu.to_string() })
    } else {
        Ok(())
    }
}

fn rcond(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    if max == 0.0 || !max.is_finite() {
        0.0
    } else {
        sv.min() / max
    }
}

fn conj(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    m.map(|z| z.conj())
}

impl BreatherParams {
    /// Checks μ against the axes, `N >= 1`, `1 <= s <= N+1`, `CᵀC = 0` and full column rank.
    pub fn new(mu: Complex64, c: DMatrix<Complex64>) -> Result<Self> {
        check_axis(mu)?;
        let (rows, s) = c.shape();
        if rows < 3 {
            return Err(Error::InvalidParams(format!("C has {rows} rows, need N + 2 >= 3")));
        }
        if s == 0 || s > rows - 1 {
            return Err(Error::InvalidParams(format!("rank s = {s} outside 1..=N+1")));
        }
        let scale = c.iter().map(|z| z.norm_sqr()).sum::<f64>().max(f64::MIN_POSITIVE);
        let iso = (c.transpose() * &c).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if iso > 1e-12 * scale {
            return Err(Error::InvalidParams(format!("C^T C = 0 violated by {iso:e}")));
        }
        if rcond(&c) < RCOND_TOL {
            return Err(Error::InvalidParams("C does not have full column rank".into()));
        }
        Ok(BreatherParams { mu, c })
    }

    /// `μ = r e^{iθ}` with `C = e_1 + i e_{j+2}`, the rank-one example whose only
    /// nonzero component is `j` (0-based here).
    pub fn unit_example(mu: Complex64, n: usize, j: usize) -> Result<Self> {
        if j >= n {
            return Err(Error::InvalidParams(format!("component {j} out of range for N = {n}")));
        }
        let mut c = DMatrix::zeros(n + 2, 1);
        c[(0, 0)] = Complex64::new(1.0, 0.0);
        c[(j + 2, 0)] = Complex64::new(0.0, 1.0);
        Self::new(mu, c)
    }

    pub fn dim(&self) -> usize {
        self.c.nrows() - 2
    }

    pub fn rank(&self) -> usize {
        self.c.ncols()
    }

    pub fn xi(&self, times: &TimeVector) -> Complex64 {
        xi(times, self.mu, Variant::Breather)
    }
}

/// `q = Ψ(μ) C`
pub fn breather_q(params: &BreatherParams, times: &TimeVector) -> DMatrix<Complex64> {
    fundamental_solution(times, params.mu, params.dim()) * &params.c
}

pub struct Fgh {
    pub f: DMatrix<Complex64>,
    pub g: DMatrix<Complex64>,
    pub h: DMatrix<Complex64>,
}

pub struct Bcd {
    pub b: DMatrix<Complex64>,
    pub c: DMatrix<Complex64>,
    pub d: DMatrix<Complex64>,
}

/// `F = qᵀQq/(2μ)`, `G = q^†q/(μ-μ*)`, `H = q^†Qq/(μ+μ*)`
pub fn breather_fgh(q: &DMatrix<Complex64>, mu: Complex64) -> Result<Fgh> {
    check_axis(mu)?;
    let qd = q_diag(q.nrows());
    let qq = &qd * q;
    let adj = q.adjoint();
    Ok(Fgh {
        f: q.transpose() * &qq / (2.0 * mu),
        g: &adj * q / (mu - mu.conj()),
        h: adj * qq / (mu + mu.conj()),
    })
}

fn inverse(m: &DMatrix<Complex64>, err: fn(f64) -> Error) -> Result<DMatrix<Complex64>> {
    let rc = rcond(m);
    if rc < RCOND_TOL {
        return Err(err(rc));
    }
    m.clone().try_inverse().ok_or(err(rc))
}

/// `B = D G* H*⁻¹`, `C = -D* F* H*⁻¹`, `D = -(F H⁻¹ F* + G* H*⁻¹ G* - H*)⁻¹`,
/// with `*` the entrywise conjugate.
pub fn breather_bcd(fgh: &Fgh) -> Result<Bcd> {
    let singular_h = |rcond| Error::SingularH { rcond };
    let h_inv = inverse(&fgh.h, singular_h)?;
    let hs_inv = conj(&h_inv);
    let (fs, gs, hs) = (conj(&fgh.f), conj(&fgh.g), conj(&fgh.h));
    let inner = &fgh.f * &h_inv * &fs + &gs * &hs_inv * &gs - &hs;
    let d = -inverse(&inner, |rcond| Error::SingularD { rcond })?;
    Ok(Bcd {
        b: &d * &gs * &hs_inv,
        c: -conj(&d) * &fs * &hs_inv,
        d,
    })
}

fn bcd_at(params: &BreatherParams, q: &DMatrix<Complex64>) -> Result<Bcd> {
    breather_bcd(&breather_fgh(q, params.mu)?)
}

/// `M₀ = q* B qᵀ + Q q C qᵀ + Q q* D qᵀ`
pub fn breather_m0(params: &BreatherParams, times: &TimeVector) -> Result<DMatrix<Complex64>> {
    let q = breather_q(params, times);
    let Bcd { b, c, d } = bcd_at(params, &q)?;
    let qd = q_diag(q.nrows());
    let qs = conj(&q);
    let qt = q.transpose();
    Ok(&qs * b * &qt + &qd * &q * c * &qt + &qd * qs * d * qt)
}

/// `M(λ) = 1 + M₀/(λ-μ) - QM₀Q/(λ+μ) + M₀*/(λ-μ*) - QM₀*Q/(λ+μ*)`
pub fn breather_darboux(params: &BreatherParams, times: &TimeVector, lambda: Complex64) -> Result<DMatrix<Complex64>> {
    let mu = params.mu;
    let scale = mu.norm().max(1.0);
    for pole in [mu, -mu, mu.conj(), -mu.conj()] {
        if (lambda - pole).norm() < 1e-12 * scale {
            return Err(Error::PoleEvaluation { lambda: lambda.to_string() });
        }
    }
    let m0 = breather_m0(params, times)?;
    let m0s = conj(&m0);
    let n = m0.nrows();
    let qd = q_diag(n);
    Ok(DMatrix::identity(n, n) + &m0 / (lambda - mu) - &qd * &m0 * &qd / (lambda + mu)
        + &m0s / (lambda - mu.conj())
        - &qd * &m0s * &qd / (lambda + mu.conj()))
}

/// Rank-s dressing of the vacuum:
/// `ũ_j = -4 Re Σ_{k,l} q_1^k (q_{j+2}^l C_kl - q*_{j+2}^l (B* - D*)_kl)`,
/// the literal expansion of the block 3x3 determinants.
pub fn breather_dress(params: &BreatherParams, times: &TimeVector) -> Result<DVector<f64>> {
    let q = breather_q(params, times);
    let Bcd { b, c, d } = bcd_at(params, &q)?;
    let bd = conj(&(b - d));
    let s = params.rank();
    let mut out = DVector::zeros(params.dim());
    for j in 0..params.dim() {
        let mut total = Complex64::new(0.0, 0.0);
        for k in 0..s {
            for l in 0..s {
                let lower = q[(j + 2, l)] * c[(k, l)] - q[(j + 2, l)].conj() * bd[(k, l)];
                total += q[(0, k)] * lower;
            }
        }
        out[j] = -4.0 * total.re;
    }
    Ok(out)
}

fn scalar_fgh(params: &BreatherParams, times: &TimeVector) -> Result<(DMatrix<Complex64>, Complex64, Complex64, Complex64)> {
    if params.rank() != 1 {
        return Err(Error::InvalidParams(format!("rank-one formula needs s = 1, got {}", params.rank())));
    }
    let q = breather_q(params, times);
    let Fgh { f, g, h } = breather_fgh(&q, params.mu)?;
    Ok((q, f[(0, 0)], g[(0, 0)], h[(0, 0)]))
}

/// `Δ = det [[F, H-G], [G+H, F*]]` for `s = 1`.
pub fn breather_delta(params: &BreatherParams, times: &TimeVector) -> Result<Complex64> {
    let (_, f, g, h) = scalar_fgh(params, times)?;
    Ok(f * f.conj() - (h - g) * (g + h))
}

/// `ũ = -(4/Δ) Re(q_1 (F* c + (G-H) c*))` for `s = 1`, where `q_1 = C_1 cos ξ + C_2 sin ξ`.
pub fn rank1_breather(params: &BreatherParams, times: &TimeVector) -> Result<DVector<f64>> {
    let (q, f, g, h) = scalar_fgh(params, times)?;
    let delta = f * f.conj() - (h - g) * (g + h);
    if delta.norm() < f64::MIN_POSITIVE {
        return Err(Error::DegenerateDenominator { what: "Delta", value: delta.norm() });
    }
    let q1 = q[(0, 0)];
    let n = params.dim();
    Ok(DVector::from_fn(n, |j, _| {
        let c = q[(j + 2, 0)];
        (-4.0 * q1 * (f.conj() * c + (g - h) * c.conj()) / delta).re
    }))
}

/// `Δ = -(1/r²)(tan θ sin²A + cosh²B / tan θ)²`
pub fn delta_closed_form(r: f64, theta: f64, a: f64, b: f64) -> f64 {
    let t = theta.tan();
    let s = t * a.sin().powi(2) + b.cosh().powi(2) / t;
    -(s * s) / (r * r)
}

/// The scalar breather `4r (sin θ sin A sinh B - cos θ cos A cosh B) / (tan θ sin²A + cosh²B / tan θ)`
/// together with its partial derivatives in `A` and `B`.
pub fn scalar_breather_with_gradient(r: f64, theta: f64, a: f64, b: f64) -> (f64, f64, f64) {
    let (st, ct, tt) = (theta.sin(), theta.cos(), theta.tan());
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = (b.sinh(), b.cosh());
    let num = st * sa * sb - ct * ca * cb;
    let den = tt * sa * sa + cb * cb / tt;
    let num_a = st * ca * sb + ct * sa * cb;
    let num_b = st * sa * cb - ct * ca * sb;
    let den_a = 2.0 * tt * sa * ca;
    let den_b = 2.0 * cb * sb / tt;
    let u = 4.0 * r * num / den;
    let du_da = 4.0 * r * (num_a * den - num * den_a) / (den * den);
    let du_db = 4.0 * r * (num_b * den - num * den_b) / (den * den);
    (u, du_da, du_db)
}

/// The scalar breather at the given times, with `A + iB = ξ`.
pub fn scalar_breather(mu: Complex64, times: &TimeVector) -> f64 {
    let x = xi(times, mu, Variant::Breather);
    scalar_breather_with_gradient(mu.norm(), mu.arg(), x.re, x.im).0
}

/// A random isotropic full-rank (N+2) x s matrix: column k is `v_{2k} + i v_{2k+1}` for
/// orthonormal real `v`. Requires `2s <= N+2`.
pub fn random_isotropic<R: Rng + ?Sized>(rng: &mut R, n: usize, s: usize) -> DMatrix<Complex64> {
    assert!(2 * s <= n + 2, "no isotropic subspace of rank {s} in dimension {}", n + 2);
    let m = DMatrix::<f64>::from_fn(n + 2, n + 2, |_, _| rng.random_range(-1.0..1.0));
    let v = m.qr().q();
    DMatrix::from_fn(n + 2, s, |i, k| Complex64::new(v[(i, 2 * k)], v[(i, 2 * k + 1)]))
}

/// A random pole `r e^{iθ}` with `r` in `[0.4, 1.5]` and `θ` kept away from both axes.
pub fn random_pole<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = rng.random_range(0.4..1.5);
    let theta = rng.random_range(0.25..(std::f64::consts::FRAC_PI_2 - 0.25));
    let quadrant = rng.random_range(0..4) as f64 * std::f64::consts::FRAC_PI_2;
    Complex64::from_polar(r, theta + quadrant)
}
