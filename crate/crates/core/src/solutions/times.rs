use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Active hierarchy times `t_{2n+1}`, keyed by `n`; key 0 is `t_1 = x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeVector {
    active: BTreeMap<u32, f64>,
}

/// Which sign convention defines ξ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `ξ = Σ (-1)^n μ^{2n+1} t_{2n+1}`, the phase of the soliton at `λ = iμ`.
    Soliton,
    /// `ξ = Σ μ^{2n+1} t_{2n+1}`, the phase of the breather at `λ = μ`.
    Breather,
}

impl TimeVector {
    pub fn new(x: f64) -> Self {
        TimeVector { active: BTreeMap::from([(0, x)]) }
    }

    /// Sets `t_{2n+1}`; `n = 0` sets `x`.
    pub fn with(mut self, n: u32, t: f64) -> Self {
        self.set(n, t);
        self
    }

    pub fn set(&mut self, n: u32, t: f64) {
        self.active.insert(n, t);
    }

    pub fn x(&self) -> f64 {
        self.active[&0]
    }

    pub fn get(&self, n: u32) -> f64 {
        self.active.get(&n).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.active.iter().map(|(n, t)| (*n, *t))
    }

    /// `Θ(λ) = Σ λ^{2n+1} t_{2n+1}` over the active times.
    pub fn phase(&self, lambda: Complex64) -> Complex64 {
        self.iter().map(|(n, t)| lambda.powu(2 * n + 1) * t).sum()
    }
}

pub fn xi(times: &TimeVector, mu: Complex64, variant: Variant) -> Complex64 {
    times
        .iter()
        .map(|(n, t)| {
            let sign = match variant {
                Variant::Breather => 1.0,
                Variant::Soliton if n % 2 == 1 => -1.0,
                Variant::Soliton => 1.0,
            };
            mu.powu(2 * n + 1) * (sign * t)
        })
        .sum()
}

/// `dξ/dt_{2n+1}`
pub fn dxi_dt(n: u32, mu: Complex64, variant: Variant) -> Complex64 {
    let sign = if variant == Variant::Soliton && n % 2 == 1 { -1.0 } else { 1.0 };
    mu.powu(2 * n + 1) * sign
}

/// `Ψ(λ) = exp(Θ(λ) J)` over the trivial background, an (N+2)x(N+2) matrix.
///
/// At `λ = iμ` this is the cosh/sinh form with `Θ = iξ_soliton`; at `λ = μ` it is the
/// cos/sin form with `Θ = ξ_breather`.
pub fn fundamental_solution(times: &TimeVector, lambda: Complex64, n: usize) -> DMatrix<Complex64> {
    let theta = times.phase(lambda);
    let (s, c) = (theta.sin(), theta.cos());
    let mut psi = DMatrix::identity(n + 2, n + 2);
    psi[(0, 0)] = c;
    psi[(1, 1)] = c;
    psi[(0, 1)] = s;
    psi[(1, 0)] = -s;
    psi
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    #[test]
    fn xi_sign_patterns() {
        let t = TimeVector::new(0.7).with(1, 0.3);
        let mu = Complex64::new(1.3, 0.0);
        let s = xi(&t, mu, Variant::Soliton);
        assert!((s - (1.3 * 0.7 - 1.3f64.powi(3) * 0.3)).norm() < 1e-15);
        let b = xi(&t, mu, Variant::Breather);
        assert!((b - (1.3 * 0.7 + 1.3f64.powi(3) * 0.3)).norm() < 1e-15);
    }

    #[test]
    fn identity_at_zero_phase() {
        let psi = fundamental_solution(&TimeVector::new(0.0), I, 3);
        assert_eq!(psi, DMatrix::identity(5, 5));
    }

    #[test]
    fn soliton_form_at_i_mu() {
        let t = TimeVector::new(0.4).with(1, -0.2).with(2, 0.1);
        let mu = 0.9;
        let x = xi(&t, Complex64::new(mu, 0.0), Variant::Soliton).re;
        let psi = fundamental_solution(&t, I * mu, 2);
        assert!((psi[(0, 0)] - x.cosh()).norm() < 1e-14);
        assert!((psi[(0, 1)] - I * x.sinh()).norm() < 1e-14);
        assert!((psi[(1, 0)] + I * x.sinh()).norm() < 1e-14);
        assert!((psi[(1, 1)] - x.cosh()).norm() < 1e-14);
    }

    #[test]
    fn psi_is_complex_orthogonal() {
        let t = TimeVector::new(1.1).with(1, 0.5);
        let psi = fundamental_solution(&t, Complex64::new(0.7, 0.4), 2);
        let e = &psi * psi.transpose() - DMatrix::<Complex64>::identity(4, 4);
        assert!(e.iter().all(|z| z.norm() < 1e-13));
    }
}
