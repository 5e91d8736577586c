use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::diffalg::Jet;
use crate::error::Result;
use crate::report::VerificationReport;

use super::lax::LaxMatrix;

pub const REDUCTION_TOLERANCE: f64 = 1e-12;

/// `Q = diag(-1, 1, ..., 1)`
pub fn q_matrix(size: usize) -> DMatrix<Complex64> {
    let mut q = DMatrix::identity(size, size);
    q[(0, 0)] = Complex64::new(-1.0, 0.0);
    q
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Checks the three reduction-group relations on numeric instances of `x`:
/// skew-symmetry of the matrix part, `X(λ*)* = X(λ)` and `Q X(-λ) Q^{-1} = X(λ)`.
pub fn check_reduction_group(
    x: &LaxMatrix,
    samples: &[Complex64],
    jet: &Jet,
) -> Result<VerificationReport> {
    let q = q_matrix(jet.dim() + 2);
    let (mut skew, mut conj, mut parity) = (0.0f64, 0.0f64, 0.0f64);
    for &lambda in samples {
        let m = x.eval(lambda, jet)?;
        skew = skew.max(max_abs(&(&m + m.transpose())));
        let mc = x.eval(lambda.conj(), jet)?.map(|z| z.conj());
        conj = conj.max(max_abs(&(mc - &m)));
        let mq = &q * x.eval(-lambda, jet)? * &q;
        parity = parity.max(max_abs(&(mq - &m)));
    }
    Ok(VerificationReport::new("reduction group", skew.max(conj).max(parity), REDUCTION_TOLERANCE)
        .with("skew", skew)
        .with("conjugation", conj)
        .with("parity", parity)
        .with("samples", samples.len()))
}
