use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::report::VerificationReport;
use crate::solutions::q_diag;

/// The three Darboux-matrix relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `M(λ) M(λ)ᵀ = 1`
    Orthogonal,
    /// `M(λ*)* = M(λ)`
    Conjugation,
    /// `Q M(-λ) Q⁻¹ = M(λ)`
    Parity,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::Orthogonal, Relation::Conjugation, Relation::Parity];

    pub fn deviation<F>(self, m: &F, lambda: Complex64) -> Result<f64>
    where
        F: Fn(Complex64) -> Result<DMatrix<Complex64>>,
    {
        let ml = m(lambda)?;
        let n = ml.nrows();
        let diff = match self {
            Relation::Orthogonal => &ml * ml.transpose() - DMatrix::identity(n, n),
            Relation::Conjugation => m(lambda.conj())?.map(|z| z.conj()) - &ml,
            Relation::Parity => {
                let q = q_diag(n);
                &q * m(-lambda)? * &q - &ml
            }
        };
        Ok(diff.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }
}

/// Maximum deviation of the chosen relations over the sample points.
pub fn matrix_identity_check<F>(
    name: &str,
    builder: F,
    relations: &[Relation],
    samples: &[Complex64],
    tolerance: f64,
) -> Result<VerificationReport>
where
    F: Fn(Complex64) -> Result<DMatrix<Complex64>> + Sync,
{
    let per_relation: Vec<f64> = relations
        .par_iter()
        .map(|r| {
            samples
                .iter()
                .map(|l| r.deviation(&builder, *l))
                .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
        })
        .collect::<Result<_>>()?;
    let worst = per_relation.iter().copied().fold(0.0, f64::max);
    let mut report = VerificationReport::new(name, worst, tolerance).with("samples", samples.len());
    for (r, d) in relations.iter().zip(&per_relation) {
        report = report.with(&format!("{r:?}").to_lowercase(), d);
    }
    Ok(report)
}
