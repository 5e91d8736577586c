use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Sign choice for `a0`, which the constraint fixes only up to sign.
#[derive(Clone, Debug, PartialEq)]
pub enum Branch {
    Positive,
    Negative,
    /// Pointwise, whichever sign gives the smaller residual.
    Best,
    /// One sign per sample point.
    Signs(Vec<f64>),
}

/// A sampled field: one row per point, columns `u_1..u_N`, together with its x-derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSamples {
    pub values: DMatrix<f64>,
    pub dx: DMatrix<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BacklundResidual {
    /// `sup |(ũ - u)_x + μ a0 (ũ + u)|`
    pub residual: f64,
    /// `sup |a0² + |ũ - u|²/(4μ²) - 1|`
    pub constraint: f64,
}

/// Allowed overshoot of `|ũ - u|²/(4μ²)` above 1 before the pair is rejected.
pub const CONSTRAINT_SLACK: f64 = 1e-12;

/// Residuals of `(ũ - u)_x = -μ a0 (ũ + u)`, `a0² + |ũ - u|²/(4μ²) = 1`, with `a0`
/// recovered from the second relation.
pub fn backlund_residual(
    u: &FieldSamples,
    u_tilde: &FieldSamples,
    mu: f64,
    branch: &Branch,
) -> Result<BacklundResidual> {
    let (rows, n) = u.values.shape();
    for m in [&u.dx, &u_tilde.values, &u_tilde.dx] {
        if m.shape() != (rows, n) {
            return Err(Error::InvalidParams("field sample shapes differ".into()));
        }
    }
    if let Branch::Signs(s) = branch {
        if s.len() != rows {
            return Err(Error::InvalidParams(format!("{} signs for {rows} points", s.len())));
        }
    }
    let mut out = BacklundResidual { residual: 0.0, constraint: 0.0 };
    for i in 0..rows {
        let diff = u_tilde.values.row(i) - u.values.row(i);
        let sum = u_tilde.values.row(i) + u.values.row(i);
        let ddx = u_tilde.dx.row(i) - u.dx.row(i);
        let ratio = diff.norm_squared() / (4.0 * mu * mu);
        if ratio > 1.0 + CONSTRAINT_SLACK {
            return Err(Error::ConstraintViolation { excess: ratio - 1.0 });
        }
        let a0 = (1.0 - ratio).max(0.0).sqrt();
        let res = |a: f64| (&ddx + &sum * (mu * a)).amax();
        let (a, r) = match branch {
            Branch::Positive => (a0, res(a0)),
            Branch::Negative => (-a0, res(-a0)),
            Branch::Signs(s) => (a0 * s[i].signum(), res(a0 * s[i].signum())),
            Branch::Best => {
                let (rp, rn) = (res(a0), res(-a0));
                if rp <= rn { (a0, rp) } else { (-a0, rn) }
            }
        };
        out.residual = out.residual.max(r);
        out.constraint = out.constraint.max((a * a + ratio - 1.0).abs());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_fields_have_zero_residual() {
        let f = FieldSamples { values: DMatrix::zeros(3, 2), dx: DMatrix::zeros(3, 2) };
        let r = backlund_residual(&f, &f, 1.0, &Branch::Positive).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.constraint, 0.0);
    }

    #[test]
    fn oversized_difference_violates_constraint() {
        let zero = FieldSamples { values: DMatrix::zeros(1, 1), dx: DMatrix::zeros(1, 1) };
        let big = FieldSamples { values: DMatrix::from_element(1, 1, 2.5), dx: DMatrix::zeros(1, 1) };
        assert!(matches!(
            backlund_residual(&zero, &big, 1.0, &Branch::Best),
            Err(Error::ConstraintViolation { .. })
        ));
    }
}
