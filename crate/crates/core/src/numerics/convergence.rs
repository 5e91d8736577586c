use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<(f64, f64)>,
    /// Least-squares slope of `log residual` against `log h`.
    pub slope: f64,
}

/// Runs `residual(h)` for each spacing and fits the observed order.
pub fn convergence_study<F>(residual: F, h_values: &[f64]) -> Result<ConvergenceTable>
where
    F: Fn(f64) -> Result<f64>,
{
    if h_values.len() < 3 {
        return Err(Error::InvalidParams("convergence study needs at least 3 spacings".into()));
    }
    let rows = h_values
        .iter()
        .map(|&h| residual(h).map(|r| (h, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { slope: loglog_slope(&rows), rows })
}

pub fn loglog_slope(rows: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|(h, r)| (h.ln(), r.max(f64::MIN_POSITIVE).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_slope() {
        let t = convergence_study(|h| Ok(3.0 * h.powi(4)), &[0.4, 0.2, 0.1]).unwrap();
        assert!((t.slope - 4.0).abs() < 1e-12);
        let flat = convergence_study(|_| Ok(0.01), &[0.4, 0.2, 0.1]).unwrap();
        assert!(flat.slope.abs() < 1e-12);
        assert!(convergence_study(|h| Ok(h), &[0.1, 0.2]).is_err());
    }
}
