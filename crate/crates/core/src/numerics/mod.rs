//! Grids, finite differences, PDE residuals of closed-form solutions and numeric
//! identity checks.

mod convergence;
mod field;
mod identity;
mod residual;
mod stencil;

pub use convergence::{convergence_study, loglog_slope, ConvergenceTable};
pub use field::{fd_derivative, Grid, SolutionField};
pub use identity::{matrix_identity_check, Relation};
pub use residual::{field_jets, flow_residual, ClosedForm, ResidualConfig, ScalarBreather, TimeMethod};
pub use stencil::{Stencil, DEFAULT_ACCURACY};

pub use crate::report::VerificationReport;

use crate::solutions::{one_soliton, SolitonParams, TimeVector};

/// Checks the exponential tail `|u| <= 4μ e^{-|ξ|} K` at both grid edges, with
/// `K = sqrt((1+|c0|)/(1-|c0|))` the sharp constant of the closed form.
///
/// The reported residual is the worst ratio `|u| / (4μ e^{-|ξ|})`.
pub fn soliton_decay_check(params: &SolitonParams, grid: &Grid, times: &TimeVector) -> VerificationReport {
    let c0 = params.c0.abs();
    let k = ((1.0 + c0) / (1.0 - c0)).sqrt();
    let worst = [grid.x0, grid.x1]
        .iter()
        .map(|&x| {
            let t = times.clone().with(0, x);
            let u = one_soliton(params, &t).norm();
            u / (4.0 * params.mu * (-params.xi(&t).abs()).exp())
        })
        .fold(0.0, f64::max);
    VerificationReport::new("soliton decay", worst, k * (1.0 + 1e-12))
        .with("edge_amplitude", [grid.x0, grid.x1].map(|x| one_soliton(params, &times.clone().with(0, x)).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soliton_tails_decay() {
        let p = SolitonParams::normalized(0.5, 0.6, vec![0.3, 0.2]).unwrap();
        let r = soliton_decay_check(&p, &Grid::default(), &TimeVector::new(0.0).with(1, 0.5));
        assert!(r.pass, "{r}");
    }
}
