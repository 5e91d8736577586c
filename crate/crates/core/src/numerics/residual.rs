use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::diffalg::{Jet, VectorPoly};
use crate::error::{Error, Result};
use crate::report::VerificationReport;
use crate::solutions::{
    breather_dress, dxi_dt, one_soliton, one_soliton_dxi, scalar_breather_with_gradient, xi,
    BreatherParams, SolitonParams, TimeVector, Variant,
};

use super::field::{fd_derivative, Grid, SolutionField};
use super::stencil::{Stencil, DEFAULT_ACCURACY};

/// A closed-form solution `u(x, t_3, t_5, ...)`.
pub trait ClosedForm: Sync {
    fn dim(&self) -> usize;
    fn label(&self) -> String;
    fn value(&self, times: &TimeVector) -> Result<DVector<f64>>;
    /// `∂u/∂t_{2n+1}` obtained by differentiating the phase; `None` when not available.
    fn time_derivative(&self, _times: &TimeVector, _n: u32) -> Option<Result<DVector<f64>>> {
        None
    }
}

impl ClosedForm for SolitonParams {
    fn dim(&self) -> usize {
        SolitonParams::dim(self)
    }
    fn label(&self) -> String {
        format!("one-soliton mu={} c0={} c={:?}", self.mu, self.c0, self.c)
    }
    fn value(&self, times: &TimeVector) -> Result<DVector<f64>> {
        Ok(one_soliton(self, times))
    }
    fn time_derivative(&self, times: &TimeVector, n: u32) -> Option<Result<DVector<f64>>> {
        let k = dxi_dt(n, Complex64::new(self.mu, 0.0), Variant::Soliton).re;
        Some(Ok(one_soliton_dxi(self, times) * k))
    }
}

impl ClosedForm for BreatherParams {
    fn dim(&self) -> usize {
        BreatherParams::dim(self)
    }
    fn label(&self) -> String {
        format!("rank-{} breather mu={}", self.rank(), self.mu)
    }
    fn value(&self, times: &TimeVector) -> Result<DVector<f64>> {
        breather_dress(self, times)
    }
}

/// The scalar (N = 1) rank-one breather in closed form, with `A + iB = ξ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarBreather {
    pub mu: Complex64,
}

impl ClosedForm for ScalarBreather {
    fn dim(&self) -> usize {
        1
    }
    fn label(&self) -> String {
        format!("scalar breather mu={}", self.mu)
    }
    fn value(&self, times: &TimeVector) -> Result<DVector<f64>> {
        let x = xi(times, self.mu, Variant::Breather);
        let (u, _, _) = scalar_breather_with_gradient(self.mu.norm(), self.mu.arg(), x.re, x.im);
        Ok(DVector::from_element(1, u))
    }
    fn time_derivative(&self, times: &TimeVector, n: u32) -> Option<Result<DVector<f64>>> {
        let x = xi(times, self.mu, Variant::Breather);
        let (_, ua, ub) = scalar_breather_with_gradient(self.mu.norm(), self.mu.arg(), x.re, x.im);
        let d = dxi_dt(n, self.mu, Variant::Breather);
        Some(Ok(DVector::from_element(1, ua * d.re + ub * d.im)))
    }
}

/// How `∂u/∂t_{2n+1}` is obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeMethod {
    /// Differentiate the closed form through ξ.
    AnalyticXi,
    /// Fourth-order centered difference in `t_{2n+1}` with step `delta`.
    Fd { delta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualConfig {
    pub grid: Grid,
    pub accuracy: u32,
    pub method: TimeMethod,
    pub tolerance: f64,
}

impl Default for ResidualConfig {
    fn default() -> Self {
        ResidualConfig {
            grid: Grid::default(),
            accuracy: DEFAULT_ACCURACY,
            method: TimeMethod::AnalyticXi,
            tolerance: 1e-6,
        }
    }
}

fn time_derivative_fd<S: ClosedForm + ?Sized>(sol: &S, times: &TimeVector, n: u32, delta: f64) -> Result<DVector<f64>> {
    let t0 = times.get(n);
    let at = |k: f64| sol.value(&times.clone().with(n, t0 + k * delta));
    Ok((at(-2.0)? - at(2.0)? + (at(1.0)? - at(-1.0)?) * 8.0) / (12.0 * delta))
}

/// The jet `u, u_1, ..., u_m` at every interior point of a sampled field.
pub fn field_jets(field: &SolutionField, max_order: u32, accuracy: u32) -> Result<(Grid, Vec<Jet>)> {
    let radius = (1..=max_order).map(|o| Stencil::central(o, accuracy).radius).max().unwrap_or(0);
    let base = field.interior(radius)?;
    let mut orders = vec![base.clone()];
    for o in 1..=max_order {
        let d = fd_derivative(field, o, accuracy)?;
        let trim = radius - Stencil::central(o, accuracy).radius;
        orders.push(d.interior(trim)?);
    }
    let jets = (0..base.grid.nx)
        .map(|i| Jet::new(orders.iter().map(|f| f.row(i)).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok((base.grid, jets))
}

/// `sup |∂u/∂t_{2n+1} - K(u, u_1, ...)|` over interior points, with `K = flow` evaluated on
/// finite-difference jets of the sampled solution.
///
/// `times` fixes every active time except `x`, which runs over the grid.
pub fn flow_residual<S: ClosedForm + ?Sized>(
    sol: &S,
    flow: &VectorPoly,
    n: u32,
    times: &TimeVector,
    config: &ResidualConfig,
) -> Result<VerificationReport> {
    let at = |x: f64| times.clone().with(0, x);
    let field = SolutionField::sample(config.grid, sol.dim(), sol.label(), |x| sol.value(&at(x)))?;
    if !field.is_finite() {
        return Err(Error::InvalidParams("solution samples are not finite".into()));
    }
    let max_order = flow.max_order().unwrap_or(0);
    let (grid, jets) = field_jets(&field, max_order, config.accuracy)?;
    let residual = jets
        .par_iter()
        .enumerate()
        .map(|(i, jet)| -> Result<f64> {
            let t = at(grid.x(i));
            let ut = match config.method {
                TimeMethod::AnalyticXi => match sol.time_derivative(&t, n) {
                    Some(d) => d?,
                    None => {
                        return Err(Error::InvalidParams(
                            "analytic time derivative not available for this solution".into(),
                        ))
                    }
                },
                TimeMethod::Fd { delta } => time_derivative_fd(sol, &t, n, delta)?,
            };
            Ok((ut - flow.eval(jet)?).amax())
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    let method = match config.method {
        TimeMethod::AnalyticXi => "analytic_xi".to_string(),
        TimeMethod::Fd { delta } => format!("fd(delta={delta})"),
    };
    Ok(VerificationReport::new(format!("flow residual n={n}"), residual, config.tolerance)
        .with("solution", sol.label())
        .with("method", method)
        .with("grid", config.grid)
        .with("h", config.grid.h())
        .with("stencil_accuracy", config.accuracy)
        .with("interior_points", grid.nx))
}
