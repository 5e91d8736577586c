use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use crate::diffalg::{ScalarPoly, VectorPoly};
use crate::error::{Error, Result};

use super::lax::{LaxCoeff, LaxMatrix};

/// Default recursion cap for [`FlowTable`]; term counts grow quickly beyond it.
pub const DEFAULT_CAP: u32 = 4;

/// The recursion operator
/// `R f = -D_x^2 f - |u|^2 f - u_1 D_x^{-1}<u,f> - D_x^{-1}(u_1 f^T - f u_1^T) u`.
pub fn recursion_apply(f: &VectorPoly) -> Result<VectorPoly> {
    let u = VectorPoly::u(0);
    let u1 = VectorPoly::u(1);
    let norm = ScalarPoly::pairing(0, 0);
    let mut out = -f.d_x().d_x();
    out.add_assign_ref(&-(&norm * f));
    out.add_assign_ref(&-(&u.dot(f).d_x_inverse()? * &u1));
    out.add_assign_ref(&-u1.wedge(f).d_x_inverse()?.apply(&u));
    Ok(out)
}

/// `U(λ) = λJ + U`.
pub fn lax_u() -> LaxMatrix {
    LaxMatrix::from_coeffs([(1, LaxCoeff::j()), (0, LaxCoeff::u())])
}

/// One step `V_{2n+1} = λ² V_{2n-1} + λ A + B`, where `f` is the flow of `t_{2n-1}`:
///
/// ```text
/// A = -[J, U_t] - D_x^{-1}<u,f> J
/// B = -D_x U_t - D_x^{-1}<u,f> U + D_x^{-1}[D_x U_t, U]
/// ```
/// with `U_t` the U-shaped coefficient carrying `f`.
pub fn lax_step(prev: &LaxMatrix, f: &VectorPoly) -> Result<LaxMatrix> {
    let ut = LaxCoeff::from_v2(f.clone());
    let j = LaxCoeff::j();
    let s = VectorPoly::u(0).dot(f).d_x_inverse()?;
    let a = j.commutator(&ut).neg().sub(&j.times(&s));
    let dut = ut.d_x();
    let b = dut
        .neg()
        .sub(&LaxCoeff::u().times(&s))
        .add(&dut.commutator(&LaxCoeff::u()).d_x_inverse()?);
    Ok(prev
        .shift(2)
        .add(&LaxMatrix::monomial(1, a))
        .add(&LaxMatrix::monomial(0, b)))
}

/// `D_t U(λ) - D_x V(λ) + [U(λ), V(λ)]` where `D_t` is the evolutionary derivative along `flow`.
pub fn zero_curvature_residual_with(v: &LaxMatrix, flow: &VectorPoly) -> LaxMatrix {
    let u = lax_u();
    u.evolutionary_derivative(flow)
        .sub(&v.d_x())
        .add(&u.commutator(v))
}

/// Memoized flows `u_{t_{2n+1}} = R^n u_1` and Lax matrices `V_{2n+1}`.
///
/// Lookups take a read lock; a missing entry is computed outside any lock and then
/// inserted if still absent, so concurrent callers always observe one value per `n`.
#[derive(Debug)]
pub struct FlowTable {
    cap: u32,
    flows: RwLock<BTreeMap<u32, Arc<VectorPoly>>>,
    lax: RwLock<BTreeMap<u32, Arc<LaxMatrix>>>,
}

impl Default for FlowTable {
    fn default() -> Self {
        Self::with_cap(DEFAULT_CAP)
    }
}

fn memo<T>(
    store: &RwLock<BTreeMap<u32, Arc<T>>>,
    n: u32,
    make: impl FnOnce() -> Result<T>,
) -> Result<Arc<T>> {
    if let Some(v) = store.read().expect("flow cache poisoned").get(&n) {
        return Ok(v.clone());
    }
    let value = Arc::new(make()?);
    let mut w = store.write().expect("flow cache poisoned");
    Ok(w.entry(n).or_insert(value).clone())
}

impl FlowTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cap(cap: u32) -> Self {
        FlowTable { cap, flows: RwLock::default(), lax: RwLock::default() }
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    fn check(&self, n: u32) -> Result<()> {
        if n > self.cap {
            Err(Error::RecursionCap { n, cap: self.cap })
        } else {
            Ok(())
        }
    }

    /// The `t_{2n+1}` flow; `flow(0) = u_1`.
    pub fn flow(&self, n: u32) -> Result<Arc<VectorPoly>> {
        self.check(n)?;
        memo(&self.flows, n, || match n {
            0 => Ok(VectorPoly::u(1)),
            _ => recursion_apply(&*self.flow(n - 1)?),
        })
    }

    /// `V_{2n+1}(λ)`; `lax_v(0) = U(λ)`.
    pub fn lax_v(&self, n: u32) -> Result<Arc<LaxMatrix>> {
        self.check(n)?;
        memo(&self.lax, n, || match n {
            0 => Ok(lax_u()),
            _ => lax_step(&*self.lax_v(n - 1)?, &*self.flow(n - 1)?),
        })
    }

    pub fn zero_curvature_residual(&self, n: u32) -> Result<LaxMatrix> {
        Ok(zero_curvature_residual_with(&*self.lax_v(n)?, &*self.flow(n)?))
    }
}
