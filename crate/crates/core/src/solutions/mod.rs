//! Closed-form solutions over the trivial background: the one-soliton, rank-s
//! breathers, their Darboux matrices and the Bäcklund transformation.

mod backlund;
mod breather;
mod soliton;
mod times;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use backlund::{backlund_residual, BacklundResidual, Branch, FieldSamples, CONSTRAINT_SLACK};
pub use breather::{
    breather_bcd, breather_darboux, breather_delta, breather_dress, breather_fgh, breather_m0,
    breather_q, delta_closed_form, rank1_breather, scalar_breather, scalar_breather_with_gradient,
    random_isotropic, random_pole, Bcd, BreatherParams, Fgh, AXIS_TOL, RCOND_TOL,
};
pub use soliton::{
    darboux_from_projector, dressing_apply, one_soliton, one_soliton_dxi, projector, q_form,
    soliton_a0, soliton_darboux, soliton_q, soliton_q_from_psi, SolitonParams,
};
pub use times::{dxi_dt, fundamental_solution, xi, TimeVector, Variant};

/// Imaginary residue tolerated in a dressed output before it is rejected.
pub const REAL_RESIDUE_TOL: f64 = 1e-10;

/// `Q = diag(-1, 1, ..., 1)` of the given size.
pub fn q_diag(size: usize) -> DMatrix<Complex64> {
    let mut q = DMatrix::identity(size, size);
    q[(0, 0)] = Complex64::new(-1.0, 0.0);
    q
}
