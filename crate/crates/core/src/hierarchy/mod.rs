//! The vmKdV hierarchy: flows from the recursion operator, the Lax matrices
//! `V_{2n+1}(λ)` and exact zero-curvature checks.

mod flows;
mod lax;
mod reduction;

pub use flows::{
    lax_step, lax_u, recursion_apply, zero_curvature_residual_with, FlowTable, DEFAULT_CAP,
};
pub use lax::{LaxCoeff, LaxCoeffText, LaxMatrix};
pub use reduction::{check_reduction_group, q_matrix, REDUCTION_TOLERANCE};
