use thiserror::Error;

/// Errors raised across the symbolic and numeric layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The integrand is not a total x-derivative of a differential polynomial.
    #[error("not exact: no antiderivative of weight {weight} (degree {degree}) exists")]
    NotExact { weight: u32, degree: u32 },

    #[error("jet is missing derivative order u{order} (jet holds orders 0..{available})")]
    MissingJetOrder { order: u32, available: usize },

    #[error("jet is malformed: {0}")]
    InvalidJet(String),

    #[error("flow index {n} exceeds the configured recursion cap {cap}")]
    RecursionCap { n: u32, cap: u32 },

    #[error("degenerate denominator: {what} = {value:e}")]
    DegenerateDenominator { what: &'static str, value: f64 },

    #[error("dressed output is not real: imaginary residue {residue:e}")]
    NonRealOutput { residue: f64 },

    #[error("spectral parameter {lambda} hits a pole of the Darboux matrix")]
    PoleEvaluation { lambda: String },

    #[error("Backlund constraint violated: |u~ - u|^2 / (4 mu^2) exceeds 1 by {excess:e}")]
    ConstraintViolation { excess: f64 },

    #[error("breather pole mu = {mu} lies on the real or imaginary axis")]
    AxisPole { mu: String },

    #[error("matrix H is singular (reciprocal condition {rcond:e})")]
    SingularH { rcond: f64 },

    #[error("matrix defining D is singular (reciprocal condition {rcond:e})")]
    SingularD { rcond: f64 },

    #[error("grid too small: {points} points, stencil needs at least {needed}")]
    GridTooSmall { points: usize, needed: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
