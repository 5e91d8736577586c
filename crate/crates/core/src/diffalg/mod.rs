//! Exact differential polynomial algebra over an N-component field `u`.
//!
//! Scalars appear only through the pairings `<u_i,u_j>`, so every expression is valid
//! for generic N. Coefficients are exact rationals; floating point enters only at
//! [`Jet`] evaluation.

macro_rules! forward_binops {
    ($t:ty) => {
        impl std::ops::Add<$t> for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl std::ops::Add<&$t> for $t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                &self + rhs
            }
        }
        impl std::ops::Sub<$t> for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl std::ops::Sub<&$t> for $t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                &self - rhs
            }
        }
        impl std::ops::Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}
pub(crate) use forward_binops;

mod bivector;
pub mod euler;
mod evolution;
mod integrate;
mod monomial;
mod numeric;
mod scalar;
mod text;
mod vector;

pub use bivector::BivectorPoly;
pub use integrate::{d_x_inverse, Graded};
pub use monomial::{Monomial, Pairing};
pub use numeric::Jet;
pub use scalar::{Coeff, ScalarPoly};
pub(crate) use scalar::rat;
pub use vector::VectorPoly;

/// Exact rational `n/d`.
pub fn ratio(n: i64, d: i64) -> Coeff {
    rat(n, d)
}
