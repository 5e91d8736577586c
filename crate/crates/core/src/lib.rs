pub mod diffalg;
pub mod error;
pub mod hierarchy;
pub mod numerics;
pub mod report;
pub mod solutions;
pub mod suite;

pub use error::{Error, Result};
pub use report::VerificationReport;
