pub mod error;
pub mod linalg;
pub mod partition;
pub mod patterns;
pub mod scalar;
pub mod suites;
pub mod verma;
pub mod virasoro;
pub mod yangian;

pub use error::{Error, Result};
