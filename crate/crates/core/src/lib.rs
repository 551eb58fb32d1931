//! Semi-inner products on finite-dimensional real normed spaces and certified
//! bounds on the triangle ratio built from them.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod sip;
pub mod space;
pub mod witness;

pub use error::{Error, Result};
