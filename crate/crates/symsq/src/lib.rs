pub mod arith;
pub mod error;
pub mod exponents;
pub mod lfunc;
pub mod petersson;
pub mod qexp;
pub mod special;

pub use error::{Error, Result};
