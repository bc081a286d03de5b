pub mod arcs;
pub mod arith;
pub mod cli;
pub mod decomp;
pub mod error;
pub mod expsum;
pub mod pretentious;

pub use error::{Error, Result};
