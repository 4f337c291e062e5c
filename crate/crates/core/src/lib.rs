//! Densities of sets of integral ideals in quadratic number fields.

pub mod arith;
pub mod cli;
pub mod density;
pub mod enumerate;
pub mod error;
pub mod experiments;
pub mod family;
pub mod field;
pub mod ideal;
pub mod zeta;

pub use error::{Error, Result};
