//! Decision procedures for converting one probability vector into another
//! under majorization, with multiple copies, or with a catalyst.

pub mod catalysis;
pub mod error;
pub mod majorize;
pub mod mlocc;
pub mod renyi;
pub mod scalar;
pub mod specvec;

#[cfg(test)]
mod testing;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar, ScalarBackend};
pub use specvec::{tensor_power_spectrum, Block, ProbVec, Spectrum};
