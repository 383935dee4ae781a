//! Probability vectors and their compressed spectra.

mod probvec;
mod spectrum;

pub use probvec::{parse_vector_literal, ProbVec};
pub use spectrum::{Block, Spectrum, MATERIALIZE_LIMIT};

use crate::error::Result;
use crate::scalar::Scalar;

/// Compressed sorted spectrum of `x^{⊗k}`; see [`Spectrum::tensor_power`].
pub fn tensor_power_spectrum<S: Scalar>(x: &ProbVec<S>, k: u32) -> Result<Spectrum<S>> {
    Spectrum::tensor_power(x, k)
}
