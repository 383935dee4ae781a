//! Helpers shared by unit tests.

use crate::scalar::{Rational, Scalar};
use crate::specvec::ProbVec;

pub(crate) fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub(crate) fn pv(entries: &[&str]) -> ProbVec {
    let raw = entries
        .iter()
        .map(|e| Rational::parse_literal(e).unwrap())
        .collect();
    ProbVec::new(raw, false).unwrap()
}
