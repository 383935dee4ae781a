//! Shared inputs for the benchmarks.

use trumpkit::{ProbVec, Rational, Scalar};

pub fn vector(entries: &[&str]) -> ProbVec {
    let raw = entries
        .iter()
        .map(|e| Rational::parse_literal(e).expect("valid literal"))
        .collect();
    ProbVec::new(raw, false).expect("normalized literal")
}

/// The four-dimensional pair that needs three copies.
pub fn three_copy_pair() -> (ProbVec, ProbVec) {
    (
        vector(&["0.4", "0.4", "0.1", "0.1"]),
        vector(&["0.5", "0.25", "0.25", "0"]),
    )
}

/// A pair with four distinct values on each side.
pub fn distinct_pair() -> (ProbVec, ProbVec) {
    (
        vector(&["0.4", "0.3", "0.2", "0.1"]),
        vector(&["0.5", "0.3", "0.15", "0.05"]),
    )
}

/// Reference majorization on fully expanded tensor powers.
pub fn expanded_in_mk(x: &ProbVec, y: &ProbVec, k: u32) -> bool {
    let (px, py) = (x.tensor_power(k), y.tensor_power(k));
    let mut ex = Rational::from_u64(0);
    let mut ey = Rational::from_u64(0);
    for (a, b) in px.entries().iter().zip(py.entries()) {
        ex += a;
        ey += b;
        if ex > ey {
            return false;
        }
    }
    true
}
