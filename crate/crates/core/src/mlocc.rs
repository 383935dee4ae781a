//! Multiple-copy convertibility: `x^{⊗k} ≺ y^{⊗k}` for some k.
//!
//! Membership in M(y) quantifies over all k, and no uniform bound on k
//! exists whenever multiple copies help at all. Scans are therefore bounded
//! by an explicit `k_max`, and classifications that depend on membership
//! can come back [`MembershipClass::Unknown`].

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorize::{majorizes, spectrum_majorizes, MajReport, Verdict};
use crate::scalar::{Rational, Scalar};
use crate::specvec::{ProbVec, Spectrum};

/// Default bound on the number of copies tried by scans.
pub const DEFAULT_K_MAX: u32 = 8;

fn check_dims<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    Ok(())
}

/// Majorization report for `x^{⊗k}` against `y^{⊗k}` on compressed spectra.
pub fn mk_report<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>, k: u32) -> Result<MajReport<S>> {
    check_dims(x, y)?;
    let sx = Spectrum::tensor_power(x, k)?;
    let sy = Spectrum::tensor_power(y, k)?;
    spectrum_majorizes(&sx, &sy)
}

/// Whether `x^{⊗k} ≺ y^{⊗k}`, i.e. `x ∈ M_k(y)`.
pub fn in_mk<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>, k: u32) -> Result<bool> {
    Ok(mk_report(x, y, k)?.holds())
}

/// Necessary condition for membership at any copy count:
/// `x_1 <= y_1` and `x_n >= y_n`.
pub fn passes_endpoint_filter<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>) -> bool {
    let b = x.backend().join(y.backend());
    !b.gt(x.first(), y.first()) && !b.lt(x.last(), y.last())
}

/// Per-k results of a bounded multiple-copy search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MloccScan<S: Scalar = Rational> {
    pub x: ProbVec<S>,
    pub y: ProbVec<S>,
    pub k_max: u32,
    pub results: BTreeMap<u32, Verdict>,
    /// Least k whose verdict is not `fails`.
    pub first_success: Option<u32>,
    /// Set when the endpoint filter ruled out every k without computing.
    pub filtered: bool,
}

impl<S: Scalar> MloccScan<S> {
    /// No success within `k_max`, yet membership for larger k is not ruled out.
    pub fn undecided(&self) -> bool {
        self.first_success.is_none() && !self.filtered
    }
}

/// Check `x^{⊗k} ≺ y^{⊗k}` for every k in `1..=k_max`.
///
/// Majorization is not monotone in k, so every k is evaluated even after a
/// success. Pairs failing [`passes_endpoint_filter`] short-circuit to
/// all-fail.
pub fn scan_mk<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>, k_max: u32) -> Result<MloccScan<S>> {
    check_dims(x, y)?;
    if k_max == 0 {
        return Err(Error::ZeroCopies);
    }
    let filtered = !passes_endpoint_filter(x, y);
    let verdicts: Vec<(u32, Verdict)> = if filtered {
        (1..=k_max).map(|k| (k, Verdict::Fails)).collect()
    } else {
        (1..=k_max)
            .into_par_iter()
            .map(|k| mk_report(x, y, k).map(|r| (k, r.verdict)))
            .collect::<Result<_>>()?
    };
    let first_success = verdicts.iter().find(|(_, v)| v.holds()).map(|(k, _)| *k);
    Ok(MloccScan {
        x: x.clone(),
        y: y.clone(),
        k_max,
        results: verdicts.into_iter().collect(),
        first_success,
        filtered,
    })
}

/// For `x` on the boundary of S(y) with a single interior equality at
/// position `d` (1-based, `1 < d < n-1`), `x^{⊗k}` is a strict interior
/// point of S(y^{⊗k}) exactly when
///
/// `y_d^k < y_1^{k-1} y_{d+1}` and `y_{d+1}^k > y_d y_n^{k-1}`.
///
/// The condition does not depend on `x`.
pub fn copies_strictify_boundary<S: Scalar>(y: &ProbVec<S>, d: usize, k: u32) -> Result<bool> {
    let n = y.dim();
    if d < 2 || d + 2 > n {
        return Err(Error::IndexOutOfRange {
            index: d,
            range: format!("2..={}", n.saturating_sub(2)),
        });
    }
    if k == 0 {
        return Err(Error::ZeroCopies);
    }
    let e = y.entries();
    Ok(overlap_condition(y, e[d - 1].clone(), e[d].clone(), k))
}

/// `a^k < y_1^{k-1} b` and `b^k > a y_n^{k-1}`.
fn overlap_condition<S: Scalar>(y: &ProbVec<S>, a: S, b: S, k: u32) -> bool {
    let backend = y.backend();
    let k = k as i32;
    let head = y.first();
    let tail = y.last();
    let left = backend.lt(&a.powi(k), &(head.powi(k - 1) * &b));
    let right = backend.gt(&b.powi(k), &(a * &tail.powi(k - 1)));
    left && right
}

/// Least `k <= k_max` satisfying
///
/// `y_{dmin}^k < y_1^{k-1} y_{dmax+1}` and `y_{dmax+1}^k > y_{dmin} y_n^{k-1}`
///
/// with `dmin = min{i : y_1 > y_i}` and `dmax = max{i : y_i > y_n}`, a copy
/// count at which every generalized interior point of S(y) is interior to
/// M_k(y).
///
/// Because `y_{dmax+1} = y_n` by definition of `dmax`, the second inequality
/// reads `y_n > y_{dmin}` and never holds; the function returns `None` for
/// every admissible `y`. It is kept as stated rather than guessing a repair.
pub fn uniform_interior_copy_bound<S: Scalar>(y: &ProbVec<S>, k_max: u32) -> Result<Option<u32>> {
    if y.is_uniform() {
        return Err(Error::Uniform("target"));
    }
    if !classify_usefulness(y).useful {
        return Err(Error::Precondition(
            "multiple copies do not enlarge the reachable set of this target".into(),
        ));
    }
    let backend = y.backend();
    let e = y.entries();
    let n = e.len();
    let d_min = (1..=n)
        .find(|&i| backend.gt(y.first(), &e[i - 1]))
        .expect("non-uniform");
    let d_max = (1..=n)
        .rev()
        .find(|&i| backend.gt(&e[i - 1], y.last()))
        .expect("non-uniform");
    let a = e[d_min - 1].clone();
    let b = e[d_max].clone();
    Ok((1..=k_max).find(|&k| overlap_condition(y, a.clone(), b.clone(), k)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipClass {
    /// In M(y) and in its interior.
    Interior,
    /// In M(y) but on its boundary.
    Boundary,
    /// Provably outside M(y).
    NotMember,
    /// No success within `k_max`; membership undecided.
    Unknown,
}

/// Locate `x` relative to M(y): a member found within `k_max` copies is
/// interior exactly when `x_1 < y_1` and `x_n > y_n`.
pub fn classify_membership<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>, k_max: u32) -> Result<MembershipClass> {
    let scan = scan_mk(x, y, k_max)?;
    if scan.filtered {
        return Ok(MembershipClass::NotMember);
    }
    if scan.first_success.is_none() {
        return Ok(MembershipClass::Unknown);
    }
    let b = x.backend().join(y.backend());
    if b.lt(x.first(), y.first()) && b.gt(x.last(), y.last()) {
        Ok(MembershipClass::Interior)
    } else {
        Ok(MembershipClass::Boundary)
    }
}

/// Whether multiple copies (equivalently, catalysts) reach more than plain
/// majorization for target `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct UsefulnessVerdict<S: Scalar = Rational> {
    pub useful: bool,
    /// 1-based split index `l` with `y_1 > y_l` and `y_{l+1} > y_n`.
    pub witness_l: Option<usize>,
    /// Boundary point of S(y) (equality at `l`) that is interior to M(y).
    pub witness_x: Option<ProbVec<S>>,
}

/// Useful iff some `1 < l < n-1` has `y_1 > y_l` and `y_{l+1} > y_n`. The
/// least such `l` is reported with the witness obtained by averaging the
/// first `l` and the last `n-l` components of `y`.
///
/// The dimension is taken as given: appending zeros can change the answer.
pub fn classify_usefulness<S: Scalar>(y: &ProbVec<S>) -> UsefulnessVerdict<S> {
    let backend = y.backend();
    let e = y.entries();
    let n = e.len();
    let split = (2..n.saturating_sub(1))
        .find(|&l| backend.gt(y.first(), &e[l - 1]) && backend.gt(&e[l], y.last()));
    match split {
        None => UsefulnessVerdict {
            useful: false,
            witness_l: None,
            witness_x: None,
        },
        Some(l) => {
            let head = y.prefix_mass(l);
            let tail = S::one() - &head;
            let head_avg = head / &S::from_u64(l as u64);
            let tail_avg = tail / &S::from_u64((n - l) as u64);
            let mut entries = vec![head_avg; l];
            entries.extend(std::iter::repeat_n(tail_avg, n - l));
            UsefulnessVerdict {
                useful: true,
                witness_l: Some(l),
                witness_x: Some(ProbVec::from_parts(entries, backend)),
            }
        }
    }
}

/// A vector `x` with `y ≺ x` and `x ⊀ y`, hence outside M(y), obtained by
/// moving `Δ = min(y_1 - y_l, y_m - y_n)` from position `m` to position `l`
/// (`l` the first index with `y_l ≠ y_1`, `m` the last with `y_m ≠ y_n`).
/// The segment from the uniform vector to this `x` leaves M(y) without
/// crossing a boundary point, so M(y) is not closed.
pub fn nonclosedness_witness<S: Scalar>(y: &ProbVec<S>) -> Result<ProbVec<S>> {
    if !classify_usefulness(y).useful {
        return Err(Error::Precondition(
            "target admits no split index; M(y) = S(y) is closed".into(),
        ));
    }
    let backend = y.backend();
    let e = y.entries();
    let l = e
        .iter()
        .position(|v| !backend.eq(v, y.first()))
        .expect("useful targets are non-uniform");
    let m = e
        .iter()
        .rposition(|v| !backend.eq(v, y.last()))
        .expect("useful targets are non-uniform");
    let up = y.first().clone() - &e[l];
    let down = e[m].clone() - y.last();
    let delta = if up < down { up } else { down };
    let mut entries = e.to_vec();
    entries[l] += &delta;
    entries[m] -= &delta;
    Ok(ProbVec::from_parts(entries, backend))
}

/// Endpoint condition plus plain majorization: used to confirm that when
/// multiple copies do not help, the endpoint filter alone decides `x ≺ y`.
pub fn endpoint_filter_decides<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>) -> Result<bool> {
    let filter = passes_endpoint_filter(x, y);
    Ok(filter == majorizes(x, y)?.holds())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorize::is_generalized_interior;
    use crate::testing::{pv, q};

    fn three_copy_pair() -> (ProbVec, ProbVec) {
        (pv(&["0.4", "0.4", "0.1", "0.1"]), pv(&["0.5", "0.25", "0.25", "0"]))
    }

    #[test]
    fn three_copy_pair_needs_three_copies() {
        let (x, y) = three_copy_pair();
        assert!(!in_mk(&x, &y, 1).unwrap());
        assert!(!in_mk(&x, &y, 2).unwrap());
        assert!(in_mk(&x, &y, 3).unwrap());
        assert!(in_mk(&x, &x, 5).unwrap());
    }

    #[test]
    fn scan_reports_every_k() {
        let (x, y) = three_copy_pair();
        let scan = scan_mk(&x, &y, 4).unwrap();
        assert_eq!(scan.first_success, Some(3));
        assert_eq!(scan.results.len(), 4);
        assert_eq!(scan.results[&1], Verdict::Fails);
        assert_eq!(scan.results[&2], Verdict::Fails);
        assert!(scan.results[&3].holds());
        assert!(!scan.filtered);

        let same = scan_mk(&x, &x, 3).unwrap();
        assert_eq!(same.first_success, Some(1));

        let bad = scan_mk(&pv(&["0.6", "0.2", "0.1", "0.1"]), &y, 4).unwrap();
        assert!(bad.filtered);
        assert_eq!(bad.first_success, None);
        assert!(!bad.undecided());

        let short = scan_mk(&x, &y, 2).unwrap();
        assert!(short.undecided());
    }

    #[test]
    fn strictify_condition_zero_tail() {
        let y = pv(&["0.5", "0.25", "0.25", "0"]);
        assert!(!copies_strictify_boundary(&y, 2, 1).unwrap());
        for k in 2..8 {
            assert!(copies_strictify_boundary(&y, 2, k).unwrap(), "k={k}");
        }
    }

    #[test]
    fn strictify_condition_edges() {
        let u = ProbVec::<Rational>::uniform(4).unwrap();
        for k in 1..6 {
            assert!(!copies_strictify_boundary(&u, 2, k).unwrap());
        }
        let y = pv(&["0.4", "0.3", "0.2", "0.1"]);
        assert!(!copies_strictify_boundary(&y, 2, 1).unwrap());
        assert!(copies_strictify_boundary(&y, 1, 2).is_err());
        assert!(copies_strictify_boundary(&y, 3, 2).is_err());
        assert!(copies_strictify_boundary(&y, 2, 0).is_err());
    }

    #[test]
    fn uniform_bound_is_absent_as_stated() {
        assert_eq!(
            uniform_interior_copy_bound(&pv(&["0.5", "0.25", "0.25", "0"]), 50).unwrap(),
            None
        );
        assert_eq!(
            uniform_interior_copy_bound(&pv(&["0.4", "0.3", "0.2", "0.1"]), 50).unwrap(),
            None
        );
        assert_eq!(
            uniform_interior_copy_bound(&pv(&["0.30", "0.28", "0.22", "0.20"]), 50).unwrap(),
            None
        );
        assert!(uniform_interior_copy_bound(&ProbVec::<Rational>::uniform(4).unwrap(), 5).is_err());
        assert!(uniform_interior_copy_bound(&pv(&["0.5", "0.25", "0.25"]), 5).is_err());
    }

    #[test]
    fn membership_classes() {
        let (x, y) = three_copy_pair();
        assert_eq!(classify_membership(&x, &y, 8).unwrap(), MembershipClass::Interior);
        assert_eq!(classify_membership(&y, &y, 2).unwrap(), MembershipClass::Boundary);
        assert_eq!(
            classify_membership(&pv(&["0.6", "0.2", "0.1", "0.1"]), &y, 4).unwrap(),
            MembershipClass::NotMember
        );
        assert_eq!(classify_membership(&x, &y, 2).unwrap(), MembershipClass::Unknown);
    }

    #[test]
    fn usefulness_examples() {
        let v = classify_usefulness(&pv(&["0.5", "0.25", "0.25"]));
        assert!(!v.useful);
        assert_eq!(v.witness_l, None);

        let y = pv(&["0.5", "0.25", "0.25", "0"]);
        let v = classify_usefulness(&y);
        assert!(v.useful);
        assert_eq!(v.witness_l, Some(2));
        let w = v.witness_x.unwrap();
        assert_eq!(w, pv(&["0.375", "0.375", "0.125", "0.125"]));
        let r = majorizes(&w, &y).unwrap();
        assert_eq!(r.verdict, Verdict::Boundary);
        assert_eq!(r.equality_indices, vec![num_bigint::BigUint::from(2u32)]);
        assert!(is_generalized_interior(&w, &y).unwrap());

        assert!(!classify_usefulness(&ProbVec::<Rational>::uniform(5).unwrap()).useful);
        assert!(!classify_usefulness(&pv(&["1"])).useful);
    }

    #[test]
    fn nonclosedness_examples() {
        let y = pv(&["0.5", "0.25", "0.25", "0"]);
        let x = nonclosedness_witness(&y).unwrap();
        assert_eq!(x, pv(&["0.5", "0.5", "0", "0"]));
        assert!(majorizes(&y, &x).unwrap().holds());
        assert!(!majorizes(&x, &y).unwrap().holds());

        let y = pv(&["0.4", "0.3", "0.2", "0.1"]);
        let x = nonclosedness_witness(&y).unwrap();
        assert_eq!(x, pv(&["0.4", "0.4", "0.1", "0.1"]));
        for k in 1..=6 {
            assert!(!in_mk(&x, &y, k).unwrap());
        }
        assert!(nonclosedness_witness(&pv(&["0.5", "0.25", "0.25"])).is_err());
    }

    #[test]
    fn endpoint_filter_basics() {
        let (x, y) = three_copy_pair();
        assert!(passes_endpoint_filter(&x, &y));
        assert!(!passes_endpoint_filter(&y, &x));
        assert_eq!(x.entries()[0], q(2, 5));
        let y3 = pv(&["0.5", "0.25", "0.25"]);
        assert!(endpoint_filter_decides(&pv(&["0.45", "0.3", "0.25"]), &y3).unwrap());
    }
}
