//! Majorization predicates on explicit vectors and on compressed spectra.
//!
//! `x ≺ y` holds when every prefix sum of the sorted `x` is at most the
//! corresponding prefix sum of `y` (totals being equal). A comparison is
//! summarized in a [`MajReport`]: whether it fails, holds only on the
//! boundary (some interior prefix sums coincide), or holds strictly.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{wire, Rational, Scalar, ScalarBackend};
use crate::specvec::{ProbVec, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every interior prefix inequality is strict.
    StrictInterior,
    /// Majorization holds with at least one interior equality.
    Boundary,
    Fails,
}

impl Verdict {
    /// True unless the comparison fails.
    pub fn holds(self) -> bool {
        self != Verdict::Fails
    }
}

/// First prefix position where `e_l(x) > e_l(y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Violation<S: Scalar = Rational> {
    #[serde(with = "wire::count")]
    pub l: BigUint,
    #[serde(with = "wire::scalar")]
    pub ex: S,
    #[serde(with = "wire::scalar")]
    pub ey: S,
}

/// Outcome of a majorization comparison.
///
/// `equality_indices` lists interior positions `1 <= l < n` with
/// `e_l(x) = e_l(y)`, up to the first violation if there is one. For
/// spectra only block boundaries are examined; when the prefix sums agree
/// along a whole run between two boundaries, `equality_on_segment` is set and
/// the first interior position of that run is listed as well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MajReport<S: Scalar = Rational> {
    pub verdict: Verdict,
    #[serde(with = "wire::counts")]
    pub equality_indices: Vec<BigUint>,
    #[serde(default)]
    pub equality_on_segment: bool,
    pub first_violation: Option<Violation<S>>,
}

impl<S: Scalar> MajReport<S> {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }

    pub fn is_strict_interior(&self) -> bool {
        self.verdict == Verdict::StrictInterior
    }

    pub fn has_equality_at(&self, l: u64) -> bool {
        let l = BigUint::from(l);
        self.equality_indices.contains(&l)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports always serialize")
    }
}

/// One evaluated prefix position, recorded by [`spectrum_majorizes_traced`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Checkpoint<S: Scalar = Rational> {
    #[serde(with = "wire::count")]
    pub l: BigUint,
    #[serde(with = "wire::scalar")]
    pub ex: S,
    #[serde(with = "wire::scalar")]
    pub ey: S,
}

/// Accumulates per-position comparisons into a report.
struct ReportBuilder<S: Scalar> {
    equality_indices: Vec<BigUint>,
    equality_on_segment: bool,
    first_violation: Option<Violation<S>>,
}

impl<S: Scalar> ReportBuilder<S> {
    fn new() -> Self {
        ReportBuilder {
            equality_indices: Vec::new(),
            equality_on_segment: false,
            first_violation: None,
        }
    }

    fn record(&mut self, l: &BigUint, ex: &S, ey: &S, order: Ordering) {
        match order {
            Ordering::Greater if self.first_violation.is_none() => {
                self.first_violation = Some(Violation {
                    l: l.clone(),
                    ex: ex.clone(),
                    ey: ey.clone(),
                })
            }
            Ordering::Equal => self.equality_indices.push(l.clone()),
            _ => {}
        }
    }

    fn finish(self) -> MajReport<S> {
        let verdict = if self.first_violation.is_some() {
            Verdict::Fails
        } else if self.equality_indices.is_empty() && !self.equality_on_segment {
            Verdict::StrictInterior
        } else {
            Verdict::Boundary
        };
        MajReport {
            verdict,
            equality_indices: self.equality_indices,
            equality_on_segment: self.equality_on_segment,
            first_violation: self.first_violation,
        }
    }
}

fn check_dims<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    Ok(())
}

/// Decide `x ≺ y` by direct prefix sums. Both vectors must have the same
/// dimension; pad explicitly with [`ProbVec::pad_to`] if needed.
pub fn majorizes<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>) -> Result<MajReport<S>> {
    check_dims(x, y)?;
    let backend = x.backend().join(y.backend());
    let mut builder = ReportBuilder::new();
    let (mut ex, mut ey) = (S::zero(), S::zero());
    for (l, (a, b)) in x.entries().iter().zip(y.entries()).enumerate().take(x.dim() - 1) {
        ex += a;
        ey += b;
        let pos = BigUint::from(l + 1);
        builder.record(&pos, &ex, &ey, backend.compare(&ex, &ey));
        if builder.first_violation.is_some() {
            break;
        }
    }
    Ok(builder.finish())
}

/// Decide majorization between two compressed spectra of equal length.
///
/// Only block boundaries of either spectrum are visited. Between two
/// consecutive boundaries both prefix-sum functions are linear in `l`, so
/// their difference is linear too and its sign everywhere follows from the
/// values at the boundaries.
pub fn spectrum_majorizes<S: Scalar>(sx: &Spectrum<S>, sy: &Spectrum<S>) -> Result<MajReport<S>> {
    walk_spectra(sx, sy, None)
}

/// [`spectrum_majorizes`] plus every evaluated position.
pub fn spectrum_majorizes_traced<S: Scalar>(
    sx: &Spectrum<S>,
    sy: &Spectrum<S>,
) -> Result<(MajReport<S>, Vec<Checkpoint<S>>)> {
    let mut trace = Vec::new();
    let report = walk_spectra(sx, sy, Some(&mut trace))?;
    Ok((report, trace))
}

fn walk_spectra<S: Scalar>(
    sx: &Spectrum<S>,
    sy: &Spectrum<S>,
    mut trace: Option<&mut Vec<Checkpoint<S>>>,
) -> Result<MajReport<S>> {
    if sx.total_count() != sy.total_count() {
        return Err(Error::CountMismatch {
            left: sx.total_count().to_string(),
            right: sy.total_count().to_string(),
        });
    }
    let backend = sx.backend().join(sy.backend());
    let (mx, my) = (sx.total_mass(), sy.total_mass());
    if !backend.eq(&mx, &my) {
        return Err(Error::MassMismatch {
            left: mx.to_string(),
            right: my.to_string(),
        });
    }

    let total = sx.total_count().clone();
    if total.is_zero() {
        return Ok(ReportBuilder::new().finish());
    }
    let (bx, by) = (sx.blocks(), sy.blocks());
    let (mut ix, mut iy) = (0usize, 0usize);
    let (mut rx, mut ry) = (bx[0].count.clone(), by[0].count.clone());
    let mut pos = BigUint::zero();
    let (mut ex, mut ey) = (S::zero(), S::zero());
    let mut prev_pos = BigUint::zero();
    let mut prev_equal = true;
    let mut builder = ReportBuilder::new();

    while pos < total {
        let step = if rx < ry { rx.clone() } else { ry.clone() };
        let weight = S::from_count(&step);
        ex += &(bx[ix].value.clone() * &weight);
        ey += &(by[iy].value.clone() * &weight);
        pos += &step;
        rx -= &step;
        ry -= &step;
        if rx.is_zero() && ix + 1 < bx.len() {
            ix += 1;
            rx = bx[ix].count.clone();
        }
        if ry.is_zero() && iy + 1 < by.len() {
            iy += 1;
            ry = by[iy].count.clone();
        }

        let order = if pos == total {
            // totals agree (checked above); the end point is definitional
            Ordering::Equal
        } else {
            backend.compare(&ex, &ey)
        };
        if let Some(t) = trace.as_deref_mut() {
            t.push(Checkpoint {
                l: pos.clone(),
                ex: ex.clone(),
                ey: ey.clone(),
            });
        }
        if order == Ordering::Equal && prev_equal && &pos - &prev_pos >= BigUint::from(2u32) {
            builder.equality_on_segment = true;
            builder.equality_indices.push(&prev_pos + BigUint::one());
        }
        if pos < total {
            builder.record(&pos, &ex, &ey, order);
            if builder.first_violation.is_some() {
                break;
            }
        }
        prev_equal = order == Ordering::Equal;
        prev_pos = pos.clone();
    }
    Ok(builder.finish())
}

/// `x` lies in the interior of S(y): every interior prefix inequality strict.
pub fn is_interior<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>) -> Result<bool> {
    Ok(majorizes(x, y)?.is_strict_interior())
}

/// `x ≺ y` together with `x_1 < y_1` and `x_n > y_n`.
pub fn is_generalized_interior<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>) -> Result<bool> {
    let report = majorizes(x, y)?;
    let b = x.backend().join(y.backend());
    Ok(report.holds() && b.lt(x.first(), y.first()) && b.gt(x.last(), y.last()))
}

/// Whether interior points of S(y) and S(yp) always give interior points of
/// S(y ⊕ yp): true iff `y_1 > yp_last` and `yp_1 > y_last`.
///
/// Both vectors must be non-uniform.
pub fn check_direct_sum_interior_condition<S: Scalar>(y: &ProbVec<S>, yp: &ProbVec<S>) -> Result<bool> {
    if y.is_uniform() {
        return Err(Error::Uniform("first vector"));
    }
    if yp.is_uniform() {
        return Err(Error::Uniform("second vector"));
    }
    let b = y.backend().join(yp.backend());
    Ok(b.gt(y.first(), yp.last()) && b.gt(yp.first(), y.last()))
}

/// Overlap conditions on a chain of sorted (possibly unnormalized) vectors,
/// each repeated some number of times in a direct sum:
///
/// 1. the first vector has the largest head,
/// 2. the last vector has the smallest tail,
/// 3. each vector's tail is strictly below the next vector's head.
///
/// When these hold, a direct sum of interior points of the pieces is an
/// interior point of the direct sum of the pieces.
pub fn check_overlap_chain<S: Scalar>(links: &[(Vec<S>, BigUint)], backend: ScalarBackend) -> bool {
    let ends: Vec<(S, S)> = links
        .iter()
        .filter(|(v, count)| !v.is_empty() && !count.is_zero())
        .map(|(v, _)| {
            let head = v.iter().cloned().reduce(|a, b| if b > a { b } else { a });
            let tail = v.iter().cloned().reduce(|a, b| if b < a { b } else { a });
            (head.expect("nonempty"), tail.expect("nonempty"))
        })
        .collect();
    let Some(((first_head, _), (_, last_tail))) = ends.first().zip(ends.last()) else {
        return true;
    };
    let max_head = ends.iter().all(|(h, _)| backend.compare(h, first_head) != Ordering::Greater);
    let min_tail = ends.iter().all(|(_, t)| backend.compare(t, last_tail) != Ordering::Less);
    let overlapping = ends
        .windows(2)
        .all(|w| backend.lt(&w[0].1, &w[1].0));
    max_head && min_tail && overlapping
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{pv, q};

    fn three_copy_pair() -> (ProbVec, ProbVec) {
        (pv(&["0.4", "0.4", "0.1", "0.1"]), pv(&["0.5", "0.25", "0.25", "0"]))
    }

    #[test]
    fn single_copy_fails_at_two() {
        let (x, y) = three_copy_pair();
        let r = majorizes(&x, &y).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        let v = r.first_violation.unwrap();
        assert_eq!(v.l, BigUint::from(2u32));
        assert_eq!((v.ex, v.ey), (q(4, 5), q(3, 4)));
    }

    #[test]
    fn reflexive_is_boundary_everywhere() {
        let (x, _) = three_copy_pair();
        let r = majorizes(&x, &x).unwrap();
        assert_eq!(r.verdict, Verdict::Boundary);
        assert_eq!(
            r.equality_indices,
            (1u32..4).map(BigUint::from).collect::<Vec<_>>()
        );
        let one = pv(&["1"]);
        assert!(majorizes(&one, &one).unwrap().holds());
    }

    #[test]
    fn uniform_is_majorized_by_everything() {
        let u = ProbVec::<Rational>::uniform(4).unwrap();
        let (x, y) = three_copy_pair();
        assert!(majorizes(&u, &x).unwrap().holds());
        assert!(majorizes(&u, &y).unwrap().holds());
        assert!(is_interior(&u, &y).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let (x, _) = three_copy_pair();
        let y3 = pv(&["0.5", "0.25", "0.25"]);
        assert_eq!(
            majorizes(&x, &y3),
            Err(Error::DimensionMismatch { left: 4, right: 3 })
        );
        assert!(majorizes(&x, &y3.pad_to(4)).is_ok());
    }

    #[test]
    fn interior_examples() {
        assert!(is_interior(&pv(&["0.4", "0.3", "0.3"]), &pv(&["0.5", "0.3", "0.2"])).unwrap());
        let y = pv(&["0.5", "0.3", "0.2"]);
        assert!(!is_interior(&y, &y).unwrap());
    }

    #[test]
    fn generalized_interior_examples() {
        let (_, y) = three_copy_pair();
        let avg = pv(&["0.375", "0.375", "0.125", "0.125"]);
        assert!(is_generalized_interior(&avg, &y).unwrap());
        assert!(!is_interior(&avg, &y).unwrap());
        assert!(!is_generalized_interior(&y, &y).unwrap());
        let u = ProbVec::<Rational>::uniform(4).unwrap();
        assert!(is_generalized_interior(&u, &y).unwrap());
    }

    #[test]
    fn direct_sum_condition_examples() {
        let y = pv(&["0.6", "0.4"]);
        assert_eq!(
            check_direct_sum_interior_condition(&y, &pv(&["0.5", "0.5"])),
            Err(Error::Uniform("second vector"))
        );
        assert!(check_direct_sum_interior_condition(&y, &pv(&["0.55", "0.45"])).unwrap());
        // every entry of yp lies below y_2 = 0.1
        let high = pv(&["0.9", "0.1"]);
        let mut raw = vec!["0.06"; 10];
        raw.extend(["0.04"; 10]);
        let low = pv(&raw);
        assert!(!check_direct_sum_interior_condition(&high, &low).unwrap());
        // and an equality shows up at l = dim(y) for interior points
        let x = pv(&["0.8", "0.2"]);
        let mut raw = vec!["0.055"; 10];
        raw.extend(["0.045"; 10]);
        let xp = pv(&raw);
        assert!(is_interior(&x, &high).unwrap());
        assert!(is_interior(&xp, &low).unwrap());
        let r = majorizes(&x.direct_sum(&xp), &high.direct_sum(&low)).unwrap();
        assert_eq!(r.verdict, Verdict::Boundary);
        assert!(r.has_equality_at(2));
    }

    #[test]
    fn overlap_chain_basics() {
        let single = vec![(vec![q(1, 2), q(1, 4)], BigUint::one())];
        assert!(check_overlap_chain(&single, ScalarBackend::Exact));
        assert!(check_overlap_chain::<Rational>(&[], ScalarBackend::Exact));
        let gapped = vec![
            (vec![q(6, 10), q(5, 10)], BigUint::one()),
            (vec![q(3, 10), q(1, 10)], BigUint::one()),
        ];
        assert!(!check_overlap_chain(&gapped, ScalarBackend::Exact));
        let overlapping = vec![
            (vec![q(6, 10), q(2, 10)], BigUint::one()),
            (vec![q(3, 10), q(1, 10)], BigUint::from(2u32)),
        ];
        assert!(check_overlap_chain(&overlapping, ScalarBackend::Exact));
    }

    #[test]
    fn spectra_of_three_copy_pair() {
        let (x, y) = three_copy_pair();
        let r3 = spectrum_majorizes(
            &Spectrum::tensor_power(&x, 3).unwrap(),
            &Spectrum::tensor_power(&y, 3).unwrap(),
        )
        .unwrap();
        assert!(r3.holds());
        let r2 = spectrum_majorizes(
            &Spectrum::tensor_power(&x, 2).unwrap(),
            &Spectrum::tensor_power(&y, 2).unwrap(),
        )
        .unwrap();
        assert_eq!(r2.verdict, Verdict::Fails);
    }

    #[test]
    fn identical_spectra_are_boundary() {
        let s = Spectrum::tensor_power(&pv(&["0.5", "0.5"]), 3).unwrap();
        let r = spectrum_majorizes(&s, &s).unwrap();
        assert_eq!(r.verdict, Verdict::Boundary);
        assert!(r.equality_on_segment);
        assert_eq!(r.equality_indices, vec![BigUint::one()]);

        let (x, _) = three_copy_pair();
        let sx = Spectrum::tensor_power(&x, 2).unwrap();
        let r = spectrum_majorizes(&sx, &sx).unwrap();
        assert_eq!(r.verdict, Verdict::Boundary);
    }

    #[test]
    fn spectrum_errors() {
        let a = Spectrum::from_probvec(&pv(&["0.5", "0.5"]));
        let b = Spectrum::from_probvec(&pv(&["0.5", "0.25", "0.25"]));
        assert!(matches!(spectrum_majorizes(&a, &b), Err(Error::CountMismatch { .. })));
        let c = a.scale(&q(1, 2));
        assert!(matches!(spectrum_majorizes(&a, &c), Err(Error::MassMismatch { .. })));
    }

    #[test]
    fn trace_visits_union_of_boundaries() {
        let x = Spectrum::from_probvec(&pv(&["0.4", "0.4", "0.1", "0.1"]));
        let y = Spectrum::from_probvec(&pv(&["0.5", "0.25", "0.25", "0"]));
        let z = Spectrum::from_probvec(&pv(&["0.5", "0.3", "0.2", "0"]));
        let (r, trace) = spectrum_majorizes_traced(&x, &z).unwrap();
        let ls: Vec<u32> = trace.iter().map(|c| c.l.to_u32_digits().first().copied().unwrap_or(0)).collect();
        // x boundaries {2, 4}, z boundaries {1, 2, 3, 4}
        assert_eq!(ls, vec![1, 2, 3, 4]);
        assert!(r.holds());
        let (r, trace) = spectrum_majorizes_traced(&x, &y).unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(r.first_violation.unwrap().l, BigUint::from(2u32));
    }

    #[test]
    fn report_json_shape() {
        let (x, y) = three_copy_pair();
        let json = majorizes(&x, &y).unwrap().to_json();
        assert_eq!(
            json,
            r#"{"verdict":"fails","equality_indices":[],"equality_on_segment":false,"first_violation":{"l":"2","ex":"4/5","ey":"3/4"}}"#
        );
        let back: MajReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, majorizes(&x, &y).unwrap());
    }
}
