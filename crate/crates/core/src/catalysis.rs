//! Catalyst construction and verification.
//!
//! A catalyst for `x → y` is a probability vector `c` with `x⊗c ≺ y⊗c`.
//! Every multi-copy witness `x^{⊗k} ≺ y^{⊗k}` yields one explicitly:
//!
//! `c = (1/k) · (x^{⊗(k-1)} ⊕ x^{⊗(k-2)}⊗y ⊕ ... ⊕ y^{⊗(k-1)})`
//!
//! of dimension `k·n^{k-1}`. Checks run on compressed spectra, so products
//! such as `x ⊗ c^{⊗8}` never need to be materialized.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorize::{spectrum_majorizes, spectrum_majorizes_traced, Checkpoint, MajReport};
use crate::mlocc::{in_mk, passes_endpoint_filter};
use crate::scalar::{Rational, Scalar};
use crate::specvec::{ProbVec, Spectrum};

/// Grid resolution of the lattice pass in [`search_catalyst`].
pub const LATTICE_RESOLUTION: u64 = 20;
/// Denominator used when rounding random catalyst candidates.
pub const SAMPLE_DENOMINATOR: u64 = 1_000_000;

/// How a certificate's catalyst was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatalystSource {
    /// Direct sum of mixed tensor powers from a k-copy witness.
    MultiCopy { k: u32 },
    /// A k-copy construction tensored with a catalyst for the k-copy pair.
    Combined { k: u32, inner_dim: usize },
    /// `copies`-fold tensor power of a single-copy catalyst, certifying
    /// `x^{⊗copies} → y^{⊗copies}`.
    Lifted { copies: u32 },
    /// Heuristic search hit.
    Search { seed: u64, dim: usize, trial: u64 },
}

/// A catalyst together with its provenance and verification result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CatalystCert<S: Scalar = Rational> {
    pub catalyst: ProbVec<S>,
    pub source: CatalystSource,
    /// Whether the certified pair majorizes once tensored with the catalyst.
    pub verified: bool,
    /// Whether the catalyst has the dimension its construction predicts.
    pub dim_bound_ok: bool,
    /// Prefix positions evaluated during verification.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transcript: Vec<Checkpoint<S>>,
}

impl<S: Scalar> CatalystCert<S> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificates always serialize")
    }

    /// Drop the verification transcript.
    pub fn without_transcript(mut self) -> Self {
        self.transcript.clear();
        self
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

/// Compare `sx ⊗ sc` against `sy ⊗ sc`.
fn catalyzed<S: Scalar>(sx: &Spectrum<S>, sy: &Spectrum<S>, sc: &Spectrum<S>) -> Result<MajReport<S>> {
    spectrum_majorizes(&sx.tensor(sc), &sy.tensor(sc))
}

fn catalyzed_traced<S: Scalar>(
    sx: &Spectrum<S>,
    sy: &Spectrum<S>,
    sc: &Spectrum<S>,
) -> Result<(MajReport<S>, Vec<Checkpoint<S>>)> {
    spectrum_majorizes_traced(&sx.tensor(sc), &sy.tensor(sc))
}

/// Majorization report for `x⊗c` against `y⊗c`.
pub fn verify_catalyst<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>, c: &ProbVec<S>) -> Result<MajReport<S>> {
    check_dims(x, y)?;
    catalyzed(
        &Spectrum::from_probvec(x),
        &Spectrum::from_probvec(y),
        &Spectrum::from_probvec(c),
    )
}

/// The catalyst `(1/k) ⊕_{i<k} x^{⊗(k-1-i)} ⊗ y^{⊗i}` at full length, with
/// no precondition check.
pub fn multicopy_catalyst_vector<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>, k: u32) -> Result<ProbVec<S>> {
    check_dims(x, y)?;
    if k == 0 {
        return Err(Error::ZeroCopies);
    }
    let dim = (k as u128).saturating_mul((x.dim() as u128).saturating_pow(k - 1));
    if dim > crate::specvec::MATERIALIZE_LIMIT as u128 {
        return Err(Error::TooLarge(dim.to_string()));
    }
    let scale = S::one() / &S::from_u64(k as u64);
    let mut entries = Vec::with_capacity(dim as usize);
    for i in 0..k {
        let term = x.tensor_power(k - 1 - i).tensor(&y.tensor_power(i));
        entries.extend(term.into_entries().into_iter().map(|v| v * &scale));
    }
    Ok(ProbVec::from_parts(entries, x.backend().join(y.backend())))
}

/// Build and verify the catalyst derived from a k-copy witness.
///
/// Fails with [`Error::Precondition`] unless `x^{⊗k} ≺ y^{⊗k}`.
pub fn catalyst_from_copies<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>, k: u32) -> Result<CatalystCert<S>> {
    if !in_mk(x, y, k)? {
        return Err(Error::Precondition(format!(
            "x^{{⊗{k}}} is not majorized by y^{{⊗{k}}}"
        )));
    }
    let c = multicopy_catalyst_vector(x, y, k)?;
    let (report, transcript) = catalyzed_traced(
        &Spectrum::from_probvec(x),
        &Spectrum::from_probvec(y),
        &Spectrum::from_probvec(&c),
    )?;
    let expected = k as usize * x.dim().pow(k - 1);
    Ok(CatalystCert {
        dim_bound_ok: c.dim() == expected,
        catalyst: c,
        source: CatalystSource::MultiCopy { k },
        verified: report.holds(),
        transcript,
    })
}

/// Given a catalyst `c′` for the k-copy pair (`x^{⊗k}⊗c′ ≺ y^{⊗k}⊗c′`),
/// return the single-copy catalyst `c ⊗ c′`, where `c` is the k-copy
/// construction of [`multicopy_catalyst_vector`].
pub fn combine_catalysts<S: Scalar>(
    x: &ProbVec<S>,
    y: &ProbVec<S>,
    k: u32,
    c_prime: &ProbVec<S>,
) -> Result<CatalystCert<S>> {
    check_dims(x, y)?;
    let sc_prime = Spectrum::from_probvec(c_prime);
    let premise = catalyzed(
        &Spectrum::tensor_power(x, k)?,
        &Spectrum::tensor_power(y, k)?,
        &sc_prime,
    )?;
    if !premise.holds() {
        return Err(Error::Precondition(format!(
            "c′ does not catalyze x^{{⊗{k}}} → y^{{⊗{k}}}"
        )));
    }
    let c = multicopy_catalyst_vector(x, y, k)?;
    let combined = c.tensor(c_prime);
    let (report, transcript) = catalyzed_traced(
        &Spectrum::from_probvec(x),
        &Spectrum::from_probvec(y),
        &Spectrum::from_probvec(&combined),
    )?;
    let expected = k as usize * x.dim().pow(k - 1) * c_prime.dim();
    Ok(CatalystCert {
        dim_bound_ok: combined.dim() == expected,
        catalyst: combined,
        source: CatalystSource::Combined {
            k,
            inner_dim: c_prime.dim(),
        },
        verified: report.holds(),
        transcript,
    })
}

/// From a catalyst `c` for `x → y`, produce `c^{⊗copies}`, a catalyst for
/// `x^{⊗copies} → y^{⊗copies}`, verified on compressed spectra.
pub fn lift_catalyst<S: Scalar>(
    x: &ProbVec<S>,
    y: &ProbVec<S>,
    c: &ProbVec<S>,
    copies: u32,
) -> Result<CatalystCert<S>> {
    if !verify_catalyst(x, y, c)?.holds() {
        return Err(Error::Precondition("c does not catalyze x → y".into()));
    }
    let sc = Spectrum::tensor_power(c, copies)?;
    let (report, transcript) = catalyzed_traced(
        &Spectrum::tensor_power(x, copies)?,
        &Spectrum::tensor_power(y, copies)?,
        &sc,
    )?;
    let catalyst = if copies == 1 { c.clone() } else { sc.to_probvec()? };
    let expected = (c.dim() as u128).checked_pow(copies);
    Ok(CatalystCert {
        dim_bound_ok: expected == Some(catalyst.dim() as u128),
        catalyst,
        source: CatalystSource::Lifted { copies },
        verified: report.holds(),
        transcript,
    })
}

/// Nonincreasing positive integer vectors of length `parts` summing to
/// `total`, in lexicographically decreasing order.
fn sorted_partitions(total: u64, parts: usize, cap: usize) -> Vec<Vec<u64>> {
    fn go(rest: u64, parts: usize, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>, cap: usize) {
        if out.len() >= cap {
            return;
        }
        if parts == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let hi = max.min(rest - (parts as u64 - 1));
        let lo = rest.div_ceil(parts as u64);
        for v in (lo..=hi).rev() {
            cur.push(v);
            go(rest - v, parts - 1, v, cur, out, cap);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if total >= parts as u64 {
        go(total, parts, total, &mut Vec::new(), &mut out, cap);
    }
    out
}

/// Integer weights summing to `SAMPLE_DENOMINATOR`, drawn from the flat
/// Dirichlet distribution of trial `trial`.
fn dirichlet_weights(seed: u64, trial: u64, dim: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let point: Vec<f64> = Dirichlet::new(&vec![1.0; dim])
        .expect("dimension at least two")
        .sample(&mut rng);
    let mut weights: Vec<u64> = point
        .iter()
        .map(|p| (p * SAMPLE_DENOMINATOR as f64).floor() as u64)
        .collect();
    let assigned: u64 = weights.iter().sum();
    weights[0] += SAMPLE_DENOMINATOR.saturating_sub(assigned);
    weights
}

/// Heuristic search for a `dim_c`-dimensional catalyst.
///
/// Tries first a coarse lattice of sorted vectors with entries in multiples
/// of `1/LATTICE_RESOLUTION`, then random points of the simplex rounded to
/// multiples of `1/SAMPLE_DENOMINATOR`, up to `budget` candidates in total.
/// The lowest-indexed verified candidate wins, so results depend only on
/// the seed. `None` means nothing was found, not that no catalyst exists.
pub fn search_catalyst<S: Scalar>(
    x: &ProbVec<S>,
    y: &ProbVec<S>,
    dim_c: usize,
    budget: u64,
    seed: u64,
) -> Result<Option<CatalystCert<S>>> {
    check_dims(x, y)?;
    if dim_c == 0 {
        return Err(Error::Empty);
    }
    if !passes_endpoint_filter(x, y) || budget == 0 {
        return Ok(None);
    }
    let backend = x.backend().join(y.backend());
    let sx = Spectrum::from_probvec(x);
    let sy = Spectrum::from_probvec(y);

    let lattice = if dim_c == 1 {
        vec![vec![1]]
    } else {
        sorted_partitions(LATTICE_RESOLUTION, dim_c, budget as usize)
    };
    let lattice_len = lattice.len() as u64;
    let random_trials = if dim_c == 1 { 0 } else { budget.saturating_sub(lattice_len) };

    let candidate = |trial: u64| -> ProbVec<S> {
        let (weights, denom) = if trial < lattice_len {
            (lattice[trial as usize].clone(), if dim_c == 1 { 1 } else { LATTICE_RESOLUTION })
        } else {
            (dirichlet_weights(seed, trial - lattice_len, dim_c), SAMPLE_DENOMINATOR)
        };
        let denom = S::from_u64(denom);
        let entries = weights.into_iter().map(|w| S::from_u64(w) / &denom).collect();
        ProbVec::from_parts(entries, backend)
    };

    let hit = (0..lattice_len + random_trials)
        .into_par_iter()
        .map(|trial| {
            let c = candidate(trial);
            let ok = catalyzed(&sx, &sy, &Spectrum::from_probvec(&c))
                .map(|r| r.holds())
                .unwrap_or(false);
            (trial, c, ok)
        })
        .find_first(|(_, _, ok)| *ok);

    let Some((trial, c, _)) = hit else {
        return Ok(None);
    };
    let (report, transcript) = catalyzed_traced(&sx, &sy, &Spectrum::from_probvec(&c))?;
    Ok(Some(CatalystCert {
        dim_bound_ok: c.dim() == dim_c,
        catalyst: c,
        source: CatalystSource::Search {
            seed,
            dim: dim_c,
            trial,
        },
        verified: report.holds(),
        transcript,
    }))
}

/// For each m in `1..=m_max`, whether `x ⊗ c^{⊗m} ≺ y ⊗ c^{⊗m}`.
pub fn multicopy_catalyst_scan<S: Scalar>(
    x: &ProbVec<S>,
    y: &ProbVec<S>,
    c: &ProbVec<S>,
    m_max: u32,
) -> Result<BTreeMap<u32, bool>> {
    check_dims(x, y)?;
    let sx = Spectrum::from_probvec(x);
    let sy = Spectrum::from_probvec(y);
    (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let sc = Spectrum::tensor_power(c, m)?;
            Ok((m, catalyzed(&sx, &sy, &sc)?.holds()))
        })
        .collect()
}
