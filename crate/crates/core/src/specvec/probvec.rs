use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, ScalarBackend};

use super::Spectrum;

/// A finite probability vector (Schmidt coefficients), kept sorted
/// nonincreasing.
///
/// Zero entries are retained: appending zeros changes the dimension and with
/// it the answers of several classification procedures. Use [`pad_to`] when a
/// larger dimension is wanted.
///
/// [`pad_to`]: ProbVec::pad_to
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVec<S = Rational> {
    entries: Vec<S>,
    backend: ScalarBackend,
}

impl<S: Scalar> ProbVec<S> {
    /// Build a vector with the scalar type's native backend.
    pub fn new(raw: Vec<S>, normalize: bool) -> Result<Self> {
        Self::with_backend(raw, normalize, S::native_backend())
    }

    /// Build a vector with explicit comparison semantics. Exact scalars
    /// always use the exact backend.
    pub fn with_backend(raw: Vec<S>, normalize: bool, backend: ScalarBackend) -> Result<Self> {
        let backend = if S::EXACT { ScalarBackend::Exact } else { backend };
        if raw.is_empty() {
            return Err(Error::Empty);
        }
        for (index, v) in raw.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Parse {
                    literal: v.to_string(),
                    reason: "not a finite number".into(),
                });
            }
            if *v < S::zero() {
                return Err(Error::NegativeEntry {
                    index,
                    value: v.to_string(),
                });
            }
        }
        let sum = raw.iter().fold(S::zero(), |acc, v| acc + v);
        if sum.is_zero() {
            return Err(Error::ZeroMass);
        }
        let mut entries = if normalize {
            raw.into_iter().map(|v| v / &sum).collect()
        } else {
            let n = raw.len() as f64;
            let balanced = match backend {
                ScalarBackend::Exact => sum.is_one(),
                ScalarBackend::Float { eps } => (sum.to_f64() - 1.0).abs() <= eps * n.max(1.0),
            };
            if !balanced {
                return Err(Error::NotNormalized {
                    sum: sum.to_string(),
                });
            }
            raw
        };
        sort_desc(&mut entries);
        Ok(ProbVec { entries, backend })
    }

    /// Parse a JSON vector literal: an array of decimal/fraction strings, or
    /// bare numbers for the float backend.
    pub fn from_json(text: &str, normalize: bool, backend: ScalarBackend) -> Result<Self> {
        let raw = parse_vector_literal::<S>(text)?;
        Self::with_backend(raw, normalize, backend)
    }

    /// Trusted constructor for results of internal operations that preserve
    /// mass (products, averages, transfers).
    pub(crate) fn from_parts(mut entries: Vec<S>, backend: ScalarBackend) -> Self {
        debug_assert!(!entries.is_empty());
        sort_desc(&mut entries);
        ProbVec { entries, backend }
    }

    /// The maximally mixed vector (1/n, ..., 1/n).
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        Self::new(vec![S::one(); n], true)
    }

    /// The one-dimensional vector (1), identity for the tensor product.
    pub fn unit() -> Self {
        ProbVec {
            entries: vec![S::one()],
            backend: S::native_backend(),
        }
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<S> {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn backend(&self) -> ScalarBackend {
        self.backend
    }

    /// Largest component.
    pub fn first(&self) -> &S {
        &self.entries[0]
    }

    /// Smallest component (possibly zero).
    pub fn last(&self) -> &S {
        &self.entries[self.entries.len() - 1]
    }

    /// Number of nonzero components.
    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn is_uniform(&self) -> bool {
        self.backend.eq(self.first(), self.last())
    }

    /// Sum of the `l` largest components; `l` is clamped to the dimension.
    pub fn prefix_mass(&self, l: usize) -> S {
        self.entries
            .iter()
            .take(l)
            .fold(S::zero(), |acc, v| acc + v)
    }

    /// All prefix sums e_1, ..., e_n.
    pub fn prefix_sums(&self) -> Vec<S> {
        let mut acc = S::zero();
        self.entries
            .iter()
            .map(|v| {
                acc += v;
                acc.clone()
            })
            .collect()
    }

    /// Tensor (Kronecker) product, re-sorted.
    pub fn tensor(&self, other: &ProbVec<S>) -> ProbVec<S> {
        let mut entries = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a.clone() * b);
            }
        }
        ProbVec::from_parts(entries, self.backend.join(other.backend))
    }

    /// Direct sum rescaled to unit mass (each block halved). The raw
    /// concatenation has mass 2; it is available unnormalized through
    /// [`Spectrum::direct_sum`].
    pub fn direct_sum(&self, other: &ProbVec<S>) -> ProbVec<S> {
        let two = S::from_u64(2);
        let entries = self
            .entries
            .iter()
            .chain(other.entries.iter())
            .map(|v| v.clone() / &two)
            .collect();
        ProbVec::from_parts(entries, self.backend.join(other.backend))
    }

    /// Fully materialized k-fold tensor power (n^k entries). Intended for
    /// small cases; large powers should stay in [`Spectrum`] form.
    pub fn tensor_power(&self, k: u32) -> ProbVec<S> {
        (0..k).fold(ProbVec::unit_like(self.backend), |acc, _| acc.tensor(self))
    }

    fn unit_like(backend: ScalarBackend) -> Self {
        ProbVec {
            entries: vec![S::one()],
            backend,
        }
    }

    /// Append zeros up to dimension `n` (no-op when already that large).
    pub fn pad_to(&self, n: usize) -> ProbVec<S> {
        let mut entries = self.entries.clone();
        if entries.len() < n {
            entries.resize(n, S::zero());
        }
        ProbVec {
            entries,
            backend: self.backend,
        }
    }

    /// Compressed view with equal entries merged. For display; the vector
    /// itself keeps its full length.
    pub fn reduce(&self) -> Spectrum<S> {
        Spectrum::from_probvec(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("vector literals always serialize")
    }
}

impl<S: Scalar> fmt::Display for ProbVec<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl<S: Scalar> Serialize for ProbVec<S> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        crate::scalar::wire::scalars::serialize(&self.entries, s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for ProbVec<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = crate::scalar::wire::scalars::deserialize(d)?;
        ProbVec::new(raw, false).map_err(serde::de::Error::custom)
    }
}

/// Parse a JSON array of literals into raw (unsorted, unvalidated) scalars.
pub fn parse_vector_literal<S: Scalar>(text: &str) -> Result<Vec<S>> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw = crate::scalar::wire::scalars::deserialize::<S, _>(&mut de).map_err(|e| Error::Parse {
        literal: text.chars().take(80).collect(),
        reason: e.to_string(),
    })?;
    de.end().map_err(|e| Error::Parse {
        literal: text.chars().take(80).collect(),
        reason: e.to_string(),
    })?;
    Ok(raw)
}

pub(crate) fn sort_desc<S: Scalar>(v: &mut [S]) {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
}
