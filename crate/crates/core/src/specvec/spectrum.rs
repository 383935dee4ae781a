use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{wire, Rational, Scalar, ScalarBackend};

use super::ProbVec;

/// Largest number of entries [`Spectrum::expand`] will materialize.
pub const MATERIALIZE_LIMIT: u64 = 1 << 24;

/// One run of equal components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Block<S: Scalar = Rational> {
    #[serde(with = "wire::scalar")]
    pub value: S,
    #[serde(with = "wire::count")]
    pub count: BigUint,
}

/// A sorted vector stored as (value, multiplicity) blocks.
///
/// Values are strictly decreasing and every count is positive. Counts and
/// the total length are arbitrary precision: a tensor power x^{⊗k} of a
/// 4-dimensional vector has 4^k components but only polynomially many
/// distinct values. No mass constraint is imposed, so unnormalized direct
/// sums are representable.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<S: Scalar = Rational> {
    blocks: Vec<Block<S>>,
    total: BigUint,
    backend: ScalarBackend,
}

impl<S: Scalar> Spectrum<S> {
    /// Build from arbitrary (value, count) pairs: sorts, merges equal values
    /// and drops empty blocks.
    pub fn from_pairs(pairs: Vec<(S, BigUint)>, backend: ScalarBackend) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
        let mut blocks: Vec<Block<S>> = Vec::with_capacity(pairs.len());
        let mut total = BigUint::zero();
        for (value, count) in pairs {
            total += &count;
            match blocks.last_mut() {
                Some(last) if last.value == value => last.count += count,
                _ => blocks.push(Block { value, count }),
            }
        }
        Spectrum {
            blocks,
            total,
            backend,
        }
    }

    pub fn from_probvec(x: &ProbVec<S>) -> Self {
        let pairs = x
            .entries()
            .iter()
            .map(|v| (v.clone(), BigUint::one()))
            .collect();
        Spectrum::from_pairs(pairs, x.backend())
    }

    /// The one-component spectrum (1), neutral for [`tensor`](Self::tensor).
    pub fn unit(backend: ScalarBackend) -> Self {
        Spectrum {
            blocks: vec![Block {
                value: S::one(),
                count: BigUint::one(),
            }],
            total: BigUint::one(),
            backend,
        }
    }

    /// Sorted spectrum of the k-fold tensor power of `x`.
    ///
    /// Enumerates exponent vectors (a_1, ..., a_d) with Σ a_j = k over the d
    /// distinct values v_j of `x` (multiplicities m_j). Each contributes the
    /// value Π v_j^{a_j} with multiplicity k!/(Π a_j!) · Π m_j^{a_j}. At most
    /// C(d-1+k, d-1) blocks are produced before merging.
    pub fn tensor_power(x: &ProbVec<S>, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroCopies);
        }
        Ok(Self::power_unchecked(x, k))
    }

    pub(crate) fn power_unchecked(x: &ProbVec<S>, k: u32) -> Self {
        let base = Spectrum::from_probvec(x);
        if k == 0 {
            return Spectrum::unit(x.backend());
        }
        let d = base.blocks.len();
        let ku = k as usize;

        let mut factorial = vec![BigUint::one(); ku + 1];
        for i in 1..=ku {
            factorial[i] = &factorial[i - 1] * BigUint::from(i);
        }
        // value_pow[j][a] = v_j^a, mult_pow[j][a] = m_j^a
        let value_pow: Vec<Vec<S>> = base
            .blocks
            .iter()
            .map(|b| {
                let mut row = Vec::with_capacity(ku + 1);
                row.push(S::one());
                for a in 1..=ku {
                    let next = row[a - 1].clone() * &b.value;
                    row.push(next);
                }
                row
            })
            .collect();
        let mult_pow: Vec<Vec<BigUint>> = base
            .blocks
            .iter()
            .map(|b| {
                let mut row = Vec::with_capacity(ku + 1);
                row.push(BigUint::one());
                for a in 1..=ku {
                    let next = &row[a - 1] * &b.count;
                    row.push(next);
                }
                row
            })
            .collect();

        let mut pairs = Vec::new();
        let mut exps = vec![0usize; d];
        enumerate_compositions(ku, 0, &mut exps, &mut |exps| {
            let mut value = S::one();
            let mut count = factorial[ku].clone();
            let mut denom = BigUint::one();
            for (j, &a) in exps.iter().enumerate() {
                value = value * &value_pow[j][a];
                count *= &mult_pow[j][a];
                denom *= &factorial[a];
            }
            pairs.push((value, count / denom));
        });
        Spectrum::from_pairs(pairs, x.backend())
    }

    /// Spectrum of the tensor product of the two underlying vectors.
    pub fn tensor(&self, other: &Spectrum<S>) -> Spectrum<S> {
        let mut pairs = Vec::with_capacity(self.blocks.len() * other.blocks.len());
        for a in &self.blocks {
            for b in &other.blocks {
                pairs.push((a.value.clone() * &b.value, &a.count * &b.count));
            }
        }
        Spectrum::from_pairs(pairs, self.backend.join(other.backend))
    }

    /// Spectrum of the (unnormalized) concatenation.
    pub fn direct_sum(&self, other: &Spectrum<S>) -> Spectrum<S> {
        let pairs = self
            .blocks
            .iter()
            .chain(other.blocks.iter())
            .map(|b| (b.value.clone(), b.count.clone()))
            .collect();
        Spectrum::from_pairs(pairs, self.backend.join(other.backend))
    }

    /// Multiply every component by a positive factor.
    pub fn scale(&self, factor: &S) -> Spectrum<S> {
        let pairs = self
            .blocks
            .iter()
            .map(|b| (b.value.clone() * factor, b.count.clone()))
            .collect();
        Spectrum::from_pairs(pairs, self.backend)
    }

    pub fn blocks(&self) -> &[Block<S>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Number of components of the underlying vector.
    pub fn total_count(&self) -> &BigUint {
        &self.total
    }

    pub fn backend(&self) -> ScalarBackend {
        self.backend
    }

    /// Σ value · count.
    pub fn total_mass(&self) -> S {
        self.blocks.iter().fold(S::zero(), |acc, b| {
            acc + &(b.value.clone() * &S::from_count(&b.count))
        })
    }

    /// Sum of the `l` largest components, evaluated blockwise.
    pub fn prefix_mass(&self, l: &BigUint) -> Result<S> {
        if l > &self.total {
            return Err(Error::PositionOutOfRange {
                position: l.to_string(),
                total: self.total.to_string(),
            });
        }
        let mut remaining = l.clone();
        let mut acc = S::zero();
        for b in &self.blocks {
            if remaining.is_zero() {
                break;
            }
            let take = if remaining < b.count {
                remaining.clone()
            } else {
                b.count.clone()
            };
            acc += &(b.value.clone() * &S::from_count(&take));
            remaining -= take;
        }
        Ok(acc)
    }

    /// Cumulative counts at the end of each block (the last equals the total).
    pub fn breakpoints(&self) -> Vec<BigUint> {
        let mut acc = BigUint::zero();
        self.blocks
            .iter()
            .map(|b| {
                acc += &b.count;
                acc.clone()
            })
            .collect()
    }

    /// Flat sorted list of all components.
    pub fn expand(&self) -> Result<Vec<S>> {
        let n = self
            .total
            .to_u64()
            .filter(|&n| n <= MATERIALIZE_LIMIT)
            .ok_or_else(|| Error::TooLarge(self.total.to_string()))?;
        let mut out = Vec::with_capacity(n as usize);
        for b in &self.blocks {
            let c = b.count.to_usize().expect("bounded by the total");
            out.extend(std::iter::repeat_n(b.value.clone(), c));
        }
        Ok(out)
    }

    /// Materialize as a probability vector; fails unless the mass is one
    /// under the spectrum's backend.
    pub fn to_probvec(&self) -> Result<ProbVec<S>> {
        let entries = self.expand()?;
        ProbVec::with_backend(entries, false, self.backend)
    }
}

fn enumerate_compositions(
    remaining: usize,
    index: usize,
    exps: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    let last = exps.len() - 1;
    if index == last {
        exps[last] = remaining;
        visit(exps);
        return;
    }
    for a in (0..=remaining).rev() {
        exps[index] = a;
        enumerate_compositions(remaining - a, index + 1, exps, visit);
    }
}

#[derive(Serialize, Deserialize)]
struct SpectrumWire {
    blocks: Vec<(String, String)>,
    total: String,
}

impl<S: Scalar> Serialize for Spectrum<S> {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        SpectrumWire {
            blocks: self
                .blocks
                .iter()
                .map(|b| (b.value.to_string(), b.count.to_string()))
                .collect(),
            total: self.total.to_string(),
        }
        .serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Spectrum<S> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = SpectrumWire::deserialize(d)?;
        let mut pairs = Vec::with_capacity(wire.blocks.len());
        for (v, c) in &wire.blocks {
            let value = S::parse_literal(v).map_err(D::Error::custom)?;
            let count: BigUint = c.parse().map_err(D::Error::custom)?;
            pairs.push((value, count));
        }
        let spectrum = Spectrum::from_pairs(pairs, S::native_backend());
        let total: BigUint = wire.total.parse().map_err(D::Error::custom)?;
        if total != spectrum.total {
            return Err(D::Error::custom("total does not match block counts"));
        }
        Ok(spectrum)
    }
}
