//! Renyi entropies and the entropy-ordering filter.
//!
//! `S^α(x) = sgn(α)/(1-α) · log2 Σ x_i^α`, summing over the `d_x` nonzero
//! components, with the limits `S^0 = log2 d_x`, `S^1 = -Σ x_i log2 x_i`,
//! `S^{+∞} = -log2 x_1` and `S^{-∞} = log2 x_{d_x}`.
//!
//! Every vector reachable from `x` with a catalyst satisfies
//! `S^α(x) >= S^α(y)` (for α >= 0 when `d_x > d_y`, for all α when
//! `d_x = d_y`). [`r_filter`] checks this on a finite grid and can therefore
//! only refute reachability.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::specvec::ProbVec;

/// Absolute tolerance for entropy differences evaluated in floating point.
pub const RENYI_TOL: f64 = 1e-9;

/// Default finite grid; the limits and α = 1 are always added.
pub const DEFAULT_GRID: [f64; 15] = [
    -64.0, -32.0, -16.0, -8.0, -4.0, -2.0, -0.5, 0.0, 0.5, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0,
];

/// An extended-real order parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Finite(f64),
    PosInf,
    NegInf,
}

impl Alpha {
    pub fn default_grid() -> Vec<Alpha> {
        DEFAULT_GRID.iter().map(|&a| Alpha::Finite(a)).collect()
    }

    fn is_negative(self) -> bool {
        match self {
            Alpha::Finite(a) => a < 0.0,
            Alpha::PosInf => false,
            Alpha::NegInf => true,
        }
    }

    /// The exponent as a nonzero integer other than one, if it is one.
    fn integral_power(self) -> Option<i32> {
        match self {
            Alpha::Finite(a) if a.fract() == 0.0 && a.abs() <= i32::MAX as f64 && a != 0.0 && a != 1.0 => {
                Some(a as i32)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(a) => write!(f, "{a}"),
            Alpha::PosInf => write!(f, "+inf"),
            Alpha::NegInf => write!(f, "-inf"),
        }
    }
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(Alpha::PosInf),
            "-inf" | "-infinity" => Ok(Alpha::NegInf),
            _ => match t.parse::<f64>() {
                Ok(a) if a.is_finite() => Ok(Alpha::Finite(a)),
                _ => Err(Error::Parse {
                    literal: t.to_string(),
                    reason: "expected a number, +inf or -inf".into(),
                }),
            },
        }
    }
}

/// Parse a comma-separated list of order parameters.
pub fn parse_alpha_grid(csv: &str) -> Result<Vec<Alpha>> {
    csv.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

impl Serialize for Alpha {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        match self {
            Alpha::Finite(a) => s.serialize_f64(*a),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(a) => Ok(Alpha::Finite(a)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn nonzero<S: Scalar>(x: &ProbVec<S>) -> impl Iterator<Item = &S> {
    x.entries().iter().filter(|v| !v.is_zero())
}

fn smallest_nonzero<S: Scalar>(x: &ProbVec<S>) -> &S {
    nonzero(x).last().expect("probability vectors have positive mass")
}

/// `log2 Σ 2^{a_i}` without overflow.
fn log2_sum_exp2(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + terms.iter().map(|t| (t - m).exp2()).sum::<f64>().log2()
}

/// Exact `Σ x_i^p` over nonzero components.
fn power_sum<S: Scalar>(x: &ProbVec<S>, p: i32) -> S {
    nonzero(x).fold(S::zero(), |acc, v| acc + &v.powi(p))
}

/// Renyi entropy of order `alpha` in bits.
pub fn renyi_entropy<S: Scalar>(x: &ProbVec<S>, alpha: Alpha) -> f64 {
    let a = match alpha {
        Alpha::PosInf => return -x.first().log2(),
        Alpha::NegInf => return smallest_nonzero(x).log2(),
        Alpha::Finite(a) => a,
    };
    if a == 0.0 {
        return (x.nonzero_count() as f64).log2();
    }
    if a == 1.0 {
        return -nonzero(x).map(|v| v.to_f64() * v.log2()).sum::<f64>();
    }
    let log_sum = match alpha.integral_power() {
        Some(p) if S::EXACT => power_sum(x, p).log2(),
        _ => log2_sum_exp2(nonzero(x).map(|v| a * v.log2())),
    };
    a.signum() / (1.0 - a) * log_sum
}

/// Renyi entropies of one vector with the special orders precomputed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RenyiProfile<S: Scalar = Rational> {
    pub source: ProbVec<S>,
    pub d_x: usize,
    pub order_zero: f64,
    pub shannon: f64,
    pub pos_inf: f64,
    pub neg_inf: f64,
}

impl<S: Scalar> RenyiProfile<S> {
    pub fn new(x: &ProbVec<S>) -> Self {
        RenyiProfile {
            source: x.clone(),
            d_x: x.nonzero_count(),
            order_zero: renyi_entropy(x, Alpha::Finite(0.0)),
            shannon: renyi_entropy(x, Alpha::Finite(1.0)),
            pos_inf: renyi_entropy(x, Alpha::PosInf),
            neg_inf: renyi_entropy(x, Alpha::NegInf),
        }
    }

    pub fn eval(&self, alpha: Alpha) -> f64 {
        match alpha {
            Alpha::PosInf => self.pos_inf,
            Alpha::NegInf => self.neg_inf,
            Alpha::Finite(0.0) => self.order_zero,
            Alpha::Finite(1.0) => self.shannon,
            _ => renyi_entropy(&self.source, alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterStatus {
    Violated,
    /// No tested order refutes the ordering; this is not a membership proof.
    NoViolationFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMode {
    /// Nonzero counts differ; only α >= 0 is tested.
    DimsDiffer,
    /// Equal nonzero counts; every α is tested.
    DimsEqual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RFilterVerdict {
    pub status: FilterStatus,
    pub violating_alpha: Option<Alpha>,
    pub mode: FilterMode,
    /// Orders evaluated, in evaluation order.
    pub grid_used: Vec<Alpha>,
    /// Whether any order was decided in floating point rather than exactly.
    pub float_evaluated: bool,
}

impl RFilterVerdict {
    pub fn violated(&self) -> bool {
        self.status == FilterStatus::Violated
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdicts always serialize")
    }
}

/// Outcome of comparing `S^α(x)` with `S^α(y)` at one order.
struct Comparison {
    violated: bool,
    float: bool,
}

fn compare_at<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>, alpha: Alpha, tol: f64) -> Comparison {
    let b = x.backend().join(y.backend());
    let exact = |violated| Comparison {
        violated,
        float: false,
    };
    match alpha {
        Alpha::PosInf => return exact(b.gt(x.first(), y.first())),
        Alpha::NegInf => return exact(b.lt(smallest_nonzero(x), smallest_nonzero(y))),
        Alpha::Finite(0.0) => return exact(x.nonzero_count() < y.nonzero_count()),
        _ => {}
    }
    if let (true, Some(p)) = (S::EXACT, alpha.integral_power()) {
        let (px, py) = (power_sum(x, p), power_sum(y, p));
        // p > 1 or p < 0: the entropy decreases as the power sum grows.
        return exact(px > py);
    }
    let diff = renyi_entropy(x, alpha) - renyi_entropy(y, alpha);
    Comparison {
        violated: diff < -tol,
        float: true,
    }
}

/// Orders tested by [`r_filter`]: `+∞`, `-∞` (equal counts only), 0, 1,
/// then the grid, skipping negatives when counts differ and duplicates.
pub fn filter_orders(grid: &[Alpha], mode: FilterMode) -> Vec<Alpha> {
    let mut orders = vec![Alpha::PosInf];
    if mode == FilterMode::DimsEqual {
        orders.push(Alpha::NegInf);
    }
    orders.push(Alpha::Finite(0.0));
    orders.push(Alpha::Finite(1.0));
    for &a in grid {
        if mode == FilterMode::DimsDiffer && a.is_negative() {
            continue;
        }
        if !orders.contains(&a) {
            orders.push(a);
        }
    }
    orders
}

/// Look for an order α with `S^α(x) < S^α(y)`.
///
/// When `x` has fewer nonzero components than `y` the ordering fails at
/// α = 0 at the latest. Integer orders are decided exactly
/// on the exact backend; the rest in floating point with tolerance
/// [`RENYI_TOL`] (or the backend's eps if larger).
pub fn r_filter<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>, grid: &[Alpha]) -> Result<RFilterVerdict> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    if grid.is_empty() {
        return Err(Error::Precondition("order grid is empty".into()));
    }
    let (dx, dy) = (x.nonzero_count(), y.nonzero_count());
    let mode = if dx == dy {
        FilterMode::DimsEqual
    } else {
        FilterMode::DimsDiffer
    };
    let tol = RENYI_TOL.max(x.backend().join(y.backend()).eps());
    let orders = filter_orders(grid, mode);
    let results: Vec<Comparison> = orders
        .par_iter()
        .map(|&a| compare_at(x, y, a, tol))
        .collect();
    let float_evaluated = results.iter().any(|c| c.float);
    let violating_alpha = results
        .iter()
        .position(|c| c.violated)
        .map(|i| orders[i]);
    Ok(RFilterVerdict {
        status: if violating_alpha.is_some() {
            FilterStatus::Violated
        } else {
            FilterStatus::NoViolationFound
        },
        violating_alpha,
        mode,
        grid_used: orders,
        float_evaluated,
    })
}

/// Structural consequences of the entropy ordering for one pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RPropertiesReport {
    pub x1_le_y1: bool,
    pub xn_ge_yn: bool,
    /// `r_filter(x, y)` found no violation on the default grid.
    pub forward_clear: bool,
    /// `r_filter(y, x)` found no violation on the default grid.
    pub backward_clear: bool,
    pub identical: bool,
    /// Power sums agree exactly for α = 1..n (decides `x = y` as multisets).
    pub power_sums_match: bool,
    /// A clear forward pass implies both endpoint conditions.
    pub endpoints_consistent: bool,
    /// Both directions pass yet the vectors differ: the grid was too coarse.
    pub needs_investigation: bool,
}

pub fn r_properties_check<S: Scalar>(x: &ProbVec<S>, y: &ProbVec<S>) -> Result<RPropertiesReport> {
    let grid = Alpha::default_grid();
    let forward = r_filter(x, y, &grid)?;
    let backward = r_filter(y, x, &grid)?;
    let b = x.backend().join(y.backend());
    let x1_le_y1 = !b.gt(x.first(), y.first());
    let xn_ge_yn = !b.lt(x.last(), y.last());
    let identical = x
        .entries()
        .iter()
        .zip(y.entries())
        .all(|(a, c)| b.eq(a, c));
    let power_sums_match =
        (1..=x.dim() as i32).all(|p| b.eq(&power_sum(x, p), &power_sum(y, p)));
    let forward_clear = !forward.violated();
    let backward_clear = !backward.violated();
    Ok(RPropertiesReport {
        x1_le_y1,
        xn_ge_yn,
        forward_clear,
        backward_clear,
        identical,
        power_sums_match,
        endpoints_consistent: !forward_clear || (x1_le_y1 && xn_ge_yn),
        needs_investigation: forward_clear && backward_clear && !identical,
    })
}
