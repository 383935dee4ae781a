//! Number backends.
//!
//! Every algorithm in the crate is generic over [`Scalar`]. Two backends are
//! provided: [`Rational`] (arbitrary-precision rationals, no rounding anywhere)
//! and `f64` (fast, compared with an absolute tolerance). The
//! [`ScalarBackend`] tag travels with each vector and decides how two values
//! are compared.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Sub, SubAssign};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational number.
pub type Rational = BigRational;

/// Comparison semantics attached to vectors and spectra.
///
/// In exact mode two values are equal only when they are identical. In float
/// mode `|a - b| <= eps` counts as equality; verdicts obtained this way are
/// heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScalarBackend {
    Exact,
    Float { eps: f64 },
}

impl ScalarBackend {
    pub const DEFAULT_EPS: f64 = 1e-12;

    pub fn float(eps: f64) -> Result<Self> {
        if eps > 0.0 && eps.is_finite() {
            Ok(ScalarBackend::Float { eps })
        } else {
            Err(Error::InvalidTolerance(eps))
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ScalarBackend::Exact)
    }

    /// Tolerance used for equality; zero in exact mode.
    pub fn eps(&self) -> f64 {
        match self {
            ScalarBackend::Exact => 0.0,
            ScalarBackend::Float { eps } => *eps,
        }
    }

    /// Backend for an operation mixing two operands: the looser of the two.
    pub fn join(self, other: ScalarBackend) -> ScalarBackend {
        match (self, other) {
            (ScalarBackend::Exact, ScalarBackend::Exact) => ScalarBackend::Exact,
            (a, b) => ScalarBackend::Float {
                eps: a.eps().max(b.eps()),
            },
        }
    }

    /// Three-way comparison under this backend's equality semantics.
    pub fn compare<S: Scalar>(&self, a: &S, b: &S) -> Ordering {
        match self {
            ScalarBackend::Exact => a
                .partial_cmp(b)
                .expect("scalars are totally ordered after validation"),
            ScalarBackend::Float { eps } => {
                let diff = (a.clone() - b).to_f64();
                if diff.abs() <= *eps {
                    Ordering::Equal
                } else if diff > 0.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    pub fn eq<S: Scalar>(&self, a: &S, b: &S) -> bool {
        self.compare(a, b) == Ordering::Equal
    }

    pub fn lt<S: Scalar>(&self, a: &S, b: &S) -> bool {
        self.compare(a, b) == Ordering::Less
    }

    pub fn gt<S: Scalar>(&self, a: &S, b: &S) -> bool {
        self.compare(a, b) == Ordering::Greater
    }
}

/// Field operations and conversions needed by the decision procedures.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Send
    + Sync
    + 'static
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    /// True when arithmetic never rounds.
    const EXACT: bool;

    /// Backend used when a vector is built without an explicit one.
    fn native_backend() -> ScalarBackend;

    fn from_count(count: &BigUint) -> Self;

    fn from_u64(v: u64) -> Self {
        Self::from_count(&BigUint::from(v))
    }

    /// Integer power; negative exponents invert. Zero to the power zero is one.
    fn powi(&self, exp: i32) -> Self;

    fn to_f64(&self) -> f64;

    /// Base-2 logarithm evaluated in floating point without overflowing on
    /// huge numerators or denominators.
    fn log2(&self) -> f64;

    /// Parse a decimal (`"0.4"`, `"1e-3"`) or fraction (`"2/5"`) literal.
    fn parse_literal(literal: &str) -> Result<Self>;

    /// Accept a bare JSON number. Exact backends refuse, since binary floats
    /// are not the decimals the user wrote.
    fn from_json_number(v: f64) -> Result<Self>;

    fn is_finite(&self) -> bool;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn native_backend() -> ScalarBackend {
        ScalarBackend::Exact
    }

    fn from_count(count: &BigUint) -> Self {
        Rational::from_integer(BigInt::from_biguint(Sign::Plus, count.clone()))
    }

    fn powi(&self, exp: i32) -> Self {
        self.pow(exp)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            let sign = if self.is_negative() { -1.0 } else { 1.0 };
            sign * Scalar::log2(&self.abs()).exp2()
        })
    }

    fn log2(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        if self.is_negative() {
            return f64::NAN;
        }
        log2_magnitude(self.numer()) - log2_magnitude(self.denom())
    }

    fn parse_literal(literal: &str) -> Result<Self> {
        parse_rational(literal)
    }

    fn from_json_number(v: f64) -> Result<Self> {
        Err(Error::Parse {
            literal: v.to_string(),
            reason: "bare numbers are only accepted by the float backend; quote the value".into(),
        })
    }

    fn is_finite(&self) -> bool {
        true
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn native_backend() -> ScalarBackend {
        ScalarBackend::Float {
            eps: ScalarBackend::DEFAULT_EPS,
        }
    }

    fn from_count(count: &BigUint) -> Self {
        count.to_f64().unwrap_or(f64::INFINITY)
    }

    fn powi(&self, exp: i32) -> Self {
        f64::powi(*self, exp)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn log2(&self) -> f64 {
        f64::log2(*self)
    }

    fn parse_literal(literal: &str) -> Result<Self> {
        let r = parse_rational(literal)?;
        Ok(Scalar::to_f64(&r))
    }

    fn from_json_number(v: f64) -> Result<Self> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parse {
                literal: v.to_string(),
                reason: "not a finite number".into(),
            })
        }
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// log2 of |n| using the top 64 bits, so the result is accurate even when
/// `n` has thousands of digits.
fn log2_magnitude(n: &BigInt) -> f64 {
    let mag = n.magnitude();
    let bits = mag.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(64);
    let top = (mag >> shift).to_u64().expect("at most 64 bits remain");
    (top as f64).log2() + shift as f64
}

fn parse_rational(literal: &str) -> Result<Rational> {
    let text = literal.trim();
    let err = |reason: &str| Error::Parse {
        literal: literal.to_string(),
        reason: reason.to_string(),
    };
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_decimal(num.trim()).ok_or_else(|| err("bad numerator"))?;
        let den = parse_decimal(den.trim()).ok_or_else(|| err("bad denominator"))?;
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(num / den);
    }
    parse_decimal(text).ok_or_else(|| err("expected a decimal or fraction"))
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits: String = format!("{int_part}{frac_part}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let numer = BigInt::parse_bytes(digits.as_bytes(), 10)?;
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let mut value = Rational::from_integer(numer) * ten.pow(scale);
    if negative {
        value = -value;
    }
    Some(value)
}

/// Serde adapters: scalars and big counts travel as decimal strings.
pub(crate) mod wire {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Literal {
        Text(String),
        Number(f64),
    }

    fn literal_to_scalar<S: Scalar, E: serde::de::Error>(lit: Literal) -> std::result::Result<S, E> {
        match lit {
            Literal::Text(s) => S::parse_literal(&s),
            Literal::Number(v) => S::from_json_number(v),
        }
        .map_err(E::custom)
    }

    pub mod scalar {
        use super::*;

        pub fn serialize<S: Scalar, Z: Serializer>(v: &S, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
            s.serialize_str(&v.to_string())
        }

        pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(d: D) -> std::result::Result<S, D::Error> {
            literal_to_scalar(Literal::deserialize(d)?)
        }
    }

    pub mod scalars {
        use super::*;

        pub fn serialize<S: Scalar, Z: Serializer>(v: &[S], s: Z) -> std::result::Result<Z::Ok, Z::Error> {
            s.collect_seq(v.iter().map(|x| x.to_string()))
        }

        pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<S>, D::Error> {
            Vec::<Literal>::deserialize(d)?
                .into_iter()
                .map(literal_to_scalar)
                .collect()
        }
    }

    pub mod count {
        use super::*;

        pub fn serialize<Z: Serializer>(v: &BigUint, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
            s.serialize_str(&v.to_string())
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
            let text = String::deserialize(d)?;
            text.parse().map_err(D::Error::custom)
        }
    }

    pub mod counts {
        use super::*;

        pub fn serialize<Z: Serializer>(v: &[BigUint], s: Z) -> std::result::Result<Z::Ok, Z::Error> {
            s.collect_seq(v.iter().map(|x| x.to_string()))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigUint>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|t| t.parse().map_err(D::Error::custom))
                .collect()
        }
    }
}
