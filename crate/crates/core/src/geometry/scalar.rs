//! Scalar arithmetic shared by every geometric routine.
//!
//! Two modes exist. [`Rational`] is exact arbitrary-precision arithmetic and is
//! the default for the square-bit, whose data is all rational. [`Float`] is a
//! binary float whose comparisons are made against a tolerance ε (1e-9 unless
//! reconfigured), used for polygons whose vertices involve cos(πi/k).
//!
//! Mixing modes is a type error: every routine is generic over one `S: Scalar`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Exact rational scalar, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Default comparison tolerance for [`Float`].
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

static FLOAT_TOLERANCE: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Arithmetic mode of a scalar type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" | "rational" => Ok(Mode::Exact),
            "float" | "f64" => Ok(Mode::Float),
            other => Err(Error::Parse(format!("unknown arithmetic mode `{other}`"))),
        }
    }
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;

    /// `num / den`; `den` must be non-zero.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Converts a binary float. Exact mode refuses, since a float is almost never
    /// the value the caller meant.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Sign of the value; `Equal` for anything within tolerance of zero.
    fn sign(&self) -> Ordering;

    fn abs(&self) -> Self;

    /// Total order used for canonical output ordering. Ignores tolerance.
    fn canonical_cmp(&self, other: &Self) -> Ordering;

    /// String form: `p/q` (or `p`) for rationals, shortest round-trip decimal for floats.
    fn to_scalar_string(&self) -> String {
        self.to_string()
    }

    fn parse_scalar(s: &str) -> Result<Self, Error>;

    fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    /// Tolerance-aware comparison.
    fn cmp_tol(&self, other: &Self) -> Ordering {
        (self.clone() - other).sign()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self.cmp_tol(other) == Ordering::Equal
    }

    fn le_tol(&self, other: &Self) -> bool {
        self.cmp_tol(other) != Ordering::Greater
    }

    fn ge_tol(&self, other: &Self) -> bool {
        self.cmp_tol(other) != Ordering::Less
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a.cmp_tol(&b) == Ordering::Less {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a.cmp_tol(&b) == Ordering::Greater {
            b
        } else {
            a
        }
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(_: f64) -> Option<Self> {
        None
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sign(&self) -> Ordering {
        if Zero::is_zero(self) {
            Ordering::Equal
        } else if Signed::is_positive(self) {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn cmp_tol(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn parse_scalar(s: &str) -> Result<Self, Error> {
        parse_rational(s)
    }
}

/// Parses `p`, `p/q`, or a finite decimal such as `0.55` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Binary float compared against a process-wide tolerance ε.
#[derive(Clone, Copy, Default)]
pub struct Float(pub f64);

impl Float {
    pub fn tolerance() -> f64 {
        f64::from_bits(FLOAT_TOLERANCE.load(AtomicOrdering::Relaxed))
    }

    /// Sets ε for all subsequent float comparisons. Intended to be called once at startup.
    pub fn set_tolerance(eps: f64) -> Result<(), Error> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {eps}")));
        }
        FLOAT_TOLERANCE.store(eps.to_bits(), AtomicOrdering::Relaxed);
        Ok(())
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Debug for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Display for f64 is the shortest string that round-trips.
        fmt::Display::fmt(&self.0, f)
    }
}

impl PartialEq for Float {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Float {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Hash for Float {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}

macro_rules! float_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl $tr for Float {
            type Output = Float;
            fn $m(self, rhs: Float) -> Float {
                Float(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a Float> for Float {
            type Output = Float;
            fn $m(self, rhs: &'a Float) -> Float {
                Float(self.0 $op rhs.0)
            }
        }
        impl<'a> $atr<&'a Float> for Float {
            fn $am(&mut self, rhs: &'a Float) {
                self.0 = self.0 $op rhs.0;
            }
        }
    };
}

float_binop!(Add, add, AddAssign, add_assign, +);
float_binop!(Sub, sub, SubAssign, sub_assign, -);
float_binop!(Mul, mul, MulAssign, mul_assign, *);
float_binop!(Div, div, DivAssign, div_assign, /);

impl Neg for Float {
    type Output = Float;
    fn neg(self) -> Float {
        Float(-self.0)
    }
}

impl Sum for Float {
    fn sum<I: Iterator<Item = Float>>(iter: I) -> Float {
        Float(iter.map(|f| f.0).sum())
    }
}

impl Scalar for Float {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        Float(0.0)
    }

    fn one() -> Self {
        Float(1.0)
    }

    fn from_i64(v: i64) -> Self {
        Float(v as f64)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Float(num as f64 / den as f64)
    }

    fn from_f64(v: f64) -> Option<Self> {
        Some(Float(v))
    }

    fn to_f64(&self) -> f64 {
        self.0
    }

    fn sign(&self) -> Ordering {
        let eps = Float::tolerance();
        if self.0 > eps {
            Ordering::Greater
        } else if self.0 < -eps {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn abs(&self) -> Self {
        Float(self.0.abs())
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }

    fn parse_scalar(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        if t.contains('/') {
            let r = parse_rational(t)?;
            return Ok(Float(Scalar::to_f64(&r)));
        }
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Float)
            .ok_or_else(|| Error::Parse(format!("invalid float `{s}`")))
    }
}

impl Serialize for Float {
    fn serialize<Se: Serializer>(&self, serializer: Se) -> Result<Se::Ok, Se::Error> {
        serializer.serialize_str(&self.to_scalar_string())
    }
}

impl<'de> Deserialize<'de> for Float {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = ScalarText::deserialize(deserializer)?;
        Float::parse_scalar(&s.0).map_err(serde::de::Error::custom)
    }
}

/// Accepts either a JSON string or a JSON number as scalar text.
struct ScalarText(String);

impl<'de> Deserialize<'de> for ScalarText {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Num(f64),
        }
        Ok(match Raw::deserialize(deserializer)? {
            Raw::Text(s) => ScalarText(s),
            Raw::Int(i) => ScalarText(i.to_string()),
            Raw::Num(f) => ScalarText(f.to_string()),
        })
    }
}

/// serde adapters that encode any [`Scalar`] as its string form.
pub mod scalar_serde {
    use super::*;

    pub fn serialize<S: Scalar, Se: Serializer>(v: &S, serializer: Se) -> Result<Se::Ok, Se::Error> {
        serializer.serialize_str(&v.to_scalar_string())
    }

    pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(deserializer: D) -> Result<S, D::Error> {
        let s = ScalarText::deserialize(deserializer)?;
        S::parse_scalar(&s.0).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Scalar, Se: Serializer>(v: &[S], serializer: Se) -> Result<Se::Ok, Se::Error> {
            let mut seq = serializer.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_scalar_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<S>, D::Error> {
            let raw = Vec::<ScalarText>::deserialize(deserializer)?;
            raw.into_iter()
                .map(|t| S::parse_scalar(&t.0).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}
