use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// A real number extended with `+∞` and an explicit "undefined".
///
/// `Undefined` never compares with anything, including itself, through
/// [`ExtendedReal::compare`]; structural equality (`==`) is still available
/// for round-trip checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PositiveInfinity,
    Undefined,
}

impl ExtendedReal {
    /// Maps `+inf` to `PositiveInfinity` and NaN or `-inf` to `Undefined`.
    pub fn from_f64(value: f64) -> Self {
        if value.is_finite() {
            ExtendedReal::Finite(value)
        } else if value == f64::INFINITY {
            ExtendedReal::PositiveInfinity
        } else {
            ExtendedReal::Undefined
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedReal::PositiveInfinity)
    }

    pub fn is_undefined(&self) -> bool {
        matches!(self, ExtendedReal::Undefined)
    }

    /// Total order on defined values: every finite value is below `+∞`.
    pub fn compare(&self, other: &Self) -> Option<Ordering> {
        use ExtendedReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (Finite(_), PositiveInfinity) => Some(Ordering::Less),
            (PositiveInfinity, Finite(_)) => Some(Ordering::Greater),
            (PositiveInfinity, PositiveInfinity) => Some(Ordering::Equal),
            (Undefined, _) | (_, Undefined) => None,
        }
    }

    /// Renders finite values with `decimals` fixed decimals, `∞`, or `undefined`.
    pub fn format_fixed(&self, decimals: usize) -> String {
        match self {
            ExtendedReal::Finite(v) => format!("{v:.decimals$}"),
            ExtendedReal::PositiveInfinity => "∞".to_string(),
            ExtendedReal::Undefined => "undefined".to_string(),
        }
    }

    /// The value as written to machine-readable output: finite values
    /// rounded to six decimals.
    pub fn rounded(&self) -> Self {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite(round6(*v)),
            other => *other,
        }
    }
}

pub(crate) fn round6(v: f64) -> f64 {
    if v.abs() >= 1e15 {
        return v;
    }
    let r = (v * 1e6).round() / 1e6;
    // avoid emitting -0.0
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: Self) -> Self {
        use ExtendedReal::*;
        match (self, rhs) {
            (Undefined, _) | (_, Undefined) => Undefined,
            (PositiveInfinity, _) | (_, PositiveInfinity) => PositiveInfinity,
            (Finite(a), Finite(b)) => ExtendedReal::from_f64(a + b),
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(value: f64) -> Self {
        ExtendedReal::from_f64(value)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PositiveInfinity => f.write_str("inf"),
            ExtendedReal::Undefined => f.write_str("undefined"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => serializer.serialize_f64(round6(*v)),
            ExtendedReal::PositiveInfinity => serializer.serialize_str("inf"),
            ExtendedReal::Undefined => serializer.serialize_str("undefined"),
        }
    }
}

struct ExtendedRealVisitor;

impl Visitor<'_> for ExtendedRealVisitor {
    type Value = ExtendedReal;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(r#"a finite number, "inf", or "undefined""#)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtendedReal, E> {
        if v.is_finite() {
            Ok(ExtendedReal::Finite(v))
        } else {
            Err(E::custom("non-finite number"))
        }
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtendedReal, E> {
        Ok(ExtendedReal::Finite(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtendedReal, E> {
        Ok(ExtendedReal::Finite(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtendedReal, E> {
        match v {
            "inf" => Ok(ExtendedReal::PositiveInfinity),
            "undefined" => Ok(ExtendedReal::Undefined),
            other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(ExtendedRealVisitor)
    }
}
