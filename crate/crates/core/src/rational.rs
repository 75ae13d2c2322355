//! Exact rationals and their `"p/q"` string encoding.
//!
//! Every rational that crosses a serialization boundary is written as a
//! `"p/q"` string; integers are accepted on input without a denominator.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// The exact rational type used throughout the crate.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational `{input}`: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

/// `n / d` as an exact rational. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Returns the value as an `i64` when it is an integer that fits.
pub fn to_i64(q: &Rat) -> Option<i64> {
    if q.is_integer() {
        q.to_integer().to_i64()
    } else {
        None
    }
}

pub fn parse_rational(s: &str) -> Result<Rat, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: s.to_string(),
        reason,
    };
    let trimmed = s.trim();
    if trimmed.is_empty() {
        return Err(err("empty string"));
    }
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("numerator is not an integer"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| err("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rat::new(num, den))
}

/// Canonical `"p/q"` form; the denominator is always written, even when it is 1.
pub fn format_rational(q: &Rat) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Display adaptor that prints integers bare and other values as `p/q`.
pub struct Compact<'a>(pub &'a Rat);

impl fmt::Display for Compact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// `#[serde(with = "serde_rat")]` support for a bare `Rat` field.
pub mod serde_rat {
    use super::{format_rational, parse_rational, Rat};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let raw = RatInput::deserialize(d)?;
        match raw {
            RatInput::Text(s) => parse_rational(&s).map_err(D::Error::custom),
            RatInput::Int(n) => Ok(super::int(n)),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum RatInput {
        Text(String),
        Int(i64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-5").unwrap(), int(-5));
        assert_eq!(parse_rational(" -5/1 ").unwrap(), int(-5));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_with_explicit_denominator() {
        assert_eq!(format_rational(&int(5)), "5/1");
        assert_eq!(format_rational(&rat(-2, 4)), "-1/2");
        assert_eq!(Compact(&int(5)).to_string(), "5");
        assert_eq!(Compact(&rat(3, 9)).to_string(), "1/3");
    }
}
