//! Exact rationals and their `"p/q"` text form.
//!
//! Two flavours are used: [`Rational`] (arbitrary precision) for chain-complex
//! coefficients, where elimination can blow up numerators, and [`Degree`]
//! (`i64` ratio) for gradings, which stay small.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serializer};
use thiserror::Error;

pub type Rational = BigRational;
pub type Degree = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {literal:?}: {reason}")]
pub struct ParseRationalError {
  pub literal: String,
  pub reason:  &'static str,
}

fn split_fraction(s: &str) -> Result<(&str, &str), ParseRationalError> {
  let err = |reason| ParseRationalError { literal: s.to_string(), reason };
  let s = s.trim();
  if s.is_empty() {
    return Err(err("empty string"));
  }
  match s.split_once('/') {
    Some((p, q)) => {
      if q.trim().is_empty() {
        return Err(err("missing denominator"));
      }
      Ok((p.trim(), q.trim()))
    },
    None => Ok((s, "1")),
  }
}

/// Parses `"p/q"`, `"-p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
  let err = |reason| ParseRationalError { literal: s.to_string(), reason };
  let (p, q) = split_fraction(s)?;
  let p = BigInt::from_str(p).map_err(|_| err("numerator is not an integer"))?;
  let q = BigInt::from_str(q).map_err(|_| err("denominator is not an integer"))?;
  if q.is_zero() {
    return Err(err("zero denominator"));
  }
  Ok(BigRational::new(p, q))
}

pub fn parse_degree(s: &str) -> Result<Degree, ParseRationalError> {
  let err = |reason| ParseRationalError { literal: s.to_string(), reason };
  let (p, q) = split_fraction(s)?;
  let p = i64::from_str(p).map_err(|_| err("numerator is not a 64-bit integer"))?;
  let q = i64::from_str(q).map_err(|_| err("denominator is not a 64-bit integer"))?;
  if q == 0 {
    return Err(err("zero denominator"));
  }
  Ok(Ratio::new(p, q))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_ratio<T>(r: &Ratio<T>) -> String
where T: Clone + num_integer::Integer + fmt::Display {
  if r.denom().is_one() {
    format!("{}", r.numer())
  } else {
    format!("{}/{}", r.numer(), r.denom())
  }
}

/// Factorial as an exact rational.
pub fn factorial(m: u64) -> Rational {
  let mut acc = BigInt::one();
  for i in 2..=m {
    acc *= i;
  }
  Rational::from_integer(acc)
}

/// Serde adapter: [`Rational`] as a `"p/q"` string.
pub mod serde_rational {
  use super::*;

  pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
  }

  pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse_rational(&s).map_err(serde::de::Error::custom)
  }
}

/// Serde adapter: [`Degree`] as a `"p/q"` string.
pub mod serde_degree {
  use super::*;

  pub fn serialize<S: Serializer>(r: &Degree, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
  }

  pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Degree, D::Error> {
    let s = String::deserialize(d)?;
    parse_degree(&s).map_err(serde::de::Error::custom)
  }
}

#[cfg(test)]
mod tests {
  use super::*;

  #[test]
  fn parses_fractions_and_integers() {
    assert_eq!(parse_rational("3/6").unwrap(), Rational::new(1.into(), 2.into()));
    assert_eq!(parse_rational("-4").unwrap(), Rational::from_integer((-4).into()));
    assert_eq!(parse_degree("10/4").unwrap(), Degree::new(5, 2));
  }

  #[test]
  fn rejects_bad_literals() {
    assert!(parse_rational("1/0").is_err());
    assert!(parse_rational("").is_err());
    assert!(parse_rational("a/2").is_err());
    assert!(parse_degree("1/").is_err());
  }

  #[test]
  fn canonical_format() {
    assert_eq!(format_ratio(&Degree::new(8, 2)), "4");
    assert_eq!(format_ratio(&Degree::new(-3, 6)), "-1/2");
  }

  #[test]
  fn factorials() {
    assert_eq!(factorial(0), Rational::one());
    assert_eq!(factorial(5), Rational::from_integer(120.into()));
  }
}
