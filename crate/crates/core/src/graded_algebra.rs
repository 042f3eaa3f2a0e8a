//! Graded dimension vectors and truncated Poincaré series.
//!
//! [`GradedDims`] is the common carrier for every homology-like output in the
//! crate. Degrees are exact rationals; ranks are nonnegative integers and zero
//! ranks are never stored, so derived equality is the mathematical one.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{format_ratio, parse_degree, Degree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradedError {
  #[error("generator degree {degree} is not a positive integer")]
  InvalidGenerator { degree: String },
  #[error("series coefficient in degree {degree} overflows u64")]
  Overflow { degree: usize },
}

/// Finitely supported map `degree -> rank` in canonical form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GradedDims {
  entries: BTreeMap<Degree, u64>,
}

impl GradedDims {
  pub fn new() -> Self { Self::default() }

  /// Builds from `(degree, rank)` pairs; repeated degrees accumulate.
  pub fn from_pairs<I>(pairs: I) -> Self
  where I: IntoIterator<Item = (Degree, u64)> {
    let mut out = Self::new();
    for (d, r) in pairs {
      out.add(d, r);
    }
    out
  }

  /// Integer-degree convenience constructor.
  pub fn from_int_pairs<I>(pairs: I) -> Self
  where I: IntoIterator<Item = (i64, u64)> {
    Self::from_pairs(pairs.into_iter().map(|(d, r)| (Degree::from_integer(d), r)))
  }

  pub fn add(&mut self, degree: Degree, rank: u64) {
    if rank == 0 {
      return;
    }
    *self.entries.entry(degree).or_insert(0) += rank;
  }

  pub fn rank(&self, degree: &Degree) -> u64 { self.entries.get(degree).copied().unwrap_or(0) }

  pub fn rank_at(&self, degree: i64) -> u64 { self.rank(&Degree::from_integer(degree)) }

  pub fn iter(&self) -> impl Iterator<Item = (&Degree, &u64)> + '_ { self.entries.iter() }

  pub fn degrees(&self) -> impl Iterator<Item = &Degree> + '_ { self.entries.keys() }

  pub fn is_empty(&self) -> bool { self.entries.is_empty() }

  pub fn len(&self) -> usize { self.entries.len() }

  pub fn total_rank(&self) -> u64 { self.entries.values().sum() }

  pub fn min_degree(&self) -> Option<Degree> { self.entries.keys().next().copied() }

  pub fn max_degree(&self) -> Option<Degree> { self.entries.keys().next_back().copied() }

  /// Keeps only degrees `<= cutoff`.
  pub fn truncate(&self, cutoff: Degree) -> Self {
    Self { entries: self.entries.range(..=cutoff).map(|(d, r)| (*d, *r)).collect() }
  }

  pub fn is_integral(&self) -> bool { self.entries.keys().all(|d| d.is_integer()) }
}

/// Translates every degree by `s`.
pub fn shift(w: &GradedDims, s: Degree) -> GradedDims {
  GradedDims { entries: w.entries.iter().map(|(d, r)| (d + s, *r)).collect() }
}

/// Degree-wise sum of ranks.
pub fn direct_sum<'a, I>(ws: I) -> GradedDims
where I: IntoIterator<Item = &'a GradedDims> {
  let mut out = GradedDims::new();
  for w in ws {
    for (d, r) in w.iter() {
      out.add(*d, *r);
    }
  }
  out
}

/// Coefficients `c_0..=c_N` of a truncated series.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PoincareSeries {
  cutoff:       usize,
  coefficients: Vec<u64>,
}

impl PoincareSeries {
  /// The series `1` truncated at `cutoff`.
  pub fn unit(cutoff: usize) -> Self {
    let mut coefficients = vec![0; cutoff + 1];
    coefficients[0] = 1;
    Self { cutoff, coefficients }
  }

  pub fn cutoff(&self) -> usize { self.cutoff }

  pub fn coefficients(&self) -> &[u64] { &self.coefficients }

  pub fn coefficient(&self, degree: usize) -> Option<u64> { self.coefficients.get(degree).copied() }
}

/// Poincaré series of the free graded-commutative algebra on `generators`,
/// truncated at `cutoff`: polynomial on even generators, exterior on odd ones.
pub fn free_gca_series(generators: &GradedDims, cutoff: usize) -> Result<PoincareSeries, GradedError> {
  let mut series = PoincareSeries::unit(cutoff);
  for (degree, count) in generators.iter() {
    if !degree.is_integer() || !degree.is_positive() {
      return Err(GradedError::InvalidGenerator { degree: format_ratio(degree) });
    }
    let d = *degree.numer();
    if d as u64 > cutoff as u64 {
      continue;
    }
    let d = d as usize;
    let c = &mut series.coefficients;
    for _ in 0..*count {
      if d.is_multiple_of(2) {
        // times 1/(1 - t^d)
        for i in d..=cutoff {
          c[i] = c[i].checked_add(c[i - d]).ok_or(GradedError::Overflow { degree: i })?;
        }
      } else {
        // times (1 + t^d)
        for i in (d..=cutoff).rev() {
          c[i] = c[i].checked_add(c[i - d]).ok_or(GradedError::Overflow { degree: i })?;
        }
      }
    }
  }
  Ok(series)
}

impl fmt::Display for GradedDims {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{{")?;
    for (i, (d, r)) in self.entries.iter().enumerate() {
      if i > 0 {
        write!(f, ", ")?;
      }
      write!(f, "{}:{}", format_ratio(d), r)?;
    }
    write!(f, "}}")
  }
}

impl Serialize for GradedDims {
  fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(self.entries.len()))?;
    for (d, r) in &self.entries {
      map.serialize_entry(&format_ratio(d), r)?;
    }
    map.end()
  }
}

impl<'de> Deserialize<'de> for GradedDims {
  fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
    struct DimsVisitor;
    impl<'de> Visitor<'de> for DimsVisitor {
      type Value = GradedDims;

      fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a map from \"p/q\" degree strings to ranks")
      }

      fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<GradedDims, A::Error> {
        let mut out = GradedDims::new();
        while let Some((key, rank)) = access.next_entry::<String, u64>()? {
          let degree = parse_degree(&key).map_err(serde::de::Error::custom)?;
          out.add(degree, rank);
        }
        Ok(out)
      }
    }
    d.deserialize_map(DimsVisitor)
  }
}

impl Zero for GradedDims {
  fn zero() -> Self { Self::new() }

  fn is_zero(&self) -> bool { self.is_empty() }
}

impl std::ops::Add for GradedDims {
  type Output = GradedDims;

  fn add(self, rhs: Self) -> Self { direct_sum([&self, &rhs]) }
}
