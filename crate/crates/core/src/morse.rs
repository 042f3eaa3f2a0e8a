//! Morse chain complexes over the rationals.
//!
//! A [`MorseComplex`] holds critical points with their Morse indices and a
//! sparse differential. An entry `{from: q, to: p, coefficient: c}` means
//! `∂q` contains `c·p`. Construction validates the index drop and `∂∘∂ = 0`,
//! so every method on a constructed complex is infallible.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graded_algebra::GradedDims;
use crate::linalg::{self, Matrix};
use crate::rational::{serde_rational, Degree, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorseError {
  #[error("real dimension {0} must be even and positive")]
  InvalidDimension(u32),
  #[error("duplicate critical point id {0:?}")]
  DuplicateId(String),
  #[error("differential references unknown critical point {0:?}")]
  UnknownPoint(String),
  #[error("critical point {id:?} has index {index} above the real dimension {dimension}")]
  IndexOutOfRange { id: String, index: u32, dimension: u32 },
  #[error("differential entry {from:?} -> {to:?} goes from index {from_index} to {to_index}; it must drop by 1")]
  MalformedDifferential { from: String, to: String, from_index: u32, to_index: u32 },
  #[error("differential squares to a nonzero map from degree {degree} to {}", degree - 2)]
  NotAComplex { degree: u32 },
  #[error("ambient dimension {ambient} is smaller than the complex dimension {dimension}")]
  AmbientTooSmall { ambient: u32, dimension: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CritPoint {
  pub id:    String,
  pub index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffEntry {
  pub from:        String,
  pub to:          String,
  #[serde(with = "serde_rational")]
  pub coefficient: Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMorseComplex {
  pub real_dimension: u32,
  pub points:         Vec<CritPoint>,
  #[serde(default)]
  pub differential:   Vec<DiffEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMorseComplex", into = "RawMorseComplex")]
pub struct MorseComplex {
  real_dimension: u32,
  points:         Vec<CritPoint>,
  differential:   Vec<DiffEntry>,
  position:       HashMap<String, usize>,
}

impl TryFrom<RawMorseComplex> for MorseComplex {
  type Error = MorseError;

  fn try_from(raw: RawMorseComplex) -> Result<Self, MorseError> {
    MorseComplex::new(raw.real_dimension, raw.points, raw.differential)
  }
}

impl From<MorseComplex> for RawMorseComplex {
  fn from(c: MorseComplex) -> Self {
    RawMorseComplex { real_dimension: c.real_dimension, points: c.points, differential: c.differential }
  }
}

impl MorseComplex {
  pub fn new(
    real_dimension: u32,
    points: Vec<CritPoint>,
    differential: Vec<DiffEntry>,
  ) -> Result<Self, MorseError> {
    if real_dimension == 0 || !real_dimension.is_multiple_of(2) {
      return Err(MorseError::InvalidDimension(real_dimension));
    }
    let mut position = HashMap::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
      if p.index > real_dimension {
        return Err(MorseError::IndexOutOfRange { id: p.id.clone(), index: p.index, dimension: real_dimension });
      }
      if position.insert(p.id.clone(), i).is_some() {
        return Err(MorseError::DuplicateId(p.id.clone()));
      }
    }
    for e in &differential {
      let from = position.get(&e.from).ok_or_else(|| MorseError::UnknownPoint(e.from.clone()))?;
      let to = position.get(&e.to).ok_or_else(|| MorseError::UnknownPoint(e.to.clone()))?;
      let (fi, ti) = (points[*from].index, points[*to].index);
      if fi != ti + 1 {
        return Err(MorseError::MalformedDifferential {
          from:       e.from.clone(),
          to:         e.to.clone(),
          from_index: fi,
          to_index:   ti,
        });
      }
    }
    let complex = Self { real_dimension, points, differential, position };
    for k in 2..=real_dimension {
      let dd = linalg::mul(&complex.boundary_matrix(k - 1), &complex.boundary_matrix(k));
      if !linalg::is_zero(&dd) {
        return Err(MorseError::NotAComplex { degree: k });
      }
    }
    Ok(complex)
  }

  pub fn real_dimension(&self) -> u32 { self.real_dimension }

  pub fn points(&self) -> &[CritPoint] { &self.points }

  pub fn differential(&self) -> &[DiffEntry] { &self.differential }

  pub fn point(&self, id: &str) -> Option<&CritPoint> { self.position.get(id).map(|&i| &self.points[i]) }

  pub fn max_index(&self) -> Option<u32> { self.points.iter().map(|p| p.index).max() }

  /// Ids of index-`k` points, in input order. This order is the basis order
  /// used by [`Self::boundary_matrix`].
  pub fn basis(&self, k: u32) -> Vec<&str> {
    self.points.iter().filter(|p| p.index == k).map(|p| p.id.as_str()).collect()
  }

  /// Number of critical points per index.
  pub fn chain_ranks(&self) -> BTreeMap<u32, u64> {
    let mut out = BTreeMap::new();
    for p in &self.points {
      *out.entry(p.index).or_insert(0) += 1;
    }
    out
  }

  /// Matrix of `∂_k : C_k → C_{k-1}`; rows are index-(k−1) points, columns
  /// index-k points. Repeated entries are summed.
  pub fn boundary_matrix(&self, k: u32) -> Matrix {
    if k == 0 {
      return linalg::zeros(0, self.basis(0).len());
    }
    let rows: HashMap<&str, usize> = self.basis(k - 1).into_iter().enumerate().map(|(i, id)| (id, i)).collect();
    let cols: HashMap<&str, usize> = self.basis(k).into_iter().enumerate().map(|(i, id)| (id, i)).collect();
    let mut m = linalg::zeros(rows.len(), cols.len());
    for e in &self.differential {
      if let (Some(&r), Some(&c)) = (rows.get(e.to.as_str()), cols.get(e.from.as_str())) {
        m[r][c] += &e.coefficient;
      }
    }
    m
  }

  pub fn boundary_rank(&self, k: u32) -> usize {
    if k == 0 || k > self.real_dimension {
      return 0;
    }
    linalg::rank(&self.boundary_matrix(k))
  }

  pub fn euler_characteristic(&self) -> i64 {
    self.points.iter().map(|p| if p.index % 2 == 0 { 1 } else { -1 }).sum()
  }
}

/// Betti ranks over the rationals: `b_k = #C_k − rank ∂_k − rank ∂_{k+1}`.
pub fn homology(c: &MorseComplex) -> GradedDims {
  let ranks: Vec<usize> = (0..=c.real_dimension + 1).map(|k| c.boundary_rank(k)).collect();
  GradedDims::from_pairs(c.chain_ranks().into_iter().map(|(k, count)| {
    let k_us = k as usize;
    let b = count - ranks[k_us] as u64 - ranks[k_us + 1] as u64;
    (Degree::from_integer(k as i64), b)
  }))
}

/// Ranks of `H_*(M, ∂M)` by Poincaré–Lefschetz duality: a rank in degree `k`
/// moves to degree `ambient_real_dim − k`.
pub fn relative_homology_dual(c: &MorseComplex, ambient_real_dim: u32) -> Result<GradedDims, MorseError> {
  if ambient_real_dim < c.real_dimension {
    return Err(MorseError::AmbientTooSmall { ambient: ambient_real_dim, dimension: c.real_dimension });
  }
  let top = Degree::from_integer(ambient_real_dim as i64);
  Ok(GradedDims::from_pairs(homology(c).iter().map(|(k, r)| (top - k, *r))))
}
