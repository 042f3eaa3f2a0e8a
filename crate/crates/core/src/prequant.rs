//! Morse–Bott cylindrical contact homology of a prequantization bundle over a
//! closed Kähler manifold `Σ` of real dimension `2n − 2`.
//!
//! Orbits are the circle fibres, one copy of `Σ` per multiplicity `l`, and a
//! Morse index-`i` point on the level-`l` copy has degree `i − 2 + 2cl/k`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graded_algebra::GradedDims;
use crate::rational::Degree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrequantError {
  #[error("real dimension of Σ must be even and positive, got {0}")]
  InvalidDimension(u32),
  #[error("expected {expected} Betti numbers for real dimension {dim}, got {found}")]
  BettiLength { dim: u32, expected: usize, found: usize },
  #[error("Betti numbers violate Poincaré duality: b_{i} = {bi} but b_{j} = {bj}")]
  DualityViolation { i: usize, bi: u64, j: usize, bj: u64 },
  #[error("polarization degree k must be positive")]
  DivisionByZero,
  #[error("multiplicity must be at least 1, got {0}")]
  InvalidMultiplicity(i64),
  #[error("Morse index {i} outside 0..={max}")]
  IndexOutOfRange { i: i64, max: i64 },
  #[error("Chern pairing c = {0} is not positive; gradings are unbounded below")]
  NonPositiveChernPairing(i64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPrequantSpec {
  pub sigma_real_dim: u32,
  pub betti:          Vec<u64>,
  pub c:              i64,
  pub k:              i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPrequantSpec", into = "RawPrequantSpec")]
pub struct PrequantSpec {
  sigma_real_dim: u32,
  betti:          Vec<u64>,
  c:              i64,
  k:              i64,
}

impl TryFrom<RawPrequantSpec> for PrequantSpec {
  type Error = PrequantError;

  fn try_from(r: RawPrequantSpec) -> Result<Self, PrequantError> {
    PrequantSpec::new(r.sigma_real_dim, r.betti, r.c, r.k)
  }
}

impl From<PrequantSpec> for RawPrequantSpec {
  fn from(s: PrequantSpec) -> Self {
    RawPrequantSpec { sigma_real_dim: s.sigma_real_dim, betti: s.betti, c: s.c, k: s.k }
  }
}

impl PrequantSpec {
  pub fn new(sigma_real_dim: u32, betti: Vec<u64>, c: i64, k: i64) -> Result<Self, PrequantError> {
    if sigma_real_dim == 0 || !sigma_real_dim.is_multiple_of(2) {
      return Err(PrequantError::InvalidDimension(sigma_real_dim));
    }
    let expected = sigma_real_dim as usize + 1;
    if betti.len() != expected {
      return Err(PrequantError::BettiLength { dim: sigma_real_dim, expected, found: betti.len() });
    }
    let top = sigma_real_dim as usize;
    if let Some(i) = (0..=top).find(|&i| betti[i] != betti[top - i]) {
      return Err(PrequantError::DualityViolation { i, bi: betti[i], j: top - i, bj: betti[top - i] });
    }
    if k < 1 {
      return Err(PrequantError::DivisionByZero);
    }
    Ok(Self { sigma_real_dim, betti, c, k })
  }

  pub fn sigma_real_dim(&self) -> u32 { self.sigma_real_dim }

  /// Complex dimension of the filling: `dim_ℝ Σ = 2n − 2`.
  pub fn n(&self) -> i64 { self.sigma_real_dim as i64 / 2 + 1 }

  pub fn betti(&self) -> &[u64] { &self.betti }

  pub fn c(&self) -> i64 { self.c }

  pub fn k(&self) -> i64 { self.k }
}

/// Degree `i − 2 + 2cl/k` of an index-`i` point on the multiplicity-`l` copy.
pub fn mb_grading(i: i64, l: i64, c: i64, k: i64, n: i64) -> Result<Degree, PrequantError> {
  if k == 0 {
    return Err(PrequantError::DivisionByZero);
  }
  if l < 1 {
    return Err(PrequantError::InvalidMultiplicity(l));
  }
  let max = 2 * n - 2;
  if i < 0 || i > max {
    return Err(PrequantError::IndexOutOfRange { i, max });
  }
  Ok(Degree::from_integer(i - 2) + Degree::new(2 * c * l, k))
}

/// Contribution of the multiplicity-`l` copy of `Σ`.
pub fn level(spec: &PrequantSpec, l: i64) -> Result<GradedDims, PrequantError> {
  let mut out = GradedDims::new();
  for (i, b) in spec.betti.iter().enumerate() {
    out.add(mb_grading(i as i64, l, spec.c, spec.k, spec.n())?, *b);
  }
  Ok(out)
}

/// Morse–Bott `HC^cyl` in degrees `<= cutoff`.
pub fn prequant_cyl_hc(spec: &PrequantSpec, cutoff: Degree) -> Result<GradedDims, PrequantError> {
  if spec.c <= 0 {
    return Err(PrequantError::NonPositiveChernPairing(spec.c));
  }
  let mut out = GradedDims::new();
  let mut l = 1;
  loop {
    let copy = level(spec, l)?;
    match copy.min_degree() {
      Some(lowest) if lowest <= cutoff => {},
      _ => break,
    }
    for (d, r) in copy.truncate(cutoff).iter() {
      out.add(*d, *r);
    }
    l += 1;
  }
  Ok(out)
}
