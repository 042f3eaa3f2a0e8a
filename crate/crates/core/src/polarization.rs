//! Betti-number constraints for subcritical polarizations.
//!
//! For a polarization `Σ ⊂ M` with `M ∖ Σ` subcritical of homological
//! dimension `D`, computing `HC^cyl` of the circle bundle once from the Stein
//! side and once by Morse–Bott methods forces
//!
//! - symmetry `a_i = a_{D−i}` of the Betti numbers of `M ∖ Σ`,
//! - accumulation `b_d = Σ_{j ≤ d, j ≡ d (2)} a_j` for `d < n` (with
//!   `a_j = 0` for `D < j < n`),
//! - Poincaré duality `b_i = b_{2n−2−i}` on `Σ`,
//!
//! and the lowest degrees give `2n − 2 − D = −2 + 2c/k`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graded_algebra::GradedDims;
use crate::prequant::{prequant_cyl_hc, PrequantError, PrequantSpec};
use crate::rational::{format_ratio, serde_degree, Degree};
use crate::stein_hc::{cyl_hc, SteinDomainSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolarizationError {
  #[error("invalid polarization data: {0}")]
  InvalidData(String),
  #[error("homological dimension D = {d} is not below n = {n}")]
  NotSubcritical { d: usize, n: u32 },
  #[error("a is not symmetric: a_{index} != a_{mirror}")]
  Unsolvable { index: usize, mirror: usize },
  #[error("relations and duality disagree on b_{degree}")]
  Inconsistent { degree: usize },
  #[error("Stein side has n = {stein}, prequantization side has n = {prequant}")]
  DimensionMismatch { stein: i64, prequant: i64 },
  #[error(transparent)]
  Prequant(#[from] PrequantError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPolarizationData {
  pub n: u32,
  pub a: Vec<u64>,
  pub b: Vec<u64>,
  pub k: i64,
  pub c: i64,
}

/// `(n, a_0..a_D, b_0..b_{2n−2}, k, c)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPolarizationData", into = "RawPolarizationData")]
pub struct PolarizationData {
  n: u32,
  a: Vec<u64>,
  b: Vec<u64>,
  k: i64,
  c: i64,
}

impl TryFrom<RawPolarizationData> for PolarizationData {
  type Error = PolarizationError;

  fn try_from(r: RawPolarizationData) -> Result<Self, PolarizationError> { PolarizationData::new(r.n, r.a, r.b, r.k, r.c) }
}

impl From<PolarizationData> for RawPolarizationData {
  fn from(p: PolarizationData) -> Self { RawPolarizationData { n: p.n, a: p.a, b: p.b, k: p.k, c: p.c } }
}

fn validate_a(n: u32, a: &[u64]) -> Result<usize, PolarizationError> {
  if n < 3 {
    return Err(PolarizationError::InvalidData(format!("n = {n} must be at least 3")));
  }
  match a.last() {
    None => Err(PolarizationError::InvalidData("a must be nonempty".into())),
    Some(0) => Err(PolarizationError::InvalidData("a_D must be positive".into())),
    Some(_) if a.len() > n as usize => Err(PolarizationError::NotSubcritical { d: a.len() - 1, n }),
    Some(_) => Ok(a.len() - 1),
  }
}

impl PolarizationData {
  pub fn new(n: u32, a: Vec<u64>, b: Vec<u64>, k: i64, c: i64) -> Result<Self, PolarizationError> {
    let d = validate_a(n, &a)?;
    if b.len() != 2 * n as usize - 1 {
      return Err(PolarizationError::InvalidData(format!("b needs {} entries, got {}", 2 * n - 1, b.len())));
    }
    if k < 1 {
      return Err(PolarizationError::InvalidData(format!("degree k = {k} must be positive")));
    }
    if k == 1 && d % 2 == 1 {
      return Err(PolarizationError::InvalidData(format!("D = {d} must be even for k = 1")));
    }
    Ok(Self { n, a, b, k, c })
  }

  pub fn n(&self) -> u32 { self.n }

  pub fn a(&self) -> &[u64] { &self.a }

  pub fn b(&self) -> &[u64] { &self.b }

  pub fn k(&self) -> i64 { self.k }

  pub fn c(&self) -> i64 { self.c }

  /// Homological dimension of `M ∖ Σ`.
  pub fn homological_dimension(&self) -> usize { self.a.len() - 1 }

  /// `a_i`, extended by zero past `D`.
  pub fn a_at(&self, i: usize) -> u64 { self.a.get(i).copied().unwrap_or(0) }

  pub fn prequant_spec(&self) -> Result<PrequantSpec, PolarizationError> {
    Ok(PrequantSpec::new(2 * self.n - 2, self.b.clone(), self.c, self.k)?)
  }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChernValue {
  #[serde(with = "serde_degree")]
  pub value:       Degree,
  pub non_integer: bool,
}

/// Solves `2n − 2 − D = −2 + 2c/k` for `c = k(2n − D)/2`.
pub fn derive_chern(n: u32, d: usize, k: i64) -> Result<ChernValue, PolarizationError> {
  if d >= n as usize {
    return Err(PolarizationError::NotSubcritical { d, n });
  }
  if k < 1 {
    return Err(PolarizationError::InvalidData(format!("degree k = {k} must be positive")));
  }
  let value = Degree::new(k * (2 * n as i64 - d as i64), 2);
  Ok(ChernValue { value, non_integer: !value.is_integer() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationRow {
  pub relation: String,
  pub lhs:      u64,
  pub rhs:      u64,
  pub pass:     bool,
}

impl RelationRow {
  fn new(relation: String, lhs: u64, rhs: u64) -> Self { Self { relation, lhs, rhs, pass: lhs == rhs } }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PolarizationWarning {
  /// Only `k = 1` is geometrically realised; the formulas are still checked.
  DegreeAboveOne { k: i64 },
  /// The supplied `c` does not satisfy the lowest-degree relation.
  ChernMismatch { given: i64, derived: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
  pub symmetry:          Vec<RelationRow>,
  pub accumulation:      Vec<RelationRow>,
  pub duality:           Vec<RelationRow>,
  pub symmetry_pass:     bool,
  pub accumulation_pass: bool,
  pub duality_pass:      bool,
  pub pass:              bool,
  pub warnings:          Vec<PolarizationWarning>,
}

impl RelationReport {
  pub fn rows(&self) -> impl Iterator<Item = &RelationRow> {
    self.symmetry.iter().chain(&self.accumulation).chain(&self.duality)
  }
}

fn accumulated(a: impl Fn(usize) -> u64, d: usize) -> u64 { (d % 2..=d).step_by(2).map(a).sum() }

fn accumulation_label(d: usize) -> String {
  let terms: Vec<String> = (d % 2..=d).step_by(2).map(|j| format!("a_{j}")).collect();
  format!("b_{d} = {}", terms.join(" + "))
}

pub fn check_relations(data: &PolarizationData) -> RelationReport {
  let n = data.n as usize;
  let d = data.homological_dimension();
  let symmetry: Vec<RelationRow> =
    (0..=d / 2).map(|i| RelationRow::new(format!("a_{i} = a_{}", d - i), data.a[i], data.a[d - i])).collect();
  let accumulation: Vec<RelationRow> =
    (0..n).map(|deg| RelationRow::new(accumulation_label(deg), data.b[deg], accumulated(|j| data.a_at(j), deg))).collect();
  let top = 2 * n - 2;
  let duality: Vec<RelationRow> =
    (0..n - 1).map(|i| RelationRow::new(format!("b_{i} = b_{}", top - i), data.b[i], data.b[top - i])).collect();

  let mut warnings = Vec::new();
  if data.k > 1 {
    warnings.push(PolarizationWarning::DegreeAboveOne { k: data.k });
  }
  if let Ok(chern) = derive_chern(data.n, d, data.k) {
    if chern.value != Degree::from_integer(data.c) {
      warnings.push(PolarizationWarning::ChernMismatch { given: data.c, derived: format_ratio(&chern.value) });
    }
  }
  let all = |rows: &[RelationRow]| rows.iter().all(|r| r.pass);
  let (symmetry_pass, accumulation_pass, duality_pass) = (all(&symmetry), all(&accumulation), all(&duality));
  RelationReport {
    symmetry,
    accumulation,
    duality,
    symmetry_pass,
    accumulation_pass,
    duality_pass,
    pass: symmetry_pass && accumulation_pass && duality_pass,
    warnings,
  }
}

/// Betti numbers of `Σ` forced by `a`: accumulation below the middle,
/// duality above it.
pub fn solve_betti(n: u32, a: &[u64]) -> Result<Vec<u64>, PolarizationError> {
  let d = validate_a(n, a)?;
  if let Some(i) = (0..=d).find(|&i| a[i] != a[d - i]) {
    return Err(PolarizationError::Unsolvable { index: i, mirror: d - i });
  }
  let n = n as usize;
  let top = 2 * n - 2;
  let a_at = |j: usize| a.get(j).copied().unwrap_or(0);
  let from_relations = |deg: usize| (deg < n).then(|| accumulated(a_at, deg));
  let mut b = Vec::with_capacity(top + 1);
  for deg in 0..=top {
    let direct = from_relations(deg);
    let dual = from_relations(top - deg);
    let value = match (direct, dual) {
      (Some(x), Some(y)) if x != y => return Err(PolarizationError::Inconsistent { degree: deg }),
      (Some(x), _) | (None, Some(x)) => x,
      (None, None) => unreachable!("every degree is within n − 1 of one end"),
    };
    b.push(value);
  }
  Ok(b)
}

/// Stein-side input to [`cross_check_hc`].
#[derive(Debug, Clone, Copy)]
pub enum SteinSide<'a> {
  Spec(&'a SteinDomainSpec),
  /// Cohomology ranks `a_d = rank H^d(M)` of a complex `n`-dimensional domain.
  Betti { n: u32, a: &'a [u64] },
}

impl SteinSide<'_> {
  fn n(&self) -> i64 {
    match self {
      SteinSide::Spec(s) => s.n() as i64,
      SteinSide::Betti { n, .. } => *n as i64,
    }
  }

  fn cyl_hc(&self, cutoff: i64) -> GradedDims {
    match self {
      SteinSide::Spec(s) => cyl_hc(s, cutoff),
      SteinSide::Betti { n, a } => {
        let n = *n as i64;
        let mut out = GradedDims::new();
        for (d, rank) in a.iter().enumerate() {
          let mut m = 1;
          while 2 * m + 2 * n - d as i64 - 4 <= cutoff {
            out.add(Degree::from_integer(2 * m + 2 * n - d as i64 - 4), *rank);
            m += 1;
          }
        }
        out
      },
    }
  }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
  #[serde(with = "serde_degree")]
  pub degree:        Degree,
  pub stein_rank:    u64,
  pub prequant_rank: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
  pub cutoff:             i64,
  pub stein:              GradedDims,
  pub prequant:           GradedDims,
  pub agree:              bool,
  pub first_disagreement: Option<Disagreement>,
}

/// Computes `HC^cyl` from both sides up to `cutoff` and compares ranks.
pub fn cross_check_hc(
  stein: SteinSide<'_>,
  prequant: &PrequantSpec,
  cutoff: i64,
) -> Result<CrossCheckReport, PolarizationError> {
  if stein.n() != prequant.n() {
    return Err(PolarizationError::DimensionMismatch { stein: stein.n(), prequant: prequant.n() });
  }
  let left = stein.cyl_hc(cutoff);
  let right = prequant_cyl_hc(prequant, Degree::from_integer(cutoff))?;
  let first_disagreement = left
    .degrees()
    .chain(right.degrees())
    .copied()
    .collect::<std::collections::BTreeSet<_>>()
    .into_iter()
    .find(|deg| left.rank(deg) != right.rank(deg))
    .map(|degree| Disagreement { degree, stein_rank: left.rank(&degree), prequant_rank: right.rank(&degree) });
  Ok(CrossCheckReport { cutoff, agree: first_disagreement.is_none(), stein: left, prequant: right, first_disagreement })
}

/// Cross-check of the two sides described by one [`PolarizationData`].
pub fn cross_check_polarization(data: &PolarizationData, cutoff: i64) -> Result<CrossCheckReport, PolarizationError> {
  cross_check_hc(SteinSide::Betti { n: data.n, a: &data.a }, &data.prequant_spec()?, cutoff)
}
