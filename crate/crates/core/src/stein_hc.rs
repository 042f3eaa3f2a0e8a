//! Contact-homology invariants of a subcritical Stein domain `M = M′ × ℂ`.
//!
//! Everything here is driven by the Morse data of `M′`. The boundary `V` of
//! `M` carries, after thinning the handles, one distinguished Reeb orbit per
//! critical point `p` of `M′`; its `m`-fold cover has Conley–Zehnder index
//! `2m + n − k − 1` (with `k` the Morse index of `p`) and SFT degree
//! `cz + n − 3`. Cylindrical contact homology is then one copy of `H^*(M)` per
//! multiplicity, and full contact homology is the free graded-commutative
//! algebra on it.
//!
//! Convention: ranks of `H^k(M)` are taken equal to ranks of `H_k(M′)` (field
//! coefficients, `M ≃ M′`), so a rank of the Morse homology in degree `k`
//! contributes in degree `2m + 2n − k − 4`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graded_algebra::{direct_sum, free_gca_series, shift, GradedDims, GradedError, PoincareSeries};
use crate::linalg::{self, Matrix};
use crate::morse::{homology, relative_homology_dual, MorseComplex, MorseError};
use crate::rational::{factorial, serde_rational, Degree, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SteinError {
  #[error("complex dimension n = {0} must be at least 3")]
  InvalidDimension(u32),
  #[error("Morse data of M′ must have real dimension {expected}, found {found}")]
  WrongMorseDimension { expected: u32, found: u32 },
  #[error("Morse index {k} is not below n = {n}")]
  SubcriticalityViolation { k: u32, n: u32 },
  #[error("no index-0 critical point")]
  NoMinimum,
  #[error("multiplicity must be at least 1, got {0}")]
  InvalidMultiplicity(u32),
  #[error("unknown critical point {0:?}")]
  UnknownPoint(String),
  #[error("generator data inconsistent: {0}")]
  InvalidGenerator(String),
  #[error("cochain is not supported in the single Morse index {expected}: found index {found}")]
  DegreeMismatch { expected: u32, found: u32 },
  #[error("{0} marked points: one-point values come from gw_pairing")]
  TooFewMarkedPoints(u32),
  #[error("cycle dimension {deg} exceeds n − 1 = {max}")]
  InvalidCycleDimension { deg: u32, max: u32 },
  #[error(transparent)]
  Morse(#[from] MorseError),
  #[error(transparent)]
  Graded(#[from] GradedError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSteinDomainSpec {
  pub n:     u32,
  pub morse: MorseComplex,
}

/// Complex dimension `n` of `M` plus Morse data of `M′` (real dimension `2n − 2`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSteinDomainSpec", into = "RawSteinDomainSpec")]
pub struct SteinDomainSpec {
  n:     u32,
  morse: MorseComplex,
}

impl TryFrom<RawSteinDomainSpec> for SteinDomainSpec {
  type Error = SteinError;

  fn try_from(raw: RawSteinDomainSpec) -> Result<Self, SteinError> { SteinDomainSpec::new(raw.n, raw.morse) }
}

impl From<SteinDomainSpec> for RawSteinDomainSpec {
  fn from(s: SteinDomainSpec) -> Self { RawSteinDomainSpec { n: s.n, morse: s.morse } }
}

impl SteinDomainSpec {
  pub fn new(n: u32, morse: MorseComplex) -> Result<Self, SteinError> {
    if n < 3 {
      return Err(SteinError::InvalidDimension(n));
    }
    if morse.real_dimension() != 2 * n - 2 {
      return Err(SteinError::WrongMorseDimension { expected: 2 * n - 2, found: morse.real_dimension() });
    }
    if let Some(p) = morse.points().iter().find(|p| p.index >= n) {
      return Err(SteinError::SubcriticalityViolation { k: p.index, n });
    }
    if !morse.points().iter().any(|p| p.index == 0) {
      return Err(SteinError::NoMinimum);
    }
    Ok(Self { n, morse })
  }

  pub fn n(&self) -> u32 { self.n }

  pub fn morse(&self) -> &MorseComplex { &self.morse }

  /// Rank of `H^0`; the class of the simple orbit over the minimum exists
  /// iff this is positive. Values above 1 mean `M′` is disconnected.
  pub fn minimum_class_rank(&self) -> u64 { homology(&self.morse).rank_at(0) }
}

/// Conley–Zehnder index `2m + n − k − 1` of the `m`-fold distinguished orbit
/// over an index-`k` critical point.
pub fn cz_index(n: u32, k: u32, m: u32) -> Result<i64, SteinError> {
  if n < 3 {
    return Err(SteinError::InvalidDimension(n));
  }
  if k >= n {
    return Err(SteinError::SubcriticalityViolation { k, n });
  }
  if m < 1 {
    return Err(SteinError::InvalidMultiplicity(m));
  }
  Ok(2 * m as i64 + n as i64 - k as i64 - 1)
}

/// SFT degree `cz + n − 3 = 2m + 2n − k − 4`.
pub fn sft_grading(n: u32, k: u32, m: u32) -> Result<i64, SteinError> { Ok(cz_index(n, k, m)? + n as i64 - 3) }

/// Cylindrical contact homology truncated to degrees `<= cutoff`.
pub fn cyl_hc(spec: &SteinDomainSpec, cutoff: i64) -> GradedDims {
  let h = homology(&spec.morse);
  let n = spec.n as i64;
  let Some(max_k) = h.max_degree() else { return GradedDims::new() };
  let mut out = GradedDims::new();
  let mut m = 1i64;
  // lowest degree contributed at multiplicity m is 2m + 2n − 4 − max_k
  while Degree::from_integer(2 * m + 2 * n - 4) - max_k <= Degree::from_integer(cutoff) {
    for (k, rank) in h.iter() {
      let degree = Degree::from_integer(2 * m + 2 * n - 4) - k;
      if degree <= Degree::from_integer(cutoff) {
        out.add(degree, *rank);
      }
    }
    m += 1;
  }
  out
}

/// Checks `cyl_hc` against `⊕_{i≥1} H_*(M, ∂M)[2i − 4]` built from the
/// Poincaré–Lefschetz dual ranks.
pub fn verify_yau_isomorphism(spec: &SteinDomainSpec, cutoff: i64) -> bool {
  verify_yau_isomorphism_with(spec, cutoff, relative_homology_dual)
}

/// As [`verify_yau_isomorphism`] with the relative-homology routine supplied
/// by the caller.
pub fn verify_yau_isomorphism_with<F>(spec: &SteinDomainSpec, cutoff: i64, dual: F) -> bool
where F: Fn(&MorseComplex, u32) -> Result<GradedDims, MorseError> {
  let Ok(relative) = dual(&spec.morse, 2 * spec.n) else { return false };
  let cutoff = Degree::from_integer(cutoff);
  let mut copies = Vec::new();
  if let Some(lowest) = relative.min_degree() {
    let mut i = 1i64;
    while lowest + Degree::from_integer(2 * i - 4) <= cutoff {
      copies.push(shift(&relative, Degree::from_integer(2 * i - 4)).truncate(cutoff));
      i += 1;
    }
  }
  direct_sum(&copies) == cyl_hc(spec, *cutoff.numer())
}

/// Truncated Poincaré series of `HC(V) ≅ Λ(HC^cyl(V))`.
pub fn full_hc_series(spec: &SteinDomainSpec, cutoff: usize) -> Result<PoincareSeries, SteinError> {
  Ok(free_gca_series(&cyl_hc(spec, cutoff as i64), cutoff)?)
}

/// Virtual dimension of genus-`g` curves with `a` positive and `b` negative
/// punctures and `m` interior marked points.
pub fn expected_dimension(g: u32, mu_plus: &[i64], mu_minus: &[i64], n: i64, m: u32) -> i64 {
  let a = mu_plus.len() as i64;
  let b = mu_minus.len() as i64;
  mu_plus.iter().sum::<i64>() - mu_minus.iter().sum::<i64>() + (n - 3) * (2 - 2 * g as i64 - a - b) + 2 * m as i64
}

/// A chain-level generator of `HC^cyl`: the `m`-fold orbit over `crit_id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HCGenerator {
  pub crit_id:      String,
  pub multiplicity: u32,
  pub cz:           i64,
  pub degree:       i64,
}

impl HCGenerator {
  pub fn new(spec: &SteinDomainSpec, crit_id: &str, multiplicity: u32) -> Result<Self, SteinError> {
    let k = spec.morse.point(crit_id).ok_or_else(|| SteinError::UnknownPoint(crit_id.into()))?.index;
    let cz = cz_index(spec.n, k, multiplicity)?;
    Ok(Self { crit_id: crit_id.into(), multiplicity, cz, degree: cz + spec.n as i64 - 3 })
  }

  fn validate(&self, spec: &SteinDomainSpec) -> Result<u32, SteinError> {
    let expected = HCGenerator::new(spec, &self.crit_id, self.multiplicity)?;
    if expected != *self {
      return Err(SteinError::InvalidGenerator(format!(
        "{} with multiplicity {} has cz {} and degree {}",
        self.crit_id, self.multiplicity, expected.cz, expected.degree
      )));
    }
    Ok(spec.morse.point(&self.crit_id).map(|p| p.index).unwrap_or_default())
  }
}

/// All chain-level generators of degree `<= cutoff`, ordered by degree,
/// then multiplicity, then input order of the critical points.
pub fn generators(spec: &SteinDomainSpec, cutoff: i64) -> Vec<HCGenerator> {
  let mut out = Vec::new();
  for p in spec.morse.points() {
    let mut m = 1;
    loop {
      let g = HCGenerator::new(spec, &p.id, m).expect("points of a valid spec are subcritical");
      if g.degree > cutoff {
        break;
      }
      out.push(g);
      m += 1;
    }
  }
  out.sort_by_key(|g| (g.degree, g.multiplicity));
  out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaneIndexRow {
  pub crit_id:     String,
  pub morse_index: u32,
  pub plane_index: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WellDefinednessReport {
  pub rows:            Vec<PlaneIndexRow>,
  pub min_plane_index: Option<i64>,
  pub pass:            bool,
}

/// Index `μ + n − 3` of a plane asymptotic to each simple generator. Higher
/// covers only raise it, so `m = 1` realises the minimum.
pub fn well_definedness_check(spec: &SteinDomainSpec) -> WellDefinednessReport {
  let rows: Vec<PlaneIndexRow> = spec
    .morse
    .points()
    .iter()
    .map(|p| PlaneIndexRow {
      crit_id:     p.id.clone(),
      morse_index: p.index,
      plane_index: sft_grading(spec.n, p.index, 1).expect("valid spec"),
    })
    .collect();
  let min_plane_index = rows.iter().map(|r| r.plane_index).min();
  let pass = rows.iter().all(|r| !(-1..=1).contains(&r.plane_index));
  WellDefinednessReport { rows, min_plane_index, pass }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairingValue {
  #[serde(with = "serde_rational")]
  pub pairing:    Rational,
  /// `pairing / (m − 1)!`, the one-point descendant.
  #[serde(with = "serde_rational")]
  pub correlator: Rational,
}

/// Kronecker pairing of a generator with a Morse cochain, and the descendant
/// value it determines.
pub fn gw_pairing(
  spec: &SteinDomainSpec,
  generator: &HCGenerator,
  cochain: &BTreeMap<String, Rational>,
) -> Result<PairingValue, SteinError> {
  let k = generator.validate(spec)?;
  for (id, value) in cochain {
    let point = spec.morse.point(id).ok_or_else(|| SteinError::UnknownPoint(id.clone()))?;
    if !value.is_zero() && point.index != k {
      return Err(SteinError::DegreeMismatch { expected: k, found: point.index });
    }
  }
  let pairing = cochain.get(&generator.crit_id).cloned().unwrap_or_else(Rational::zero);
  let correlator = &pairing / factorial(generator.multiplicity as u64 - 1);
  Ok(PairingValue { pairing, correlator })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingMatrix {
  pub generators: Vec<HCGenerator>,
  /// `entries[r][c]`: descendant value of generator `r` against the dual
  /// cochain of generator `c`'s critical point.
  pub entries:    Matrix,
}

impl PairingMatrix {
  pub fn rank(&self) -> usize { linalg::rank(&self.entries) }
}

/// Pairing matrix of all chain-level generators in one SFT degree against the
/// canonical dual cochains.
pub fn pairing_matrix(spec: &SteinDomainSpec, degree: i64) -> Result<PairingMatrix, SteinError> {
  let gens: Vec<HCGenerator> = generators(spec, degree).into_iter().filter(|g| g.degree == degree).collect();
  let index_of = |g: &HCGenerator| spec.morse.point(&g.crit_id).map(|p| p.index);
  let mut entries = linalg::zeros(gens.len(), gens.len());
  for (r, row) in gens.iter().enumerate() {
    for (c, col) in gens.iter().enumerate() {
      if index_of(row) != index_of(col) {
        continue;
      }
      let cochain = BTreeMap::from([(col.crit_id.clone(), Rational::from_integer(1.into()))]);
      entries[r][c] = gw_pairing(spec, row, &cochain)?.correlator;
    }
  }
  Ok(PairingMatrix { generators: gens, entries })
}

/// Genus-0 correlator with `num_marked` marked points on planes asymptotic
/// to `σ`. Only the two-point correlator of the simple orbit over the minimum
/// survives, and only when both Poincaré-dual cycles have the maximal
/// dimension `n − 1`; it then equals the intersection number `cup_value`.
///
/// If `M′` is disconnected the simple-minimum class is the sum over
/// components, and `cup_value` must be supplied per component.
pub fn two_point_correlator(
  spec: &SteinDomainSpec,
  cup_value: &Rational,
  sigma_is_simple_minimum: bool,
  deg1: u32,
  deg2: u32,
  num_marked: u32,
) -> Result<Rational, SteinError> {
  if num_marked < 2 {
    return Err(SteinError::TooFewMarkedPoints(num_marked));
  }
  if num_marked >= 3 || !sigma_is_simple_minimum {
    return Ok(Rational::zero());
  }
  let max = spec.n - 1;
  for deg in [deg1, deg2] {
    if deg > max {
      return Err(SteinError::InvalidCycleDimension { deg, max });
    }
  }
  if deg1.min(deg2) < max {
    return Ok(Rational::zero());
  }
  Ok(cup_value.clone())
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::morse::{CritPoint, DiffEntry};

  fn q(v: i64) -> Rational { Rational::from_integer(v.into()) }

  fn spec(n: u32, points: &[(&str, u32)], diff: &[(&str, &str, i64)]) -> SteinDomainSpec {
    let points = points.iter().map(|(id, k)| CritPoint { id: id.to_string(), index: *k }).collect();
    let diff = diff
      .iter()
      .map(|(f, t, c)| DiffEntry { from: f.to_string(), to: t.to_string(), coefficient: q(*c) })
      .collect();
    SteinDomainSpec::new(n, MorseComplex::new(2 * n - 2, points, diff).unwrap()).unwrap()
  }

  fn ball(n: u32) -> SteinDomainSpec { spec(n, &[("p", 0)], &[]) }

  #[test]
  fn cz_examples() {
    assert_eq!(cz_index(3, 0, 1), Ok(4));
    assert_eq!(cz_index(3, 2, 1), Ok(2));
    assert_eq!(cz_index(4, 1, 3), Ok(8));
    assert_eq!(cz_index(3, 3, 1), Err(SteinError::SubcriticalityViolation { k: 3, n: 3 }));
    assert_eq!(cz_index(3, 0, 0), Err(SteinError::InvalidMultiplicity(0)));
  }

  #[test]
  fn grading_examples() {
    assert_eq!(sft_grading(3, 0, 1), Ok(4));
    assert_eq!(sft_grading(3, 0, 2), Ok(6));
    assert_eq!(sft_grading(5, 0, 1), Ok(8));
    assert_eq!(sft_grading(5, 4, 1), Ok(4));
  }

  #[test]
  fn grading_matches_relative_shift() {
    for n in 3..8 {
      for k in 0..n {
        for m in 1..6 {
          let lhs = sft_grading(n, k, m).unwrap() - (2 * n as i64 - k as i64);
          assert_eq!(lhs, 2 * m as i64 - 4);
        }
      }
    }
  }

  #[test]
  fn spec_validation() {
    let m = MorseComplex::new(4, vec![CritPoint { id: "p".into(), index: 0 }], vec![]).unwrap();
    assert_eq!(SteinDomainSpec::new(2, m.clone()), Err(SteinError::InvalidDimension(2)));
    assert!(matches!(SteinDomainSpec::new(4, m.clone()), Err(SteinError::WrongMorseDimension { .. })));
    let high = MorseComplex::new(
      4,
      vec![CritPoint { id: "p".into(), index: 0 }, CritPoint { id: "t".into(), index: 3 }],
      vec![],
    )
    .unwrap();
    assert_eq!(SteinDomainSpec::new(3, high), Err(SteinError::SubcriticalityViolation { k: 3, n: 3 }));
    let no_min = MorseComplex::new(4, vec![CritPoint { id: "q".into(), index: 1 }], vec![]).unwrap();
    assert_eq!(SteinDomainSpec::new(3, no_min), Err(SteinError::NoMinimum));
  }

  #[test]
  fn cyl_hc_examples() {
    assert_eq!(cyl_hc(&ball(3), 10), GradedDims::from_int_pairs([(4, 1), (6, 1), (8, 1), (10, 1)]));
    let two = spec(3, &[("p", 0), ("q", 1)], &[]);
    assert_eq!(cyl_hc(&two, 6), GradedDims::from_int_pairs([(3, 1), (4, 1), (5, 1), (6, 1)]));
    let cancel = spec(3, &[("p", 0), ("q", 1)], &[("q", "p", 1)]);
    assert_eq!(cyl_hc(&cancel, 10), GradedDims::new());
    assert_eq!(cancel.minimum_class_rank(), 0);
  }

  #[test]
  fn yau_examples() {
    assert!(verify_yau_isomorphism(&ball(3), 20));
    assert!(verify_yau_isomorphism(&spec(4, &[("p", 0), ("q", 1), ("r", 2)], &[]), 30));
    let corrupted = |c: &MorseComplex, top: u32| relative_homology_dual(c, top + 1);
    assert!(!verify_yau_isomorphism_with(&ball(3), 20, corrupted));
    let dropped = |_: &MorseComplex, _: u32| Ok(GradedDims::new());
    assert!(!verify_yau_isomorphism_with(&ball(3), 20, dropped));
  }

  #[test]
  fn full_hc_examples() {
    assert_eq!(full_hc_series(&ball(3), 8).unwrap().coefficients(), &[1, 0, 0, 0, 1, 0, 1, 0, 2]);
    let cancel = spec(3, &[("p", 0), ("q", 1)], &[("q", "p", 1)]);
    assert_eq!(full_hc_series(&cancel, 5).unwrap().coefficients(), &[1, 0, 0, 0, 0, 0]);
    let two = spec(3, &[("p", 0), ("q", 1)], &[]);
    assert_eq!(full_hc_series(&two, 4).unwrap().coefficients(), &[1, 0, 0, 1, 1]);
  }

  #[test]
  fn full_hc_is_local_in_degree() {
    let s = spec(4, &[("p", 0), ("q", 1), ("r", 2), ("s", 3)], &[]);
    let long = full_hc_series(&s, 30).unwrap();
    for cutoff in 0..30 {
      let short = full_hc_series(&s, cutoff).unwrap();
      assert_eq!(short.coefficients(), &long.coefficients()[..=cutoff]);
    }
  }

  #[test]
  fn dimension_examples() {
    assert_eq!(expected_dimension(0, &[4], &[], 3, 0), 4);
    for n in 3..7 {
      assert_eq!(expected_dimension(0, &[7], &[7], n, 0), 0);
    }
    assert_eq!(expected_dimension(0, &[4], &[], 5, 1), 8);
  }

  #[test]
  fn well_definedness_examples() {
    let r = well_definedness_check(&ball(3));
    assert!(r.pass);
    assert_eq!(r.min_plane_index, Some(4));
    let r = well_definedness_check(&spec(3, &[("p", 0), ("t", 2)], &[]));
    assert!(r.pass);
    assert_eq!(r.min_plane_index, Some(2));
  }

  #[test]
  fn pairing_examples() {
    let s = spec(3, &[("p", 0), ("q", 0), ("r", 1)], &[]);
    let cochain = |id: &str, v: i64| BTreeMap::from([(id.to_string(), q(v))]);
    let g1 = HCGenerator::new(&s, "p", 1).unwrap();
    assert_eq!(gw_pairing(&s, &g1, &cochain("p", 1)).unwrap(), PairingValue { pairing: q(1), correlator: q(1) });
    let g3 = HCGenerator::new(&s, "p", 3).unwrap();
    let v = gw_pairing(&s, &g3, &cochain("p", 1)).unwrap();
    assert_eq!(v.pairing, q(1));
    assert_eq!(v.correlator, Rational::new(1.into(), 2.into()));
    let g2 = HCGenerator::new(&s, "p", 2).unwrap();
    assert_eq!(gw_pairing(&s, &g2, &cochain("q", 5)).unwrap(), PairingValue { pairing: q(0), correlator: q(0) });
  }

  #[test]
  fn pairing_errors() {
    let s = spec(3, &[("p", 0), ("q", 0), ("r", 1)], &[]);
    let g = HCGenerator::new(&s, "p", 1).unwrap();
    let mixed = BTreeMap::from([("p".to_string(), q(1)), ("r".to_string(), q(1))]);
    assert_eq!(gw_pairing(&s, &g, &mixed), Err(SteinError::DegreeMismatch { expected: 0, found: 1 }));
    let unknown = BTreeMap::from([("z".to_string(), q(1))]);
    assert!(matches!(gw_pairing(&s, &g, &unknown), Err(SteinError::UnknownPoint(_))));
    let forged = HCGenerator { cz: 99, ..g };
    assert!(matches!(gw_pairing(&s, &forged, &BTreeMap::new()), Err(SteinError::InvalidGenerator(_))));
  }

  #[test]
  fn pairing_matrix_is_scaled_identity_per_degree() {
    // n = 4: index-0 at m and index-2 at m+1 share a degree
    let s = spec(4, &[("a", 0), ("b", 0), ("c", 2), ("d", 1)], &[]);
    for degree in 4..16 {
      let pm = pairing_matrix(&s, degree).unwrap();
      for (r, g) in pm.generators.iter().enumerate() {
        for c in 0..pm.generators.len() {
          let expected = if r == c { q(1) / factorial(g.multiplicity as u64 - 1) } else { q(0) };
          assert_eq!(pm.entries[r][c], expected);
        }
      }
      assert_eq!(pm.rank(), pm.generators.len());
    }
  }

  #[test]
  fn correlator_examples() {
    let s = ball(3);
    assert_eq!(two_point_correlator(&s, &q(7), true, 2, 2, 3), Ok(q(0)));
    assert_eq!(two_point_correlator(&s, &q(7), false, 2, 2, 2), Ok(q(0)));
    assert_eq!(two_point_correlator(&s, &q(7), true, 2, 2, 2), Ok(q(7)));
    assert_eq!(two_point_correlator(&s, &q(7), true, 1, 2, 2), Ok(q(0)));
    assert_eq!(two_point_correlator(&s, &q(7), true, 2, 2, 1), Err(SteinError::TooFewMarkedPoints(1)));
    assert!(matches!(
      two_point_correlator(&s, &q(7), true, 3, 2, 2),
      Err(SteinError::InvalidCycleDimension { .. })
    ));
  }

  #[test]
  fn generator_listing() {
    let s = spec(3, &[("p", 0), ("q", 1)], &[]);
    let gens = generators(&s, 6);
    let degrees: Vec<i64> = gens.iter().map(|g| g.degree).collect();
    assert_eq!(degrees, vec![3, 4, 5, 6]);
    assert!(gens.iter().all(|g| g.cz == g.degree));
  }
}
