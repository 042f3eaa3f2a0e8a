//! Reeb dynamics on the standard contact handle
//!
//! ```text
//! V = { Σ_{i≤k} (b_i x_i² − b′_i y_i²) + Σ_{j>k} a_j (x_j² + y_j²) = c }
//! ```
//!
//! in `ℂⁿ` with coordinates ordered `(x_1, y_1, …, x_n, y_n)`. Planes
//! `1..=k` are hyperbolic, planes `k+1..=n` elliptic.
//!
//! Two clocks appear. The Hamiltonian field `X` of `φ` rotates the elliptic
//! plane `j` with angular speed `2a_j`, so a simple orbit there has
//! Hamiltonian period `π/a_j`. The Reeb field is `R = X / α_st(X)` and
//! `α_st(X) = c` along the orbits, so the Reeb period equals the action
//! `cπ/a_j`. [`OrbitRecord::period`] is the Hamiltonian period;
//! [`integrate_reeb`] runs in Reeb time and also accumulates Hamiltonian time.
//!
//! The elliptic block of the linearized flow is the rotation
//! `[[cos 2a_j t, −sin 2a_j t], [sin 2a_j t, cos 2a_j t]]`, which is what
//! integrating `X` gives; a matrix with `sin` in both off-diagonal slots has
//! determinant `cos² − sin²` and is not symplectic.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stein_hc;

/// Relative tolerance for a point to count as lying on `V`.
pub const ON_HYPERSURFACE_TOL: f64 = 1e-9;
/// Allowed drift of `φ` along an integrated trajectory, relative to `c`.
pub const DRIFT_TOL: f64 = 1e-6;
/// Tolerance for an elliptic angle to count as a multiple of `2π`.
pub const FULL_TURN_TOL: f64 = 1e-9;
/// Largest denominator probed by the resonance check.
pub const RESONANCE_MAX_DENOMINATOR: i64 = 64;
pub const RESONANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HandleError {
  #[error("invalid handle: {0}")]
  InvalidSpec(String),
  #[error("point is off the hypersurface: φ − c = {residual:e}")]
  OffHypersurface { residual: f64 },
  #[error("expected {expected} coordinates, got {found}")]
  DimensionMismatch { expected: usize, found: usize },
  #[error("elliptic planes {0} and {1} have equal coefficients; orbits form a torus")]
  DegenerateOrbitTorus(u32, u32),
  #[error("elliptic rotation angle must be positive, got {0}")]
  InvalidRotation(f64),
  #[error("plane {plane} is not an elliptic plane of this handle")]
  InvalidPlane { plane: u32 },
  #[error("time must be nonnegative and finite, got {0}")]
  InvalidTime(f64),
  #[error("step size must be positive and finite, got {0}")]
  InvalidStep(f64),
  #[error("multiplicity {m} violates m/a_n < 1/a_j for plane {j}")]
  ConditionNotMet { m: u32, j: u32 },
  #[error("φ drifted by {drift:e} at t = {t}; step too large")]
  StepTooLarge { t: f64, drift: f64 },
  #[error("no return to the starting section before t = {0}")]
  NoReturn(f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawHandleSpec {
  pub n:       u32,
  pub k:       u32,
  pub b:       Vec<f64>,
  pub b_prime: Vec<f64>,
  pub a:       Vec<f64>,
  pub c:       f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHandleSpec", into = "RawHandleSpec")]
pub struct HandleSpec {
  n:       u32,
  k:       u32,
  b:       Vec<f64>,
  b_prime: Vec<f64>,
  a:       Vec<f64>,
  c:       f64,
}

impl TryFrom<RawHandleSpec> for HandleSpec {
  type Error = HandleError;

  fn try_from(r: RawHandleSpec) -> Result<Self, HandleError> { HandleSpec::new(r.n, r.k, r.b, r.b_prime, r.a, r.c) }
}

impl From<HandleSpec> for RawHandleSpec {
  fn from(s: HandleSpec) -> Self { RawHandleSpec { n: s.n, k: s.k, b: s.b, b_prime: s.b_prime, a: s.a, c: s.c } }
}

impl HandleSpec {
  pub fn new(n: u32, k: u32, b: Vec<f64>, b_prime: Vec<f64>, a: Vec<f64>, c: f64) -> Result<Self, HandleError> {
    let bad = |msg: String| Err(HandleError::InvalidSpec(msg));
    if n < 3 {
      return bad(format!("n = {n} must be at least 3"));
    }
    if k >= n {
      return bad(format!("handle index k = {k} must be below n = {n}"));
    }
    if b.len() != k as usize || b_prime.len() != k as usize {
      return bad(format!("b and b_prime need {k} entries each"));
    }
    if a.len() != (n - k) as usize {
      return bad(format!("a needs {} entries", n - k));
    }
    let positive = |v: &f64| v.is_finite() && *v > 0.0;
    if !b.iter().chain(&b_prime).chain(&a).all(positive) || !positive(&c) {
      return bad("all parameters must be positive and finite".into());
    }
    Ok(Self { n, k, b, b_prime, a, c })
  }

  pub fn n(&self) -> u32 { self.n }

  pub fn k(&self) -> u32 { self.k }

  pub fn c(&self) -> f64 { self.c }

  pub fn dim(&self) -> usize { 2 * self.n as usize }

  /// Elliptic coefficient of plane `j` (1-based), if `j` is elliptic.
  pub fn elliptic_coefficient(&self, plane: u32) -> Option<f64> {
    (plane > self.k && plane <= self.n).then(|| self.a[(plane - self.k - 1) as usize])
  }

  pub fn elliptic_planes(&self) -> impl Iterator<Item = u32> + '_ { self.k + 1..=self.n }

  /// Point on the simple orbit of elliptic plane `j`, at angle zero.
  pub fn orbit_point(&self, plane: u32) -> Result<Vec<f64>, HandleError> {
    let a = self.elliptic_coefficient(plane).ok_or(HandleError::InvalidPlane { plane })?;
    let mut p = vec![0.0; self.dim()];
    p[2 * (plane as usize - 1)] = (self.c / a).sqrt();
    Ok(p)
  }

  pub fn phi(&self, p: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..self.k as usize {
      s += self.b[i] * p[2 * i].powi(2) - self.b_prime[i] * p[2 * i + 1].powi(2);
    }
    for (j, a) in self.a.iter().enumerate() {
      let idx = 2 * (self.k as usize + j);
      s += a * (p[idx].powi(2) + p[idx + 1].powi(2));
    }
    s
  }

  /// Hamiltonian field `X` of `φ`.
  pub fn hamiltonian_field(&self, p: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; self.dim()];
    for i in 0..self.k as usize {
      v[2 * i] = 2.0 * self.b_prime[i] * p[2 * i + 1];
      v[2 * i + 1] = 2.0 * self.b[i] * p[2 * i];
    }
    for (j, a) in self.a.iter().enumerate() {
      let idx = 2 * (self.k as usize + j);
      v[idx] = -2.0 * a * p[idx + 1];
      v[idx + 1] = 2.0 * a * p[idx];
    }
    v
  }

  /// Gradient `dφ` as a covector.
  pub fn dphi(&self, p: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; self.dim()];
    for i in 0..self.k as usize {
      g[2 * i] = 2.0 * self.b[i] * p[2 * i];
      g[2 * i + 1] = -2.0 * self.b_prime[i] * p[2 * i + 1];
    }
    for (j, a) in self.a.iter().enumerate() {
      let idx = 2 * (self.k as usize + j);
      g[idx] = 2.0 * a * p[idx];
      g[idx + 1] = 2.0 * a * p[idx + 1];
    }
    g
  }

  /// The standard contact form `α_st` at `p` applied to `v`:
  /// `Σ_{i≤k} (2x_i dy_i + y_i dx_i) + Σ_{j>k} ½(x_j dy_j − y_j dx_j)`.
  pub fn alpha_st(&self, p: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..self.k as usize {
      s += 2.0 * p[2 * i] * v[2 * i + 1] + p[2 * i + 1] * v[2 * i];
    }
    for j in self.k as usize..self.n as usize {
      s += 0.5 * (p[2 * j] * v[2 * j + 1] - p[2 * j + 1] * v[2 * j]);
    }
    s
  }

  fn reeb_denominator(&self, p: &[f64]) -> f64 {
    let mut s = self.c;
    for i in 0..self.k as usize {
      s += 3.0 * self.b[i] * p[2 * i].powi(2) + 3.0 * self.b_prime[i] * p[2 * i + 1].powi(2);
    }
    s
  }

  fn check_point(&self, p: &[f64]) -> Result<(), HandleError> {
    if p.len() != self.dim() {
      return Err(HandleError::DimensionMismatch { expected: self.dim(), found: p.len() });
    }
    let residual = self.phi(p) - self.c;
    if residual.abs() > ON_HYPERSURFACE_TOL * self.c || !residual.is_finite() {
      return Err(HandleError::OffHypersurface { residual });
    }
    Ok(())
  }

  fn reeb_unchecked(&self, p: &[f64]) -> Vec<f64> {
    let denom = self.reeb_denominator(p);
    self.hamiltonian_field(p).into_iter().map(|x| x / denom).collect()
  }
}

/// Reeb field `X / (Σ_{i≤k}(3b_i x_i² + 3b′_i y_i²) + c)` at a point of `V`.
pub fn reeb_field(spec: &HandleSpec, p: &[f64]) -> Result<Vec<f64>, HandleError> {
  spec.check_point(p)?;
  Ok(spec.reeb_unchecked(p))
}

/// `L_{Y_st} φ = Σ_{i≤k}(4b_i x_i² + 2b′_i y_i²) + Σ_{j>k} a_j(x_j² + y_j²)`.
pub fn transversality_margin(spec: &HandleSpec, p: &[f64]) -> f64 {
  let mut s = 0.0;
  for i in 0..spec.k as usize {
    s += 4.0 * spec.b[i] * p[2 * i].powi(2) + 2.0 * spec.b_prime[i] * p[2 * i + 1].powi(2);
  }
  for (j, a) in spec.a.iter().enumerate() {
    let idx = 2 * (spec.k as usize + j);
    s += a * (p[idx].powi(2) + p[idx + 1].powi(2));
  }
  s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance {
  pub plane_a: u32,
  pub plane_b: u32,
  /// `a_{plane_a} / a_{plane_b} ≈ p / q`.
  pub p:       i64,
  pub q:       i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OrbitWarning {
  Resonant(Resonance),
}

/// Small-denominator resonances among the elliptic coefficients.
pub fn resonances(spec: &HandleSpec) -> Result<Vec<Resonance>, HandleError> {
  let planes: Vec<u32> = spec.elliptic_planes().collect();
  let mut out = Vec::new();
  for (idx, &ja) in planes.iter().enumerate() {
    for &jb in &planes[idx + 1..] {
      let (a, b) = (spec.elliptic_coefficient(ja).unwrap(), spec.elliptic_coefficient(jb).unwrap());
      if (a - b).abs() <= 1e-12 * a.max(b) {
        return Err(HandleError::DegenerateOrbitTorus(ja, jb));
      }
      let ratio = a / b;
      for q in 1..=RESONANCE_MAX_DENOMINATOR {
        let p = (ratio * q as f64).round();
        if (ratio - p / q as f64).abs() <= RESONANCE_TOL {
          out.push(Resonance { plane_a: ja, plane_b: jb, p: p as i64, q });
          break;
        }
      }
    }
  }
  Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitRecord {
  pub plane:        u32,
  pub multiplicity: u32,
  /// Hamiltonian period `m·π/a_j`.
  pub period:       f64,
  /// `c · period`, also the Reeb period.
  pub action:       f64,
  pub cz:           i64,
  pub good:         bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitEnumeration {
  pub orbits:   Vec<OrbitRecord>,
  pub warnings: Vec<OrbitWarning>,
}

/// Closed orbits of multiplicity `<= m_max` and index `<= max_cz`, ordered by
/// plane then multiplicity.
pub fn enumerate_orbits(spec: &HandleSpec, m_max: u32, max_cz: i64) -> Result<OrbitEnumeration, HandleError> {
  let warnings = resonances(spec)?.into_iter().map(OrbitWarning::Resonant).collect();
  let mut orbits = Vec::new();
  for plane in spec.elliptic_planes() {
    let a = spec.elliptic_coefficient(plane).unwrap();
    for m in 1..=m_max {
      let period = m as f64 * PI / a;
      let cz = cz_index_numeric(&measure_blocks(spec, period)?)?;
      if cz > max_cz {
        continue;
      }
      let mut record = OrbitRecord { plane, multiplicity: m, period, action: spec.c * period, cz, good: true };
      record.good = orbit_goodness(spec, &record);
      orbits.push(record);
    }
  }
  Ok(OrbitEnumeration { orbits, warnings })
}

/// The 2×2 block of the linearized flow in `plane` at Hamiltonian time `t`.
pub fn flow_block(spec: &HandleSpec, plane: u32, t: f64) -> Matrix2<f64> {
  let i = plane as usize - 1;
  if plane <= spec.k {
    let (b, bp) = (spec.b[i], spec.b_prime[i]);
    let s = 2.0 * (b * bp).sqrt() * t;
    let (ch, sh) = (s.cosh(), s.sinh());
    Matrix2::new(ch, (bp / b).sqrt() * sh, (b / bp).sqrt() * sh, ch)
  } else {
    let theta = 2.0 * spec.a[i - spec.k as usize] * t;
    let (sn, cs) = theta.sin_cos();
    Matrix2::new(cs, -sn, sn, cs)
  }
}

/// Block-diagonal linearized flow `d(Φ_X^t)` along the orbit in `orbit_plane`,
/// in the standard trivialization of `Tℂⁿ`.
pub fn linearized_flow(spec: &HandleSpec, orbit_plane: u32, t: f64) -> Result<DMatrix<f64>, HandleError> {
  if spec.elliptic_coefficient(orbit_plane).is_none() {
    return Err(HandleError::InvalidPlane { plane: orbit_plane });
  }
  if !(t.is_finite() && t >= 0.0) {
    return Err(HandleError::InvalidTime(t));
  }
  let mut m = DMatrix::zeros(spec.dim(), spec.dim());
  for plane in 1..=spec.n {
    let i = 2 * (plane as usize - 1);
    m.view_mut((i, i), (2, 2)).copy_from(&flow_block(spec, plane, t));
  }
  Ok(m)
}

/// One 2×2 summand of a symplectic path, as needed for the index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlowBlock {
  Hyperbolic,
  /// Total rotation angle accumulated along the path.
  Elliptic { angle: f64 },
}

/// Conley–Zehnder index of a block-diagonal path, summed over blocks.
pub fn cz_index_numeric(blocks: &[FlowBlock]) -> Result<i64, HandleError> {
  let mut total = 0;
  for block in blocks {
    total += match *block {
      FlowBlock::Hyperbolic => 0,
      FlowBlock::Elliptic { angle } => {
        if !angle.is_finite() || angle <= 0.0 {
          return Err(HandleError::InvalidRotation(angle));
        }
        let turns = angle / (2.0 * PI);
        let nearest = turns.round();
        if (angle - 2.0 * PI * nearest).abs() <= FULL_TURN_TOL {
          2 * nearest as i64
        } else {
          2 * turns.floor() as i64 + 1
        }
      },
    };
  }
  Ok(total)
}

/// Reads the blocks of the linearized flow over `[0, t]` off the flow
/// matrices: elliptic angles are tracked by unwrapping the rotation angle
/// on a grid fine enough that each step turns by less than `π/4`.
pub fn measure_blocks(spec: &HandleSpec, t: f64) -> Result<Vec<FlowBlock>, HandleError> {
  if !(t.is_finite() && t > 0.0) {
    return Err(HandleError::InvalidTime(t));
  }
  let mut blocks = Vec::with_capacity(spec.n as usize);
  for plane in 1..=spec.n {
    let Some(a) = spec.elliptic_coefficient(plane) else {
      blocks.push(FlowBlock::Hyperbolic);
      continue;
    };
    let steps = ((2.0 * a * t) / (PI / 4.0)).ceil().max(1.0) as usize + 1;
    let mut angle = 0.0;
    let mut prev = 0.0f64;
    for s in 1..=steps {
      let m = flow_block(spec, plane, t * s as f64 / steps as f64);
      let current = m[(1, 0)].atan2(m[(0, 0)]);
      let mut delta = current - prev;
      if delta <= -PI {
        delta += 2.0 * PI;
      } else if delta > PI {
        delta -= 2.0 * PI;
      }
      angle += delta;
      prev = current;
    }
    blocks.push(FlowBlock::Elliptic { angle });
  }
  Ok(blocks)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexRow {
  pub multiplicity: u32,
  pub numeric:      i64,
  pub expected:     i64,
  pub pass:         bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
  pub rows: Vec<IndexRow>,
  pub pass: bool,
}

/// Compares the numerically measured index of the `m`-fold distinguished
/// orbit (plane `n`) with `2m + n − k − 1` for `m = 1..=m_max`.
pub fn verify_index_formula(spec: &HandleSpec, m_max: u32) -> Result<IndexReport, HandleError> {
  let a_n = spec.elliptic_coefficient(spec.n).unwrap();
  for m in 1..=m_max {
    for j in spec.k + 1..spec.n {
      let a_j = spec.elliptic_coefficient(j).unwrap();
      if m as f64 / a_n >= 1.0 / a_j {
        return Err(HandleError::ConditionNotMet { m, j });
      }
    }
  }
  let mut rows = Vec::with_capacity(m_max as usize);
  for m in 1..=m_max {
    let numeric = cz_index_numeric(&measure_blocks(spec, m as f64 * PI / a_n)?)?;
    let expected = stein_hc::cz_index(spec.n, spec.k, m).expect("handle is subcritical");
    rows.push(IndexRow { multiplicity: m, numeric, expected, pass: numeric == expected });
  }
  let pass = rows.iter().all(|r| r.pass);
  Ok(IndexReport { rows, pass })
}

fn eigenvalues_in_open_interval(m: &Matrix2<f64>, lo: f64, hi: f64) -> usize {
  let tr = m.trace();
  let det = m.determinant();
  let disc = tr * tr / 4.0 - det;
  if disc < 0.0 {
    return 0;
  }
  let root = disc.sqrt();
  [tr / 2.0 - root, tr / 2.0 + root].iter().filter(|&&ev| ev > lo && ev < hi).count()
}

/// Number of eigenvalues in `(−1, 0)` of the return map of the orbit in
/// `plane` at Hamiltonian time `t`, restricted to the blocks transverse to it.
pub fn negative_eigenvalue_count(spec: &HandleSpec, plane: u32, t: f64) -> usize {
  (1..=spec.n).filter(|&p| p != plane).map(|p| eigenvalues_in_open_interval(&flow_block(spec, p, t), -1.0, 0.0)).sum()
}

/// An orbit is bad iff it is an even cover of an orbit whose return map has
/// an odd number of eigenvalues in `(−1, 0)`.
pub fn orbit_goodness(spec: &HandleSpec, orbit: &OrbitRecord) -> bool {
  let Some(a) = spec.elliptic_coefficient(orbit.plane) else { return true };
  let simple_period = PI / a;
  let m = orbit.multiplicity;
  !(1..=m)
    .filter(|d| m.is_multiple_of(*d) && (m / d).is_multiple_of(2))
    .any(|d| negative_eigenvalue_count(spec, orbit.plane, d as f64 * simple_period) % 2 == 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySample {
  /// Reeb time.
  pub t:                f64,
  pub hamiltonian_time: f64,
  pub point:            Vec<f64>,
  pub phi:              f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
  pub samples:   Vec<TrajectorySample>,
  /// `max |φ − c|` over the samples.
  pub max_drift: f64,
}

impl Trajectory {
  /// CSV with header `t,x_1,y_1,…,x_n,y_n,phi` and LF line endings.
  pub fn to_csv(&self) -> String {
    let dim = self.samples.first().map_or(0, |s| s.point.len());
    let mut out = String::from("t");
    for i in 1..=dim / 2 {
      write!(out, ",x_{i},y_{i}").unwrap();
    }
    out.push_str(",phi\n");
    for s in &self.samples {
      write!(out, "{:e}", s.t).unwrap();
      for v in &s.point {
        write!(out, ",{v:e}").unwrap();
      }
      writeln!(out, ",{:e}", s.phi).unwrap();
    }
    out
  }
}

/// Reeb field augmented with `dτ/dt = 1/α_st(X)` for the Hamiltonian clock.
fn augmented_field(spec: &HandleSpec, state: &[f64]) -> Vec<f64> {
  let (p, _) = state.split_at(spec.dim());
  let denom = spec.reeb_denominator(p);
  let mut v: Vec<f64> = spec.hamiltonian_field(p).into_iter().map(|x| x / denom).collect();
  v.push(1.0 / denom);
  v
}

fn rk4_step(spec: &HandleSpec, state: &[f64], h: f64) -> Vec<f64> {
  let axpy = |s: &[f64], k: &[f64], f: f64| -> Vec<f64> { s.iter().zip(k).map(|(a, b)| a + f * b).collect() };
  let k1 = augmented_field(spec, state);
  let k2 = augmented_field(spec, &axpy(state, &k1, h / 2.0));
  let k3 = augmented_field(spec, &axpy(state, &k2, h / 2.0));
  let k4 = augmented_field(spec, &axpy(state, &k3, h));
  state
    .iter()
    .enumerate()
    .map(|(i, s)| s + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
    .collect()
}

fn check_time_args(t_end: f64, dt: f64) -> Result<(), HandleError> {
  if !(dt.is_finite() && dt > 0.0) {
    return Err(HandleError::InvalidStep(dt));
  }
  if !(t_end.is_finite() && t_end >= 0.0) {
    return Err(HandleError::InvalidTime(t_end));
  }
  Ok(())
}

/// Fixed-step RK4 integration of the Reeb field from `start` up to Reeb time
/// `t_end`. The step is `t_end / ⌈t_end/dt⌉`, so it never exceeds `dt` and
/// the last sample lands on `t_end`.
pub fn integrate_reeb(spec: &HandleSpec, start: &[f64], t_end: f64, dt: f64) -> Result<Trajectory, HandleError> {
  spec.check_point(start)?;
  check_time_args(t_end, dt)?;
  let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
  let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
  let mut state: Vec<f64> = start.to_vec();
  state.push(0.0);
  let dim = spec.dim();
  let sample = |t: f64, s: &[f64]| TrajectorySample {
    t,
    hamiltonian_time: s[dim],
    point: s[..dim].to_vec(),
    phi: spec.phi(&s[..dim]),
  };
  let mut samples = vec![sample(0.0, &state)];
  let mut max_drift = (samples[0].phi - spec.c).abs();
  for i in 1..=steps {
    state = rk4_step(spec, &state, h);
    let t = if i == steps { t_end } else { i as f64 * h };
    let s = sample(t, &state);
    let drift = (s.phi - spec.c).abs();
    if drift > DRIFT_TOL * spec.c || !drift.is_finite() {
      return Err(HandleError::StepTooLarge { t, drift });
    }
    max_drift = max_drift.max(drift);
    samples.push(s);
  }
  Ok(Trajectory { samples, max_drift })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstReturn {
  /// Reeb time of the first return.
  pub reeb_time:        f64,
  /// Hamiltonian time of the first return.
  pub hamiltonian_time: f64,
  /// Distance from the start at the return.
  pub distance:         f64,
}

/// First return to the hyperplane through `start` orthogonal to the Reeb
/// field there, integrating with fixed step `dt` and refining the crossing by
/// bisection on the length of the final RK4 step.
pub fn first_return(spec: &HandleSpec, start: &[f64], dt: f64, t_max: f64) -> Result<FirstReturn, HandleError> {
  let normal = reeb_field(spec, start)?;
  check_time_args(t_max, dt)?;
  let dim = spec.dim();
  let section = |s: &[f64]| -> f64 { s[..dim].iter().zip(start).zip(&normal).map(|((x, x0), n)| (x - x0) * n).sum() };
  let mut state: Vec<f64> = start.to_vec();
  state.push(0.0);
  let mut t = 0.0;
  let mut went_negative = false;
  while t < t_max {
    let next = rk4_step(spec, &state, dt);
    let (g0, g1) = (section(&state), section(&next));
    if g1 < 0.0 {
      went_negative = true;
    }
    if went_negative && g0 < 0.0 && g1 >= 0.0 {
      let (mut lo, mut hi) = (0.0, dt);
      for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if section(&rk4_step(spec, &state, mid)) < 0.0 {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      let h = 0.5 * (lo + hi);
      let end = rk4_step(spec, &state, h);
      let distance = end[..dim].iter().zip(start).map(|(x, x0)| (x - x0).powi(2)).sum::<f64>().sqrt();
      return Ok(FirstReturn { reeb_time: t + h, hamiltonian_time: end[dim], distance });
    }
    let drift = (spec.phi(&next[..dim]) - spec.c).abs();
    if drift > DRIFT_TOL * spec.c {
      return Err(HandleError::StepTooLarge { t: t + dt, drift });
    }
    state = next;
    t += dt;
  }
  Err(HandleError::NoReturn(t_max))
}
