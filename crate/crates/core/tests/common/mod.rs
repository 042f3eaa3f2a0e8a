//! Test-only generators and independent oracles.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use steinhc::handle_dynamics::HandleSpec;
use steinhc::morse::{CritPoint, DiffEntry, MorseComplex};
use steinhc::{Rational, SteinDomainSpec};

fn q(v: i64) -> Rational { Rational::from_integer(v.into()) }

/// Reduced row echelon form; returns pivot columns.
fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
  let rows = m.len();
  let cols = m.first().map_or(0, Vec::len);
  let mut pivots = Vec::new();
  let mut r = 0;
  for c in 0..cols {
    if r == rows {
      break;
    }
    let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
    m.swap(r, p);
    let inv = m[r][c].recip();
    for x in m[r].iter_mut() {
      *x *= &inv;
    }
    for i in 0..rows {
      if i != r && !m[i][c].is_zero() {
        let f = m[i][c].clone();
        for j in 0..cols {
          let d = &f * &m[r][j];
          m[i][j] -= d;
        }
      }
    }
    pivots.push(c);
    r += 1;
  }
  pivots
}

/// Basis of the right kernel of `m` (`rows × cols`).
pub fn kernel_basis(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
  let mut a = m.to_vec();
  let pivots = rref(&mut a);
  let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
  free
    .iter()
    .map(|&f| {
      let mut v = vec![Rational::zero(); cols];
      v[f] = Rational::one();
      for (row, &p) in pivots.iter().enumerate() {
        v[p] = -a[row][f].clone();
      }
      v
    })
    .collect()
}

/// Rank by fraction-free Bareiss elimination on the integer matrix obtained
/// by clearing denominators row by row.
pub fn bareiss_rank(m: &[Vec<Rational>]) -> usize {
  let mut a: Vec<Vec<BigInt>> = m
    .iter()
    .map(|row| {
      let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
      row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
    })
    .collect();
  let rows = a.len();
  let cols = a.first().map_or(0, Vec::len);
  let mut prev = BigInt::one();
  let mut rank = 0;
  for c in 0..cols {
    if rank == rows {
      break;
    }
    let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else { continue };
    a.swap(rank, p);
    for i in rank + 1..rows {
      for j in c + 1..cols {
        let v = (&a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j]) / &prev;
        a[i][j] = v;
      }
      a[i][c] = BigInt::zero();
    }
    prev = a[rank][c].abs();
    if prev.is_zero() {
      prev = BigInt::one();
    }
    rank += 1;
  }
  rank
}

/// Dense matrix of `∂_k` rebuilt from the raw differential entries.
pub fn dense_boundary(c: &MorseComplex, k: u32) -> Vec<Vec<Rational>> {
  let rows: Vec<&str> = c.points().iter().filter(|p| k > 0 && p.index == k - 1).map(|p| p.id.as_str()).collect();
  let cols: Vec<&str> = c.points().iter().filter(|p| p.index == k).map(|p| p.id.as_str()).collect();
  let mut m = vec![vec![Rational::zero(); cols.len()]; rows.len()];
  for e in c.differential() {
    if let (Some(r), Some(cc)) = (rows.iter().position(|x| *x == e.to), cols.iter().position(|x| *x == e.from)) {
      m[r][cc] += &e.coefficient;
    }
  }
  m
}

/// Betti numbers from the dense oracle, indexed by degree.
pub fn brute_force_betti(c: &MorseComplex) -> Vec<u64> {
  let top = c.real_dimension();
  (0..=top)
    .map(|k| {
      let count = c.points().iter().filter(|p| p.index == k).count();
      let rk = if k == 0 { 0 } else { bareiss_rank(&dense_boundary(c, k)) };
      let rk1 = bareiss_rank(&dense_boundary(c, k + 1));
      (count - rk - rk1) as u64
    })
    .collect()
}

/// Random Morse data with `∂∘∂ = 0`: columns of `∂_k` are random integer
/// combinations of a kernel basis of `∂_{k−1}`.
pub fn random_complex<R: Rng>(rng: &mut R, real_dimension: u32, max_index: u32, max_points: usize) -> MorseComplex {
  let count = rng.gen_range(1..=max_points);
  let mut indices: Vec<u32> = (0..count).map(|_| rng.gen_range(0..=max_index)).collect();
  indices[0] = 0;
  indices.sort_unstable();
  let points: Vec<CritPoint> =
    indices.iter().enumerate().map(|(i, &k)| CritPoint { id: format!("c{i}_{k}"), index: k }).collect();
  let by_index = |k: u32| -> Vec<String> { points.iter().filter(|p| p.index == k).map(|p| p.id.clone()).collect() };

  let mut differential = Vec::new();
  let mut prev: Vec<Vec<Rational>> = Vec::new();
  for k in 1..=max_index {
    let (rows, cols) = (by_index(k - 1), by_index(k));
    let mut mat = vec![vec![Rational::zero(); cols.len()]; rows.len()];
    if !rows.is_empty() && !cols.is_empty() && rng.gen_bool(0.8) {
      let basis: Vec<Vec<Rational>> = if k == 1 {
        (0..rows.len())
          .map(|i| (0..rows.len()).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
          .collect()
      } else {
        kernel_basis(&prev, rows.len())
      };
      for c in 0..cols.len() {
        if basis.is_empty() || rng.gen_bool(0.2) {
          continue;
        }
        for v in &basis {
          let w = q(rng.gen_range(-2..=2));
          for r in 0..rows.len() {
            mat[r][c] += &w * &v[r];
          }
        }
      }
    }
    for (r, row) in mat.iter().enumerate() {
      for (c, x) in row.iter().enumerate() {
        if !x.is_zero() {
          differential.push(DiffEntry { from: cols[c].clone(), to: rows[r].clone(), coefficient: x.clone() });
        }
      }
    }
    prev = mat;
  }
  MorseComplex::new(real_dimension, points, differential).expect("generated complex is valid")
}

/// Random subcritical Stein spec, `n ∈ 3..=6`, at most 10 critical points.
pub fn random_stein_spec<R: Rng>(rng: &mut R) -> SteinDomainSpec {
  let n = rng.gen_range(3..=6);
  let morse = random_complex(rng, 2 * n - 2, n - 1, 10);
  SteinDomainSpec::new(n, morse).unwrap()
}

/// Random handle whose distinguished coefficient `a_n` satisfies
/// `m_max/a_n < 1/a_j` for every other elliptic plane.
pub fn random_handle<R: Rng>(rng: &mut R, n: u32, k: u32, m_max: u32) -> HandleSpec {
  let b = (0..k).map(|_| rng.gen_range(0.2..3.0)).collect();
  let bp = (0..k).map(|_| rng.gen_range(0.2..3.0)).collect();
  let mut a: Vec<f64> = (0..n - k - 1).map(|_| rng.gen_range(0.5..2.0)).collect();
  let max_other = a.iter().cloned().fold(0.5f64, f64::max);
  a.push(max_other * m_max as f64 * rng.gen_range(1.05..4.0) + rng.gen_range(0.0..1.0) * PI);
  let c = rng.gen_range(0.3..3.0);
  HandleSpec::new(n, k, b, bp, a, c).unwrap()
}

/// Brute-force count of graded-commutative monomials per degree.
pub fn brute_force_series(generators: &[u32], cutoff: usize) -> Vec<u64> {
  fn go(gens: &[u32], idx: usize, total: usize, cutoff: usize, out: &mut [u64]) {
    if idx == gens.len() {
      out[total] += 1;
      return;
    }
    let d = gens[idx] as usize;
    let max_power = if d % 2 == 1 { 1 } else { usize::MAX };
    let (mut power, mut t) = (0, total);
    while power <= max_power && t <= cutoff {
      go(gens, idx + 1, t, cutoff, out);
      power += 1;
      t += d;
    }
  }
  let mut out = vec![0; cutoff + 1];
  go(generators, 0, 0, cutoff, &mut out);
  out
}
