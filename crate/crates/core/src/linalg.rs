//! Dense exact elimination over the rationals.

use num_traits::Zero;

use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix { vec![vec![Rational::zero(); cols]; rows] }

/// Rank by row reduction. Consumes a copy of the matrix.
pub fn rank(m: &Matrix) -> usize {
  let mut a = m.clone();
  let rows = a.len();
  let cols = a.first().map_or(0, Vec::len);
  let mut r = 0;
  for col in 0..cols {
    if r == rows {
      break;
    }
    let Some(pivot) = (r..rows).find(|&i| !a[i][col].is_zero()) else { continue };
    a.swap(r, pivot);
    let inv = a[r][col].recip();
    for j in col..cols {
      a[r][j] = &a[r][j] * &inv;
    }
    for i in 0..rows {
      if i != r && !a[i][col].is_zero() {
        let factor = a[i][col].clone();
        for j in col..cols {
          let delta = &factor * &a[r][j];
          a[i][j] -= delta;
        }
      }
    }
    r += 1;
  }
  r
}

/// `a * b`; panics on shape mismatch.
pub fn mul(a: &Matrix, b: &Matrix) -> Matrix {
  let inner = b.len();
  let cols = b.first().map_or(0, Vec::len);
  assert!(a.iter().all(|row| row.len() == inner), "shape mismatch");
  let mut out = zeros(a.len(), cols);
  for (i, row) in a.iter().enumerate() {
    for (k, x) in row.iter().enumerate() {
      if x.is_zero() {
        continue;
      }
      for j in 0..cols {
        out[i][j] += x * &b[k][j];
      }
    }
  }
  out
}

pub fn is_zero(m: &Matrix) -> bool { m.iter().flatten().all(Zero::is_zero) }
