// Copyright 2026 The brl developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Small dense linear algebra: vectors, row-major matrices, Cholesky and
//! power iteration. Dimensions here stay in the low thousands, so plain
//! O(n^3) routines are all that is needed.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::rng::{draw_gaussian, RandomStream};
use crate::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(v: &[f64]) -> f64 {
    math::sqrt(dot(v, v))
}

#[inline]
pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, &x| acc.max(math::abs(x)))
}

/// `a - b` elementwise.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a + b` elementwise.
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| x * s).collect()
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            debug_assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        DenseMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|r| dot(self.row(r), x)).collect()
    }

    pub fn matvec_transpose(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (r, &yr) in y.iter().enumerate() {
            for (c, &a) in self.row(r).iter().enumerate() {
                out[c] += a * yr;
            }
        }
        out
    }

    /// A^T A as a dense `cols x cols` matrix.
    pub fn gram(&self) -> DenseMatrix {
        let n = self.cols;
        let mut g = DenseMatrix::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                for j in 0..n {
                    g.data[i * n + j] += ri * row[j];
                }
            }
        }
        g
    }
}

/// Cholesky factor of a symmetric positive-definite matrix (`A = L L^T`,
/// L lower triangular).
#[derive(Debug, Clone)]
pub struct Cholesky {
    pub n: usize,
    // lower triangle, row-major over the full square for simplicity
    l: Vec<f64>,
}

impl Cholesky {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        debug_assert_eq!(a.rows, a.cols);
        let n = a.rows;
        let mut l = vec![0.0; n * n];
        let mut max_pivot = f64::MIN;
        let mut min_pivot = f64::MAX;
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a.get(i, j);
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        let cond = if min_pivot > 0.0 && min_pivot.is_finite() {
                            max_pivot / min_pivot
                        } else {
                            f64::INFINITY
                        };
                        return Err(Error::FactorizationFailed {
                            condition_estimate: cond,
                        });
                    }
                    max_pivot = max_pivot.max(sum);
                    min_pivot = min_pivot.min(sum);
                    l[i * n + i] = math::sqrt(sum);
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Ok(Cholesky { n, l })
    }

    #[inline]
    pub fn l(&self, r: usize, c: usize) -> f64 {
        self.l[r * self.n + c]
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = self.solve_lower(b);
        self.solve_upper_in_place(&mut x);
        x
    }

    /// Solves `L y = b` (forward substitution).
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = b[i];
            for k in 0..i {
                sum -= self.l[i * n + k] * y[k];
            }
            y[i] = sum / self.l[i * n + i];
        }
        y
    }

    /// Solves `L^T x = y` in place (back substitution).
    pub fn solve_upper_in_place(&self, y: &mut [f64]) {
        let n = self.n;
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in i + 1..n {
                sum -= self.l[k * n + i] * y[k];
            }
            y[i] = sum / self.l[i * n + i];
        }
    }

    /// log det A = 2 sum log L_ii.
    pub fn log_det(&self) -> f64 {
        (0..self.n)
            .map(|i| 2.0 * math::ln(self.l[i * self.n + i]))
            .sum()
    }
}

const POWER_ITER_MAX: usize = 10_000;
const POWER_ITER_RTOL: f64 = 1e-6;

/// Largest singular value of a linear operator given as a pair of closures
/// (apply, apply-transpose), by power iteration on A^T A.
///
/// Deterministic: the start vector comes from a fixed internal stream.
pub fn operator_norm<F, G>(n_cols: usize, apply: F, apply_t: G) -> Result<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let mut stream = RandomStream::new(0x9072_17E2_A01D_5EED, 0);
    let mut v = draw_gaussian(&mut stream, n_cols);
    let nv = norm(&v);
    if nv == 0.0 {
        return Ok(0.0);
    }
    for x in &mut v {
        *x /= nv;
    }
    let mut sigma_prev = 0.0;
    for iter in 1..=POWER_ITER_MAX {
        let w = apply_t(&apply(&v));
        let lambda = norm(&w);
        if lambda == 0.0 {
            return Ok(0.0);
        }
        let sigma = math::sqrt(lambda);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / lambda;
        }
        if math::abs(sigma - sigma_prev) <= POWER_ITER_RTOL * sigma {
            return Ok(sigma);
        }
        sigma_prev = sigma;
        let _ = iter;
    }
    Err(Error::PowerIterationDiverged {
        iterations: POWER_ITER_MAX,
    })
}

/// Spectral norm of a dense matrix by power iteration.
pub fn spectral_norm(a: &DenseMatrix) -> Result<f64> {
    operator_norm(a.cols, |x| a.matvec(x), |y| a.matvec_transpose(y))
}
