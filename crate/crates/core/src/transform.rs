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

//! Orthonormal fast transforms: Walsh-Hadamard and DCT-II.
//!
//! Both preserve the Euclidean norm exactly up to rounding. The Hadamard
//! transform uses the natural (bit-reversal-free) butterfly ordering, so row
//! `i` of the underlying matrix is `(-1)^popcount(i & j) / sqrt(n)`. The DCT
//! runs Lee's real-arithmetic recursion in O(n log n) for power-of-two sizes
//! and falls back to direct summation otherwise.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::invalid;
use crate::math;
use crate::Result;

/// Orthonormal fast Walsh-Hadamard transform. Involutive: applying it twice
/// returns the input.
pub fn fwht_ortho(v: &[f64]) -> Result<Vec<f64>> {
    let n = v.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(invalid("fwht_ortho: dimension must be a power of two"));
    }
    let mut buf = v.to_vec();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(h * 2) {
            for j in i..i + h {
                let x = buf[j];
                let y = buf[j + h];
                buf[j] = x + y;
                buf[j + h] = x - y;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / math::sqrt(n as f64);
    for x in &mut buf {
        *x *= scale;
    }
    Ok(buf)
}

/// Entry `(row, col)` of the orthonormal Hadamard matrix in natural order.
pub fn hadamard_entry(n: usize, row: usize, col: usize) -> f64 {
    let sign = if (row & col).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    sign / math::sqrt(n as f64)
}

// Unnormalized DCT-II by Lee's split-radix recursion (power-of-two length).
fn dct2_lee(x: &[f64], out: &mut [f64]) {
    let n = x.len();
    if n == 1 {
        out[0] = x[0];
        return;
    }
    let h = n / 2;
    let mut g = vec![0.0; h];
    let mut d = vec![0.0; h];
    for j in 0..h {
        let a = x[j];
        let b = x[n - 1 - j];
        g[j] = a + b;
        let angle = core::f64::consts::PI * (2.0 * j as f64 + 1.0) / (2.0 * n as f64);
        d[j] = (a - b) / (2.0 * math::cos(angle));
    }
    let mut gt = vec![0.0; h];
    let mut dt = vec![0.0; h];
    dct2_lee(&g, &mut gt);
    dct2_lee(&d, &mut dt);
    for k in 0..h {
        out[2 * k] = gt[k];
        out[2 * k + 1] = if k + 1 < h { dt[k] + dt[k + 1] } else { dt[k] };
    }
}

// Exact inverse of dct2_lee: runs the recursion backwards, so no global
// rescaling is needed.
fn dct3_lee(coef: &[f64], out: &mut [f64]) {
    let n = coef.len();
    if n == 1 {
        out[0] = coef[0];
        return;
    }
    let h = n / 2;
    let mut gt = vec![0.0; h];
    let mut dt = vec![0.0; h];
    for k in 0..h {
        gt[k] = coef[2 * k];
    }
    dt[h - 1] = coef[n - 1];
    for k in (0..h - 1).rev() {
        dt[k] = coef[2 * k + 1] - dt[k + 1];
    }
    let mut g = vec![0.0; h];
    let mut d = vec![0.0; h];
    dct3_lee(&gt, &mut g);
    dct3_lee(&dt, &mut d);
    for j in 0..h {
        let angle = core::f64::consts::PI * (2.0 * j as f64 + 1.0) / (2.0 * n as f64);
        let dj = d[j] * 2.0 * math::cos(angle);
        out[j] = (g[j] + dj) / 2.0;
        out[n - 1 - j] = (g[j] - dj) / 2.0;
    }
}

fn dct2_direct(x: &[f64], out: &mut [f64]) {
    let n = x.len();
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, &v) in x.iter().enumerate() {
            let angle =
                core::f64::consts::PI * (2.0 * j as f64 + 1.0) * k as f64 / (2.0 * n as f64);
            acc += v * math::cos(angle);
        }
        *slot = acc;
    }
}

fn dct3_direct(coef: &[f64], out: &mut [f64]) {
    let n = coef.len();
    for (j, slot) in out.iter_mut().enumerate() {
        let mut acc = coef[0] / 2.0;
        for (k, &c) in coef.iter().enumerate().skip(1) {
            let angle =
                core::f64::consts::PI * (2.0 * j as f64 + 1.0) * k as f64 / (2.0 * n as f64);
            acc += c * math::cos(angle);
        }
        *slot = acc;
    }
}

/// Orthonormal DCT-II of a vector of any dimension >= 1.
pub fn dct_ortho(v: &[f64]) -> Result<Vec<f64>> {
    let n = v.len();
    if n == 0 {
        return Err(invalid("dct_ortho: empty input"));
    }
    let mut out = vec![0.0; n];
    if n.is_power_of_two() {
        dct2_lee(v, &mut out);
    } else {
        dct2_direct(v, &mut out);
    }
    let s0 = math::sqrt(1.0 / n as f64);
    let s = math::sqrt(2.0 / n as f64);
    out[0] *= s0;
    for x in &mut out[1..] {
        *x *= s;
    }
    Ok(out)
}

/// Inverse of [`dct_ortho`] (the orthonormal DCT-III).
pub fn dct_ortho_inverse(coef: &[f64]) -> Result<Vec<f64>> {
    let n = coef.len();
    if n == 0 {
        return Err(invalid("dct_ortho_inverse: empty input"));
    }
    // undo the orthonormal scaling back to the raw recursion convention,
    // where the inverse of dct2 is dct3 scaled by 2/n and x0 halved
    let mut raw = coef.to_vec();
    let s0 = math::sqrt(1.0 / n as f64);
    let s = math::sqrt(2.0 / n as f64);
    raw[0] /= s0;
    for x in &mut raw[1..] {
        *x /= s;
    }
    let mut out = vec![0.0; n];
    if n.is_power_of_two() {
        dct3_lee(&raw, &mut out);
    } else {
        // classical identity: the inverse of the unnormalized DCT-II is
        // (2/n) times the DCT-III with a halved DC term
        dct3_direct(&raw, &mut out);
        for x in &mut out {
            *x *= 2.0 / n as f64;
        }
    }
    Ok(out)
}

/// Entry `(row, col)` of the orthonormal DCT-II matrix.
pub fn dct_entry(n: usize, row: usize, col: usize) -> f64 {
    let scale = if row == 0 {
        math::sqrt(1.0 / n as f64)
    } else {
        math::sqrt(2.0 / n as f64)
    };
    let angle = core::f64::consts::PI * (2.0 * col as f64 + 1.0) * row as f64 / (2.0 * n as f64);
    scale * math::cos(angle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, norm};
    use crate::rng::{draw_gaussian, RandomStream};

    #[test]
    fn fwht_first_basis_vector() {
        let mut e1 = vec![0.0; 4];
        e1[0] = 1.0;
        let t = fwht_ortho(&e1).unwrap();
        for &x in &t {
            assert!((x - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn fwht_rejects_non_power_of_two() {
        assert!(fwht_ortho(&[1.0, 2.0, 3.0]).is_err());
        assert!(fwht_ortho(&[]).is_err());
    }

    #[test]
    fn fwht_involution_and_isometry() {
        let mut stream = RandomStream::new(5, 0);
        for _ in 0..100 {
            let v = draw_gaussian(&mut stream, 64);
            let t = fwht_ortho(&v).unwrap();
            assert!((norm(&t) - norm(&v)).abs() < 1e-10);
            let back = fwht_ortho(&t).unwrap();
            for (a, b) in v.iter().zip(&back) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dct_dim_one_is_identity() {
        let t = dct_ortho(&[3.25]).unwrap();
        assert!((t[0] - 3.25).abs() < 1e-15);
    }

    #[test]
    fn dct_constant_vector_concentrates() {
        for &n in &[5usize, 8, 16, 31] {
            let v = vec![2.0; n];
            let t = dct_ortho(&v).unwrap();
            assert!((t[0] - 2.0 * (n as f64).sqrt()).abs() < 1e-10);
            for &x in &t[1..] {
                assert!(x.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dct_roundtrip_and_isometry() {
        let mut stream = RandomStream::new(6, 0);
        for &n in &[1usize, 2, 7, 16, 33, 128] {
            let v = draw_gaussian(&mut stream, n);
            let t = dct_ortho(&v).unwrap();
            assert!((norm(&t) - norm(&v)).abs() < 1e-10, "norm drift at n={n}");
            let back = dct_ortho_inverse(&t).unwrap();
            for (a, b) in v.iter().zip(&back) {
                assert!((a - b).abs() < 1e-10, "roundtrip at n={n}");
            }
        }
    }

    #[test]
    fn lee_recursion_matches_direct_summation() {
        let mut stream = RandomStream::new(7, 0);
        for &n in &[2usize, 8, 64, 256] {
            let v = draw_gaussian(&mut stream, n);
            let fast = dct_ortho(&v).unwrap();
            let mut direct = vec![0.0; n];
            dct2_direct(&v, &mut direct);
            let s0 = (1.0 / n as f64).sqrt();
            let s = (2.0 / n as f64).sqrt();
            direct[0] *= s0;
            for x in &mut direct[1..] {
                *x *= s;
            }
            for (a, b) in fast.iter().zip(&direct) {
                assert!((a - b).abs() < 1e-9, "lee vs direct at n={n}");
            }
        }
    }

    #[test]
    fn transforms_preserve_inner_products() {
        let mut stream = RandomStream::new(8, 0);
        for _ in 0..50 {
            let v = draw_gaussian(&mut stream, 32);
            let w = draw_gaussian(&mut stream, 32);
            let (tv, tw) = (fwht_ortho(&v).unwrap(), fwht_ortho(&w).unwrap());
            assert!((dot(&tv, &tw) - dot(&v, &w)).abs() < 1e-9);
            let (dv, dw) = (dct_ortho(&v).unwrap(), dct_ortho(&w).unwrap());
            assert!((dot(&dv, &dw) - dot(&v, &w)).abs() < 1e-9);
        }
    }

    #[test]
    fn matrix_entries_match_transform() {
        // hadamard_entry / dct_entry give the rows the fast paths implement
        for &n in &[8usize, 16] {
            for row in 0..n {
                let mut e = vec![0.0; n];
                e[row] = 1.0;
                // U e_row is the row-th column; symmetric H makes it the row too
                let h = fwht_ortho(&e).unwrap();
                for col in 0..n {
                    assert!((h[col] - hadamard_entry(n, row, col)).abs() < 1e-12);
                }
                let d = dct_ortho(&e).unwrap();
                for col in 0..n {
                    // column `row` of the DCT matrix = entries (col, row)
                    assert!((d[col] - dct_entry(n, col, row)).abs() < 1e-11);
                }
            }
        }
    }
}
