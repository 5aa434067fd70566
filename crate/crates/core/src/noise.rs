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

//! Gaussian measurement noise N(0, (sigma^2/m) I) with its closed-form tail
//! and density-shift constants.
//!
//! The realized noise dimension may differ from the nominal row count `m`
//! when operators subsample rows; the variance per coordinate stays
//! sigma^2/m_nominal in that case, and `m_nominal` is what enters every
//! constant below.

use alloc::vec::Vec;

use crate::error::invalid;
use crate::linalg::dot;
use crate::math;
use crate::rng::{draw_gaussian, RandomStream};
use crate::Result;

/// Noise distribution parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub m_nominal: u32,
}

impl NoiseSpec {
    pub fn new(sigma: f64, m_nominal: u32) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(invalid("NoiseSpec: sigma must be > 0"));
        }
        if m_nominal == 0 {
            return Err(invalid("NoiseSpec: m_nominal must be >= 1"));
        }
        Ok(NoiseSpec { sigma, m_nominal })
    }

    #[inline]
    fn coord_std(&self) -> f64 {
        self.sigma / math::sqrt(self.m_nominal as f64)
    }

    /// `q` i.i.d. N(0, sigma^2/m) entries.
    pub fn draw(&self, q: usize, stream: &mut RandomStream) -> Vec<f64> {
        let s = self.coord_std();
        draw_gaussian(stream, q)
            .into_iter()
            .map(|g| s * g)
            .collect()
    }

    /// Tail bound on P(||e|| >= t): `(t^2/sigma^2 e^{1 - t^2/sigma^2})^{m/2}`
    /// for t > sigma, clamped to 1 otherwise (the formula is only valid past
    /// the mean radius).
    pub fn d_upp(&self, t: f64) -> f64 {
        if t <= self.sigma {
            return 1.0;
        }
        let z = (t * t) / (self.sigma * self.sigma);
        math::powf(z * math::exp(1.0 - z), self.m_nominal as f64 / 2.0)
    }

    /// Density shift bound `exp(m (2 tau + eps) eps / (2 sigma^2))`.
    pub fn d_shift(&self, eps: f64, tau: f64) -> f64 {
        debug_assert!(eps >= 0.0 && tau >= 0.0);
        math::exp(self.m_nominal as f64 * (2.0 * tau + eps) * eps / (2.0 * self.sigma * self.sigma))
    }

    /// Exact log-density at `e`, dimension taken as the realized length.
    pub fn log_density(&self, e: &[f64]) -> f64 {
        let q = e.len() as f64;
        let m = self.m_nominal as f64;
        let var = self.sigma * self.sigma / m;
        -0.5 * q * math::ln(2.0 * core::f64::consts::PI * var) - dot(e, e) / (2.0 * var)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm;

    #[test]
    fn d_upp_pinned_values() {
        let spec = NoiseSpec::new(1.0, 2).unwrap();
        assert_eq!(spec.d_upp(1.0), 1.0); // clamp boundary
        assert_eq!(spec.d_upp(0.2), 1.0);
        let v = spec.d_upp(2.0);
        assert!((v - 4.0 * (-3.0f64).exp()).abs() < 1e-12);
        assert!((v - 0.199_148).abs() < 1e-6);
    }

    #[test]
    fn d_upp_decreasing_past_sigma() {
        let spec = NoiseSpec::new(0.7, 16).unwrap();
        let mut prev = 1.0;
        for i in 1..40 {
            let t = 0.7 + 0.1 * i as f64;
            let v = spec.d_upp(t);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn d_shift_pinned_values() {
        let spec = NoiseSpec::new(1.0, 2).unwrap();
        assert_eq!(spec.d_shift(0.0, 5.0), 1.0);
        assert!((spec.d_shift(1.0, 1.0) - (3.0f64).exp()).abs() < 1e-10);
        // monotone in both arguments
        assert!(spec.d_shift(0.5, 1.0) < spec.d_shift(0.6, 1.0));
        assert!(spec.d_shift(0.5, 1.0) < spec.d_shift(0.5, 1.1));
    }

    #[test]
    fn d_shift_dominates_density_ratios() {
        // For ||u|| <= tau and ||u - v|| <= eps, p(u)/p(v) <= d_shift; the
        // maximized ratio over 1e5 feasible pairs never exceeds the bound.
        let spec = NoiseSpec::new(0.8, 4).unwrap();
        let (eps, tau) = (0.3, 0.9);
        let bound = spec.d_shift(eps, tau);
        let mut stream = RandomStream::new(99, 0);
        let mut max_ratio = 0.0f64;
        for _ in 0..100_000 {
            let mut u = draw_gaussian(&mut stream, 4);
            let nu = norm(&u);
            let target = stream.next_f64() * tau;
            if nu > 0.0 {
                for x in &mut u {
                    *x *= target / nu;
                }
            }
            let mut d = draw_gaussian(&mut stream, 4);
            let nd = norm(&d);
            let step = stream.next_f64() * eps;
            if nd > 0.0 {
                for x in &mut d {
                    *x *= step / nd;
                }
            }
            let v: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + b).collect();
            let ratio = (spec.log_density(&u) - spec.log_density(&v)).exp();
            max_ratio = max_ratio.max(ratio);
        }
        assert!(
            max_ratio <= bound + 1e-9,
            "max ratio {max_ratio} vs bound {bound}"
        );
    }

    #[test]
    fn log_density_pinned_and_translation() {
        // q = 1 with unit coordinate variance (sigma^2/m = 1)
        let spec = NoiseSpec::new(2.0, 4).unwrap();
        let at_zero = spec.log_density(&[0.0]);
        assert!((at_zero + 0.5 * (2.0 * core::f64::consts::PI).ln()).abs() < 1e-12);
        // log p(e) - log p(0) = -(m / 2 sigma^2) ||e||^2
        let e = [0.3, -1.2, 0.5];
        let zero = [0.0, 0.0, 0.0];
        let lhs = spec.log_density(&e) - spec.log_density(&zero);
        let rhs = -(4.0 / (2.0 * 4.0)) * dot(&e, &e);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn log_density_integrates_to_one_1d() {
        // trapezoid quadrature over [-12 std, 12 std]
        let spec = NoiseSpec::new(1.5, 9).unwrap();
        let std = 1.5 / 3.0;
        let (lo, hi, steps) = (-12.0 * std, 12.0 * std, 400_000usize);
        let h = (hi - lo) / steps as f64;
        let mut acc = 0.0;
        for i in 0..=steps {
            let x = lo + i as f64 * h;
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            acc += w * spec.log_density(&[x]).exp();
        }
        assert!((acc * h - 1.0).abs() < 1e-6);
    }

    #[test]
    fn draw_variance_and_scaling() {
        // empirical variance of 1e6 scalar draws, sigma=2 m=4 -> var 1
        let spec = NoiseSpec::new(2.0, 4).unwrap();
        let mut stream = RandomStream::new(17, 1);
        let n = 1_000_000usize;
        let draws = spec.draw(n, &mut stream);
        let var: f64 = draws.iter().map(|x| x * x).sum::<f64>() / n as f64;
        // chi-square variance oracle: sd of the estimate is sqrt(2/n)
        assert!((var - 1.0).abs() < 4.0 * (2.0f64).sqrt() / 1000.0);

        // doubling sigma doubles the sample standard deviation exactly
        // (paired streams)
        let a = NoiseSpec::new(1.0, 4).unwrap();
        let b = NoiseSpec::new(2.0, 4).unwrap();
        let va = a.draw(64, &mut RandomStream::new(5, 2));
        let vb = b.draw(64, &mut RandomStream::new(5, 2));
        for (x, y) in va.iter().zip(&vb) {
            assert!((2.0 * x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn draw_is_deterministic() {
        let spec = NoiseSpec::new(0.5, 8).unwrap();
        let a = spec.draw(33, &mut RandomStream::new(1, 2));
        let b = spec.draw(33, &mut RandomStream::new(1, 2));
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(NoiseSpec::new(0.0, 4).is_err());
        assert!(NoiseSpec::new(-1.0, 4).is_err());
        assert!(NoiseSpec::new(1.0, 0).is_err());
    }
}
