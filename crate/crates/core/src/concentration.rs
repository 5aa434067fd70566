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

//! Concentration constants for forward-operator distributions.
//!
//! For Gaussian operators the constants are exact: with unit x, the squared
//! image norm m ||Ax||^2 is chi-square with m degrees of freedom, independent
//! of x by rotation invariance, so chi-square CDF values are valid uniform
//! constants over any direction set. Subsampled orthogonal operators get the
//! Bernstein deviation bound parameterized by the coherence. Everything else
//! falls back to a Monte Carlo estimator that maxes the empirical probability
//! over sampled directions; that is a lower estimate of the true sup and is
//! labeled as such.

use alloc::vec::Vec;

use crate::error::invalid;
use crate::linalg::norm;
use crate::math;
use crate::operators::{draw_operator, OperatorSpec};
use crate::rng::RandomStream;
use crate::special::chi_square_cdf;
use crate::{Error, Result};

/// Which tail of the concentration event is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// P(||Ax|| <= t ||x||)
    Low,
    /// P(||Ax|| >= t ||x||)
    Upp,
}

/// Provenance of a concentration value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    Exact,
    AnalyticBound,
    MonteCarlo,
}

/// A concentration constant with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationEstimate {
    pub t: f64,
    pub value: f64,
    pub kind: EstimateKind,
    /// Directions tested (Monte Carlo only).
    pub n_x: Option<usize>,
    /// Operator draws per direction (Monte Carlo only).
    pub n_a: Option<usize>,
    /// Binomial standard error at the maximizing direction (Monte Carlo only).
    pub std_err: Option<f64>,
    /// Set when the requested bound is vacuous (t = 1 in the Bernstein case).
    pub vacuous: bool,
}

impl ConcentrationEstimate {
    fn exact(t: f64, value: f64) -> Self {
        ConcentrationEstimate {
            t,
            value,
            kind: EstimateKind::Exact,
            n_x: None,
            n_a: None,
            std_err: None,
            vacuous: false,
        }
    }
}

/// Exact Gaussian concentration constant: chi-square left tail for the low
/// side, right tail for the upper side. Valid uniformly over any direction
/// set by rotation invariance.
pub fn gaussian_exact_conc(t: f64, m: u32, side: Side) -> Result<ConcentrationEstimate> {
    if !(t > 0.0) {
        return Err(invalid("gaussian_exact_conc: t must be > 0"));
    }
    let left = chi_square_cdf(m as f64 * t * t, m)?;
    let value = match side {
        Side::Low => left,
        Side::Upp => 1.0 - left,
    };
    Ok(ConcentrationEstimate::exact(t, value))
}

/// Bernstein bound for subsampled orthogonal operators.
///
/// The event is reduced to the deviation |  ||Ax||^2 - ||x||^2 | >= s ||x||^2
/// with s = t^2 - 1 (upper side, t > 1) or s = 1 - t^2 (lower side, t < 1);
/// Bernstein's inequality then gives 2 exp(-(m s^2 / 2) / (mu (1 + s/3))).
/// At t = 1 the reduction is vacuous and the bound is 1.
pub fn bernstein_orthog_bound(
    t: f64,
    m: u32,
    mu: f64,
    side: Side,
) -> Result<ConcentrationEstimate> {
    if !(mu >= 1.0) {
        return Err(invalid("bernstein_orthog_bound: mu must be >= 1"));
    }
    if !(t > 0.0) {
        return Err(invalid("bernstein_orthog_bound: t must be > 0"));
    }
    let s = match side {
        Side::Upp => {
            if t < 1.0 {
                return Err(invalid("bernstein_orthog_bound: upper side needs t >= 1"));
            }
            t * t - 1.0
        }
        Side::Low => {
            if t > 1.0 {
                return Err(invalid("bernstein_orthog_bound: lower side needs t <= 1"));
            }
            1.0 - t * t
        }
    };
    if s == 0.0 {
        return Ok(ConcentrationEstimate {
            t,
            value: 1.0,
            kind: EstimateKind::AnalyticBound,
            n_x: None,
            n_a: None,
            std_err: None,
            vacuous: true,
        });
    }
    let raw = 2.0 * math::exp(-(m as f64 * s * s / 2.0) / (mu * (1.0 + s / 3.0)));
    Ok(ConcentrationEstimate {
        t,
        value: raw.min(1.0),
        kind: EstimateKind::AnalyticBound,
        n_x: None,
        n_a: None,
        std_err: None,
        vacuous: false,
    })
}

/// Monte Carlo estimate of a concentration constant: the max over `n_x`
/// sampled directions of the empirical event probability over `n_a`
/// operator draws. A lower estimate of the sup over the full direction set.
///
/// Each (direction, draw batch) cell uses its own derived stream, so the
/// estimate is independent of evaluation order.
#[allow(clippy::too_many_arguments)]
pub fn estimate_conc_mc(
    spec: &OperatorSpec,
    m: usize,
    n: usize,
    direction_sampler: &mut dyn FnMut(&mut RandomStream) -> Vec<f64>,
    t: f64,
    side: Side,
    n_x: usize,
    n_a: usize,
    stream: &RandomStream,
) -> Result<ConcentrationEstimate> {
    if n_x == 0 || n_a == 0 {
        return Err(invalid("estimate_conc_mc: n_x and n_a must be >= 1"));
    }
    let mut best: Option<(f64, f64)> = None; // (p_hat, std_err)
    let mut any_direction = false;
    for xi in 0..n_x {
        let mut dir_stream =
            RandomStream::derive(stream.master_seed, &[stream.stream_id, xi as u64, 0]);
        let x = direction_sampler(&mut dir_stream);
        let nx = norm(&x);
        if nx < 1e-12 {
            continue;
        }
        any_direction = true;
        let mut hits = 0usize;
        let mut draw_stream =
            RandomStream::derive(stream.master_seed, &[stream.stream_id, xi as u64, 1]);
        for _ in 0..n_a {
            let op = draw_operator(spec, m, n, &mut draw_stream)?;
            let image_norm = norm(&op.apply(&x)?);
            let event = match side {
                Side::Low => image_norm <= t * nx,
                Side::Upp => image_norm >= t * nx,
            };
            if event {
                hits += 1;
            }
        }
        let p_hat = hits as f64 / n_a as f64;
        let se = math::sqrt(p_hat * (1.0 - p_hat) / n_a as f64);
        if best.is_none_or(|(b, _)| p_hat > b) {
            best = Some((p_hat, se));
        }
    }
    if !any_direction {
        return Err(Error::DegenerateDirections);
    }
    let (value, std_err) = best.unwrap();
    Ok(ConcentrationEstimate {
        t,
        value,
        kind: EstimateKind::MonteCarlo,
        n_x: Some(n_x),
        n_a: Some(n_a),
        std_err: Some(std_err),
        vacuous: false,
    })
}

/// Absolute concentration bound C_abs(s, t): P(||Ax|| > t) over directions
/// with ||x|| <= s.
///
/// Exactly 0 for subsampled operators once t >= s sqrt(n/m) (the operator
/// norm is sqrt(n/m) almost surely) and for s = 0. Otherwise a Monte Carlo
/// estimate over directions rescaled to the boundary norm s.
#[allow(clippy::too_many_arguments)]
pub fn c_abs_bound(
    spec: &OperatorSpec,
    m: usize,
    n: usize,
    s_radius: f64,
    t_threshold: f64,
    direction_sampler: &mut dyn FnMut(&mut RandomStream) -> Vec<f64>,
    n_x: usize,
    n_a: usize,
    stream: &RandomStream,
) -> Result<ConcentrationEstimate> {
    if s_radius < 0.0 {
        return Err(invalid("c_abs_bound: s_radius must be >= 0"));
    }
    if s_radius == 0.0 {
        return Ok(ConcentrationEstimate::exact(t_threshold, 0.0));
    }
    if matches!(spec, OperatorSpec::SubsampledOrthogonal { .. })
        && t_threshold >= s_radius * math::sqrt(n as f64 / m as f64)
    {
        return Ok(ConcentrationEstimate::exact(t_threshold, 0.0));
    }
    // worst case over ||x|| <= s sits on the boundary for the norms we draw,
    // so rescale sampled directions to norm s and estimate P(||Ax|| > t)
    let mut scaled_sampler = |rs: &mut RandomStream| -> Vec<f64> {
        let x = direction_sampler(rs);
        let nx = norm(&x);
        if nx < 1e-12 {
            return x;
        }
        x.into_iter().map(|v| v * s_radius / nx).collect()
    };
    estimate_conc_mc(
        spec,
        m,
        n,
        &mut scaled_sampler,
        t_threshold / s_radius,
        Side::Upp,
        n_x,
        n_a,
        stream,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{Basis, SubgaussianKind};
    use crate::rng::draw_gaussian;

    #[test]
    fn gaussian_low_side_saturates() {
        let c = gaussian_exact_conc(1e6, 4, Side::Low).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_dof2_closed_form() {
        // m=2, t=1: chi2 cdf(2, 2) = 1 - e^{-1}
        let c = gaussian_exact_conc(1.0, 2, Side::Low).unwrap();
        assert!((c.value - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn gaussian_low_monotone_in_t() {
        let mut prev = 0.0;
        for i in 1..30 {
            let t = i as f64 * 0.1;
            let v = gaussian_exact_conc(t, 8, Side::Low).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn gaussian_exact_matches_mc_fixed_direction() {
        let spec = OperatorSpec::Subgaussian {
            kind: SubgaussianKind::Gaussian,
        };
        let mut x = vec![0.0; 8];
        x[2] = 1.0;
        let mut sampler = move |_: &mut RandomStream| x.clone();
        let seed = RandomStream::new(314, 0);
        for &(t, side) in &[(0.7, Side::Low), (1.4, Side::Upp)] {
            let mc =
                estimate_conc_mc(&spec, 16, 8, &mut sampler, t, side, 1, 10_000, &seed).unwrap();
            let exact = gaussian_exact_conc(t, 16, side).unwrap();
            let se = mc.std_err.unwrap().max(1e-4);
            assert!(
                (mc.value - exact.value).abs() <= 3.0 * se,
                "t={t}: mc {} exact {}",
                mc.value,
                exact.value
            );
        }
    }

    #[test]
    fn bernstein_pinned_values() {
        // vacuous boundary
        let v = bernstein_orthog_bound(1.0, 64, 4.0, Side::Upp).unwrap();
        assert_eq!(v.value, 1.0);
        assert!(v.vacuous);

        // m=128, mu=4, t=2 upper: s=3, bound = 2 exp(-72)
        let b = bernstein_orthog_bound(2.0, 128, 4.0, Side::Upp).unwrap();
        assert!((b.value - 2.0 * (-72.0f64).exp()).abs() < 1e-40);
        assert!(!b.vacuous);
    }

    #[test]
    fn bernstein_monotone_in_m_and_mu() {
        let mut prev = 1.0;
        for m in [16u32, 32, 64, 128, 256] {
            let v = bernstein_orthog_bound(0.5, m, 8.0, Side::Low)
                .unwrap()
                .value;
            assert!(v <= prev);
            prev = v;
        }
        let small = bernstein_orthog_bound(0.5, 64, 2.0, Side::Low)
            .unwrap()
            .value;
        let large = bernstein_orthog_bound(0.5, 64, 16.0, Side::Low)
            .unwrap()
            .value;
        assert!(small <= large);
    }

    #[test]
    fn bernstein_rejects_wrong_side_ranges() {
        assert!(bernstein_orthog_bound(0.5, 8, 2.0, Side::Upp).is_err());
        assert!(bernstein_orthog_bound(2.0, 8, 2.0, Side::Low).is_err());
        assert!(bernstein_orthog_bound(2.0, 8, 0.5, Side::Upp).is_err());
    }

    #[test]
    fn mc_low_side_huge_t_is_one() {
        let spec = OperatorSpec::Subgaussian {
            kind: SubgaussianKind::Rademacher,
        };
        let mut sampler = |rs: &mut RandomStream| draw_gaussian(rs, 6);
        let est = estimate_conc_mc(
            &spec,
            4,
            6,
            &mut sampler,
            1e9,
            Side::Low,
            4,
            200,
            &RandomStream::new(1, 5),
        )
        .unwrap();
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn mc_identity_subsampling_closed_form() {
        // x = e1 - e2, t = 1/2, low side: the event happens only when both
        // rows are dropped, probability (1 - m/n)^2. m/n is kept large
        // enough that empty draws (which would be resampled) never occur.
        let spec = OperatorSpec::SubsampledOrthogonal {
            basis: Basis::Identity,
        };
        let (m, n) = (16usize, 32usize);
        let mut x = vec![0.0; n];
        x[0] = 1.0;
        x[1] = -1.0;
        let mut sampler = move |_: &mut RandomStream| x.clone();
        let est = estimate_conc_mc(
            &spec,
            m,
            n,
            &mut sampler,
            0.5,
            Side::Low,
            1,
            20_000,
            &RandomStream::new(8, 0),
        )
        .unwrap();
        let p = (1.0 - m as f64 / n as f64) * (1.0 - m as f64 / n as f64);
        let se = est.std_err.unwrap();
        assert!(
            (est.value - p).abs() <= 3.0 * se,
            "mc {} exact {p}",
            est.value
        );
    }

    #[test]
    fn mc_rejects_degenerate_sampler() {
        let spec = OperatorSpec::Subgaussian {
            kind: SubgaussianKind::Gaussian,
        };
        let mut zero = |_: &mut RandomStream| vec![0.0; 4];
        assert!(matches!(
            estimate_conc_mc(
                &spec,
                2,
                4,
                &mut zero,
                1.0,
                Side::Low,
                3,
                10,
                &RandomStream::new(0, 0)
            ),
            Err(Error::DegenerateDirections)
        ));
    }

    #[test]
    fn c_abs_zero_cases() {
        let sub = OperatorSpec::SubsampledOrthogonal {
            basis: Basis::Hadamard,
        };
        let mut sampler = |rs: &mut RandomStream| draw_gaussian(rs, 16);
        // t exactly s sqrt(n/m)
        let s = 1.5;
        let t = s * (16.0f64 / 4.0).sqrt();
        let est = c_abs_bound(
            &sub,
            4,
            16,
            s,
            t,
            &mut sampler,
            2,
            10,
            &RandomStream::new(3, 1),
        )
        .unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.kind, EstimateKind::Exact);

        // s = 0 for any operator
        let dense = OperatorSpec::Subgaussian {
            kind: SubgaussianKind::Gaussian,
        };
        let est = c_abs_bound(
            &dense,
            4,
            16,
            0.0,
            0.1,
            &mut sampler,
            2,
            10,
            &RandomStream::new(3, 2),
        )
        .unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn c_abs_gaussian_matches_chi_square() {
        // s=1, t=2, m=16: P(||Ax|| > 2) with ||x||=1 equals the chi-square
        // upper tail at m t^2
        let dense = OperatorSpec::Subgaussian {
            kind: SubgaussianKind::Gaussian,
        };
        let mut sampler = |rs: &mut RandomStream| draw_gaussian(rs, 8);
        let est = c_abs_bound(
            &dense,
            16,
            8,
            1.0,
            2.0,
            &mut sampler,
            2,
            10_000,
            &RandomStream::new(41, 0),
        )
        .unwrap();
        let exact = 1.0 - chi_square_cdf(16.0 * 4.0, 16).unwrap();
        let se = est.std_err.unwrap().max(1e-4);
        assert!((est.value - exact).abs() <= 3.0 * se);
    }
}
