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

//! Approximate covering numbers.
//!
//! Three routes are provided. `greedy_cover` builds an empirical cover from
//! samples; its count is an upper estimate of the empirical covering number
//! (minimum set cover is NP-hard, so greedy is the documented surrogate).
//! `exact_cover_dirac` computes the exact quantity for small finite priors
//! by exhaustive subset search. The `analytic_*` functions evaluate the
//! closed-form log-cover bounds for Lipschitz pushforwards of Gaussians,
//! sparse-vector distributions, normal distributions and mixtures.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::invalid;
use crate::linalg::{norm, sub};
use crate::math;
use crate::priors::DiracMixture;
use crate::Result;

/// An eta,delta-approximate cover built from a sample or support set.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverResult {
    /// Indices of the chosen centers into the input set.
    pub center_indices: Vec<usize>,
    pub eta: f64,
    pub delta: f64,
    /// Fraction of the construction set covered by the chosen balls.
    pub covered_fraction: f64,
    pub count: usize,
}

/// Greedy cover of a sample set: repeatedly pick the sample whose eta-ball
/// covers the most uncovered samples (ties broken by lowest index) until at
/// least ceil((1 - delta) N) samples are covered.
pub fn greedy_cover(samples: &[Vec<f64>], eta: f64, delta: f64) -> Result<CoverResult> {
    if samples.is_empty() {
        return Err(invalid("greedy_cover: empty sample set"));
    }
    if !(eta > 0.0) {
        return Err(invalid("greedy_cover: eta must be > 0"));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(invalid("greedy_cover: delta must be in [0, 1)"));
    }
    let n = samples.len();
    let needed = math::ceil((1.0 - delta) * n as f64) as usize;
    // ball membership bitmaps, one per candidate center
    let words = n.div_ceil(64);
    let mut balls = vec![vec![0u64; words]; n];
    for i in 0..n {
        for j in 0..n {
            if norm(&sub(&samples[i], &samples[j])) <= eta {
                balls[i][j / 64] |= 1 << (j % 64);
            }
        }
    }
    let mut covered = vec![0u64; words];
    let mut covered_count = 0usize;
    let mut centers = Vec::new();
    while covered_count < needed {
        let mut best = 0usize;
        let mut best_gain = 0usize;
        for (i, ball) in balls.iter().enumerate() {
            let gain: u32 = ball
                .iter()
                .zip(&covered)
                .map(|(b, c)| (b & !c).count_ones())
                .sum();
            if gain as usize > best_gain {
                best_gain = gain as usize;
                best = i;
            }
        }
        debug_assert!(best_gain > 0, "greedy cover stalled");
        for (c, b) in covered.iter_mut().zip(&balls[best]) {
            *c |= b;
        }
        covered_count += best_gain;
        centers.push(best);
    }
    Ok(CoverResult {
        count: centers.len(),
        center_indices: centers,
        eta,
        delta,
        covered_fraction: covered_count as f64 / n as f64,
    })
}

/// Fraction of `others` covered by the chosen centers of `cover` (centers
/// indexed into `construction`).
pub fn held_out_coverage(
    cover: &CoverResult,
    construction: &[Vec<f64>],
    others: &[Vec<f64>],
) -> f64 {
    let mut hit = 0usize;
    for x in others {
        if cover
            .center_indices
            .iter()
            .any(|&c| norm(&sub(&construction[c], x)) <= cover.eta)
        {
            hit += 1;
        }
    }
    hit as f64 / others.len() as f64
}

const EXACT_COVER_MAX_POINTS: usize = 22;
const MASS_TOL: f64 = 1e-12;

/// Exact approximate covering number of a finite mixture: the minimal number
/// of radius-eta balls centered at support points whose union carries mass
/// at least 1 - delta.
///
/// Fast path when the support is spread out (min separation > 2 eta): each
/// ball covers exactly its own center, so the answer is the number of
/// largest weights needed to reach 1 - delta. Otherwise an exhaustive
/// search over center subsets of increasing size, pruned by the greedy
/// solution.
pub fn exact_cover_dirac(prior: &DiracMixture, eta: f64, delta: f64) -> Result<usize> {
    let k = prior.points.len();
    if k > EXACT_COVER_MAX_POINTS {
        return Err(invalid("exact_cover_dirac: more than 22 points"));
    }
    if !(eta > 0.0) {
        return Err(invalid("exact_cover_dirac: eta must be > 0"));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(invalid("exact_cover_dirac: delta must be in [0, 1)"));
    }
    let target = 1.0 - delta - MASS_TOL;

    let spread = k == 1 || prior.min_separation()? > 2.0 * eta;
    if spread {
        let mut weights = prior.weights.clone();
        weights.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
        let mut acc = 0.0;
        for (count, w) in weights.iter().enumerate() {
            acc += w;
            if acc >= target {
                return Ok(count + 1);
            }
        }
        return Ok(k);
    }

    // ball masks over the (<= 22) points
    let masks: Vec<u32> = (0..k)
        .map(|i| {
            let mut m = 0u32;
            for j in 0..k {
                if norm(&sub(&prior.points[i], &prior.points[j])) <= eta {
                    m |= 1 << j;
                }
            }
            m
        })
        .collect();
    let mass_of = |mask: u32| -> f64 {
        (0..k)
            .filter(|&j| mask >> j & 1 == 1)
            .map(|j| prior.weights[j])
            .sum()
    };

    // greedy upper bound caps the exhaustive depth
    let mut covered = 0u32;
    let mut greedy = 0usize;
    while mass_of(covered) < target {
        let best = (0..k)
            .max_by(|&a, &b| {
                mass_of(covered | masks[a])
                    .partial_cmp(&mass_of(covered | masks[b]))
                    .unwrap()
            })
            .unwrap();
        covered |= masks[best];
        greedy += 1;
    }

    for size in 1..greedy {
        if subset_covers(&masks, &mass_of, target, 0, 0u32, size) {
            return Ok(size);
        }
    }
    Ok(greedy)
}

fn subset_covers(
    masks: &[u32],
    mass_of: &dyn Fn(u32) -> f64,
    target: f64,
    start: usize,
    acc: u32,
    remaining: usize,
) -> bool {
    if mass_of(acc) >= target {
        return true;
    }
    if remaining == 0 || start >= masks.len() {
        return false;
    }
    for i in start..masks.len() {
        if subset_covers(masks, mass_of, target, i + 1, acc | masks[i], remaining - 1) {
            return true;
        }
    }
    false
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid("analytic cover bounds need 0 < delta <= 1"));
    }
    Ok(())
}

/// Log covering-number bound for the pushforward of N(0, I_k) through an
/// L-Lipschitz map: `k log[1 + (2 sqrt(k) L / eta)(1 + sqrt((2/k) log(1/delta)))]`.
pub fn analytic_cov_lipschitz(k: usize, l: f64, eta: f64, delta: f64) -> Result<f64> {
    if k == 0 {
        return Err(invalid("analytic_cov_lipschitz: k must be >= 1"));
    }
    if l < 0.0 || !(eta > 0.0) {
        return Err(invalid("analytic_cov_lipschitz: need L >= 0 and eta > 0"));
    }
    check_delta(delta)?;
    let kf = k as f64;
    let t = 1.0 + math::sqrt(2.0 / kf * math::ln(1.0 / delta));
    Ok(kf * math::ln(1.0 + 2.0 * math::sqrt(kf) * l * t / eta))
}

/// Log covering-number bound for the s-sparse distribution on R^n:
/// `s [log(e n / s) + log(1 + (2 sqrt(s) / eta)(1 + sqrt((2/s) log(1/delta))))]`.
pub fn analytic_cov_sparse(n: usize, s: usize, eta: f64, delta: f64) -> Result<f64> {
    if s == 0 || s > n {
        return Err(invalid("analytic_cov_sparse: need 1 <= s <= n"));
    }
    if !(eta > 0.0) {
        return Err(invalid("analytic_cov_sparse: eta must be > 0"));
    }
    check_delta(delta)?;
    let (nf, sf) = (n as f64, s as f64);
    let t = 1.0 + math::sqrt(2.0 / sf * math::ln(1.0 / delta));
    Ok(sf
        * (math::ln(core::f64::consts::E * nf / sf)
            + math::ln(1.0 + 2.0 * math::sqrt(sf) * t / eta)))
}

/// Log covering-number bound for N(0, sigma^2 I_n):
/// `n log(1 + 2 sqrt(n) sigma t / eta)` with `t = 1 + sqrt((2/n) log(1/delta))`.
pub fn analytic_cov_gaussian(n: usize, sigma: f64, eta: f64, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("analytic_cov_gaussian: n must be >= 1"));
    }
    if sigma < 0.0 || !(eta > 0.0) {
        return Err(invalid(
            "analytic_cov_gaussian: need sigma >= 0 and eta > 0",
        ));
    }
    check_delta(delta)?;
    let nf = n as f64;
    let t = 1.0 + math::sqrt(2.0 / nf * math::ln(1.0 / delta));
    Ok(nf * math::ln(1.0 + 2.0 * math::sqrt(nf) * sigma * t / eta))
}

/// Covering number of a mixture is at most the sum of the component covers.
pub fn mixture_cov_bound(component_counts: &[u64]) -> Result<u64> {
    if component_counts.is_empty() {
        return Err(invalid("mixture_cov_bound: empty list"));
    }
    Ok(component_counts.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_identical_samples_need_one_ball() {
        let samples = vec![vec![1.0, 2.0]; 10];
        let c = greedy_cover(&samples, 0.5, 0.0).unwrap();
        assert_eq!(c.count, 1);
        assert_eq!(c.covered_fraction, 1.0);
    }

    #[test]
    fn greedy_two_far_clusters_need_two_balls() {
        let mut samples = vec![vec![0.0, 0.0]; 5];
        samples.extend(vec![vec![10.0, 0.0]; 5]);
        let c = greedy_cover(&samples, 1.0, 0.0).unwrap();
        assert_eq!(c.count, 2);
    }

    #[test]
    fn greedy_line_instance_matches_brute_force() {
        // points {0, 1, 2.5}, eta 1, delta 0: optimal cover is 2 balls
        let samples = vec![vec![0.0], vec![1.0], vec![2.5]];
        let c = greedy_cover(&samples, 1.0, 0.0).unwrap();
        assert_eq!(c.count, 2);
        // ties break to the lowest index: center 0 and 1 both cover {0,1}
        assert_eq!(c.center_indices[0], 0);
    }

    #[test]
    fn greedy_rejects_bad_arguments() {
        assert!(greedy_cover(&[], 1.0, 0.0).is_err());
        assert!(greedy_cover(&[vec![0.0]], 0.0, 0.0).is_err());
        assert!(greedy_cover(&[vec![0.0]], 1.0, 1.0).is_err());
    }

    #[test]
    fn exact_cover_single_point() {
        let prior = DiracMixture::new(vec![vec![5.0]], vec![1.0]).unwrap();
        assert_eq!(exact_cover_dirac(&prior, 0.1, 0.0).unwrap(), 1);
    }

    #[test]
    fn exact_cover_fast_path_counts_weights() {
        // four separated points, uniform weights, delta = 0.25 -> 3 balls
        let prior = DiracMixture::uniform(vec![
            vec![0.0, 0.0],
            vec![10.0, 0.0],
            vec![0.0, 10.0],
            vec![10.0, 10.0],
        ])
        .unwrap();
        assert_eq!(exact_cover_dirac(&prior, 1.0, 0.25).unwrap(), 3);
        assert_eq!(exact_cover_dirac(&prior, 1.0, 0.0).unwrap(), 4);
    }

    #[test]
    fn exact_cover_line_instance() {
        let prior = DiracMixture::uniform(vec![vec![0.0], vec![1.0], vec![2.5]]).unwrap();
        assert_eq!(exact_cover_dirac(&prior, 1.0, 0.0).unwrap(), 2);
    }

    #[test]
    fn exact_cover_rejects_large_instances() {
        let pts: Vec<Vec<f64>> = (0..23).map(|i| vec![i as f64 * 10.0]).collect();
        let prior = DiracMixture::uniform(pts).unwrap();
        assert!(exact_cover_dirac(&prior, 1.0, 0.0).is_err());
    }

    #[test]
    fn analytic_lipschitz_pinned() {
        assert_eq!(analytic_cov_lipschitz(5, 0.0, 1.0, 0.5).unwrap(), 0.0);
        // k=1, L=1, eta=2, delta=e^{-1/2}: t = 2, bound = log 3
        let v = analytic_cov_lipschitz(1, 1.0, 2.0, (-0.5f64).exp()).unwrap();
        assert!((v - (3.0f64).ln()).abs() < 1e-12);
        assert!(analytic_cov_lipschitz(1, 1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn analytic_lipschitz_monotone() {
        let base = analytic_cov_lipschitz(4, 2.0, 1.0, 0.1).unwrap();
        assert!(analytic_cov_lipschitz(4, 3.0, 1.0, 0.1).unwrap() >= base);
        assert!(analytic_cov_lipschitz(4, 2.0, 0.5, 0.1).unwrap() >= base);
    }

    #[test]
    fn analytic_sparse_pinned() {
        // s = n: first addend is n log e = n
        let v = analytic_cov_sparse(6, 6, 1e12, 0.999_999).unwrap();
        assert!((v - 6.0).abs() < 1e-4);

        // n=16, s=2, eta=2 sqrt 2, delta=e^{-1}: 2 [log(8e) + log 3]
        let v = analytic_cov_sparse(16, 2, 2.0 * (2.0f64).sqrt(), (-1.0f64).exp()).unwrap();
        let want = 2.0 * ((8.0 * core::f64::consts::E).ln() + (3.0f64).ln());
        assert!((v - want).abs() < 1e-12);

        // nondecreasing in n for fixed s
        let mut prev = 0.0;
        for n in 4..40 {
            let v = analytic_cov_sparse(n, 4, 1.0, 0.1).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn analytic_gaussian_pinned_and_consistent() {
        assert_eq!(analytic_cov_gaussian(7, 0.0, 1.0, 0.5).unwrap(), 0.0);
        // n=1, sigma=1, eta=4, delta=e^{-1/2}: log 2
        let v = analytic_cov_gaussian(1, 1.0, 4.0, (-0.5f64).exp()).unwrap();
        assert!((v - (2.0f64).ln()).abs() < 1e-12);
        // identity map consistency with the Lipschitz bound
        for &(k, eta, delta) in &[(3usize, 0.7, 0.2), (9, 2.0, 0.05)] {
            let a = analytic_cov_lipschitz(k, 1.0, eta, delta).unwrap();
            let b = analytic_cov_gaussian(k, 1.0, eta, delta).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mixture_bound_is_sum() {
        assert_eq!(mixture_cov_bound(&[5]).unwrap(), 5);
        assert_eq!(mixture_cov_bound(&[2, 3]).unwrap(), 5);
        assert!(mixture_cov_bound(&[]).is_err());
    }

    #[test]
    fn mixture_bound_dominates_exact_two_component() {
        // two 3-point clusters; exact cover of the union never exceeds the
        // sum of per-component exact covers
        let comp1 = DiracMixture::uniform(vec![vec![0.0], vec![0.5], vec![1.0]]).unwrap();
        let comp2 = DiracMixture::uniform(vec![vec![20.0], vec![20.5], vec![21.0]]).unwrap();
        let mut points = comp1.points.clone();
        points.extend(comp2.points.clone());
        let mixed = DiracMixture::uniform(points).unwrap();
        let eta = 0.6;
        let whole = exact_cover_dirac(&mixed, eta, 0.0).unwrap();
        let parts = exact_cover_dirac(&comp1, eta, 0.0).unwrap()
            + exact_cover_dirac(&comp2, eta, 0.0).unwrap();
        assert!(whole as u64 <= mixture_cov_bound(&[parts as u64]).unwrap());
    }
}
