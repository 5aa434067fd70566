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

//! Posterior distributions under Gaussian measurement noise.
//!
//! Dirac-mixture priors give an exact categorical posterior with
//! `log w_i = log a_i - (m / 2 sigma^2) ||y - A x_i||^2`, normalized in log
//! space. Gaussian mixtures are conjugate: each component posterior is
//! Gaussian with precision `Lambda = I/tau^2 + (m/sigma^2) A^T A`. Priors
//! without a tractable posterior get self-normalized importance sampling
//! with the prior as proposal; that is a biased finite-N approximation and
//! is always reported with its effective sample size.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::invalid;
use crate::linalg::{dot, sub, Cholesky, DenseMatrix};
use crate::math;
use crate::noise::NoiseSpec;
use crate::operators::DrawnOperator;
use crate::priors::{sample_prior, DiracMixture, GaussianMixture, PriorSpec};
use crate::rng::{draw_gaussian, RandomStream};
use crate::Result;

/// log(sum(exp(v))) with max subtraction.
pub fn logsumexp(v: &[f64]) -> f64 {
    let max = v.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + math::ln(v.iter().map(|&x| math::exp(x - max)).sum())
}

fn normalize_log_weights(log_w: &mut [f64]) {
    let z = logsumexp(log_w);
    for w in log_w.iter_mut() {
        *w -= z;
    }
}

/// Exact posterior over a finite set of atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Categorical {
    pub points: Vec<Vec<f64>>,
    /// Normalized: logsumexp(log_weights) = 0.
    pub log_weights: Vec<f64>,
}

impl Categorical {
    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|&w| math::exp(w)).collect()
    }
}

/// Conjugate posterior for an isotropic Gaussian-mixture prior. All
/// components share one precision matrix `Lambda = I/tau^2 + (m/sigma^2) A^T A`.
#[derive(Debug, Clone)]
pub struct GaussianMixturePosterior {
    pub component_means: Vec<Vec<f64>>,
    pub log_weights: Vec<f64>,
    precision_chol: Cholesky,
}

impl GaussianMixturePosterior {
    /// Posterior covariance (shared by all components) as Lambda^{-1}.
    pub fn covariance(&self) -> DenseMatrix {
        let n = self.component_means[0].len();
        let mut cov = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = self.precision_chol.solve(&e);
            for i in 0..n {
                cov.set(i, j, col[i]);
            }
        }
        cov
    }
}

/// Self-normalized importance-sampling approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub particles: Vec<Vec<f64>>,
    pub log_weights: Vec<f64>,
    pub effective_sample_size: f64,
    /// Set when ESS < 2 (the approximation has degenerated to ~1 particle).
    pub degenerate: bool,
}

/// A posterior ready for sampling.
#[derive(Debug, Clone)]
pub enum PosteriorModel {
    Categorical(Categorical),
    GaussianMixture(GaussianMixturePosterior),
    Particle(Particle),
}

/// Exact posterior for a Dirac-mixture prior.
///
/// Stable in log space down to weight ratios around e^{-700}; beyond that
/// the exponential underflows to an exact zero, which is the correct limit.
pub fn posterior_dirac(
    prior: &DiracMixture,
    a: &DrawnOperator,
    y: &[f64],
    noise: &NoiseSpec,
) -> Result<Categorical> {
    if y.len() != a.q {
        return Err(invalid(
            "posterior_dirac: y must have the realized row count",
        ));
    }
    let gain = noise.m_nominal as f64 / (2.0 * noise.sigma * noise.sigma);
    let mut log_w = Vec::with_capacity(prior.points.len());
    for (x, &w) in prior.points.iter().zip(&prior.weights) {
        let r = sub(y, &a.apply(x)?);
        let log_prior = if w > 0.0 {
            math::ln(w)
        } else {
            f64::NEG_INFINITY
        };
        log_w.push(log_prior - gain * dot(&r, &r));
    }
    normalize_log_weights(&mut log_w);
    Ok(Categorical {
        points: prior.points.clone(),
        log_weights: log_w,
    })
}

/// Conjugate posterior for an isotropic Gaussian-mixture prior.
///
/// Component posterior: N(Lambda^{-1} (mu_i / tau^2 + (m/sigma^2) A^T y),
/// Lambda^{-1}). Mixture weight: a_i N(y; A mu_i, (sigma^2/m) I + tau^2 A A^T).
pub fn posterior_gaussian_mixture(
    prior: &GaussianMixture,
    a: &DrawnOperator,
    y: &[f64],
    noise: &NoiseSpec,
) -> Result<GaussianMixturePosterior> {
    if y.len() != a.q {
        return Err(invalid("posterior_gaussian_mixture: y dimension mismatch"));
    }
    let n = prior.dim();
    if a.n != n {
        return Err(invalid(
            "posterior_gaussian_mixture: operator dimension mismatch",
        ));
    }
    let m = noise.m_nominal as f64;
    let sigma2 = noise.sigma * noise.sigma;
    let tau2 = prior.tau * prior.tau;
    let dense = a.to_dense();

    // Lambda = I / tau^2 + (m / sigma^2) A^T A
    let mut lambda = dense.gram();
    for v in &mut lambda.data {
        *v *= m / sigma2;
    }
    for i in 0..n {
        lambda.data[i * n + i] += 1.0 / tau2;
    }
    let precision_chol = Cholesky::new(&lambda)?;

    // marginal covariance S = (sigma^2 / m) I_q + tau^2 A A^T
    let q = a.q;
    let mut s = DenseMatrix::zeros(q, q);
    for i in 0..q {
        for j in 0..q {
            s.set(i, j, tau2 * dot(dense.row(i), dense.row(j)));
        }
        s.data[i * q + i] += sigma2 / m;
    }
    let s_chol = Cholesky::new(&s)?;
    let log_norm = -0.5 * (q as f64 * math::ln(2.0 * core::f64::consts::PI) + s_chol.log_det());

    let aty = dense.matvec_transpose(y);
    let mut means = Vec::with_capacity(prior.means.len());
    let mut log_w = Vec::with_capacity(prior.means.len());
    for (mu, &w) in prior.means.iter().zip(&prior.weights) {
        let rhs: Vec<f64> = mu
            .iter()
            .zip(&aty)
            .map(|(mi, ai)| mi / tau2 + (m / sigma2) * ai)
            .collect();
        means.push(precision_chol.solve(&rhs));

        let resid = sub(y, &dense.matvec(mu));
        let half = s_chol.solve_lower(&resid);
        let quad = dot(&half, &half);
        let log_prior = if w > 0.0 {
            math::ln(w)
        } else {
            f64::NEG_INFINITY
        };
        log_w.push(log_prior + log_norm - 0.5 * quad);
    }
    normalize_log_weights(&mut log_w);
    Ok(GaussianMixturePosterior {
        component_means: means,
        log_weights: log_w,
        precision_chol,
    })
}

/// Self-normalized importance sampling with the prior as proposal.
///
/// Valid for any prior; used when no exact posterior is available
/// (sparse and generative priors). The result is a biased finite-N
/// approximation whose quality is summarized by the effective sample size
/// `1 / sum w_j^2`.
pub fn posterior_particles(
    prior: &PriorSpec,
    a: &DrawnOperator,
    y: &[f64],
    noise: &NoiseSpec,
    n_particles: usize,
    stream: &mut RandomStream,
) -> Result<Particle> {
    if n_particles < 2 {
        return Err(invalid("posterior_particles: n_particles must be >= 2"));
    }
    if y.len() != a.q {
        return Err(invalid("posterior_particles: y dimension mismatch"));
    }
    let gain = noise.m_nominal as f64 / (2.0 * noise.sigma * noise.sigma);
    let mut particles = Vec::with_capacity(n_particles);
    let mut log_w = Vec::with_capacity(n_particles);
    for _ in 0..n_particles {
        let x = sample_prior(prior, stream);
        let r = sub(y, &a.apply(&x)?);
        log_w.push(-gain * dot(&r, &r));
        particles.push(x);
    }
    normalize_log_weights(&mut log_w);
    let ess = 1.0 / log_w.iter().map(|&w| math::exp(2.0 * w)).sum::<f64>();
    Ok(Particle {
        particles,
        log_weights: log_w,
        effective_sample_size: ess,
        degenerate: ess < 2.0,
    })
}

fn sample_index_from_log_weights(log_w: &[f64], stream: &mut RandomStream) -> usize {
    let u = stream.next_f64();
    let mut acc = 0.0;
    for (i, &lw) in log_w.iter().enumerate() {
        acc += math::exp(lw);
        if u < acc {
            return i;
        }
    }
    log_w.len() - 1
}

/// One draw from the posterior.
pub fn sample_posterior(model: &PosteriorModel, stream: &mut RandomStream) -> Vec<f64> {
    match model {
        PosteriorModel::Categorical(c) => {
            c.points[sample_index_from_log_weights(&c.log_weights, stream)].clone()
        }
        PosteriorModel::GaussianMixture(g) => {
            let i = sample_index_from_log_weights(&g.log_weights, stream);
            let mean = &g.component_means[i];
            let mut z = draw_gaussian(stream, mean.len());
            // x = mean + L^{-T} z has covariance Lambda^{-1}
            g.precision_chol.solve_upper_in_place(&mut z);
            mean.iter().zip(&z).map(|(m, d)| m + d).collect()
        }
        PosteriorModel::Particle(p) => {
            p.particles[sample_index_from_log_weights(&p.log_weights, stream)].clone()
        }
    }
}
