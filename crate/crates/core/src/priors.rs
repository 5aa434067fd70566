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

//! Declarative prior distributions on R^n with samplers and closeness
//! certificates.
//!
//! A `PriorSpec` is immutable after construction and sampling is a pure
//! function of `(spec, stream)`. The perturbed variant carries an explicit
//! identity coupling with its base mixture, which certifies
//! `W_inf(base, perturbed) <= eps` and hence `W_p <= eps` for every p.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::invalid;
use crate::linalg::{norm, spectral_norm, sub, DenseMatrix};
use crate::math;
use crate::rng::{draw_gaussian, RandomStream};
use crate::Result;

const WEIGHT_SUM_TOL: f64 = 1e-12;

fn check_weights(weights: &[f64], what: &str) -> Result<()> {
    if weights.iter().any(|&w| w < 0.0) {
        return Err(invalid(alloc::format!(
            "{what}: weights must be nonnegative"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if math::abs(sum - 1.0) > WEIGHT_SUM_TOL {
        return Err(invalid(alloc::format!(
            "{what}: weights must sum to 1 (residual {:e})",
            sum - 1.0
        )));
    }
    Ok(())
}

fn check_uniform_dim(points: &[Vec<f64>], what: &str) -> Result<usize> {
    let Some(first) = points.first() else {
        return Err(invalid(alloc::format!("{what}: needs at least one point")));
    };
    let n = first.len();
    if n == 0 {
        return Err(invalid(alloc::format!(
            "{what}: points must be nonempty vectors"
        )));
    }
    for p in points {
        if p.len() != n {
            return Err(invalid(alloc::format!(
                "{what}: points must share one dimension"
            )));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(invalid(alloc::format!("{what}: entries must be finite")));
        }
    }
    Ok(n)
}

/// Finitely supported mixture of point masses.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracMixture {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl DiracMixture {
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let _ = check_uniform_dim(&points, "DiracMixture")?;
        if points.len() != weights.len() {
            return Err(invalid("DiracMixture: one weight per point required"));
        }
        check_weights(&weights, "DiracMixture")?;
        Ok(DiracMixture { points, weights })
    }

    /// Uniform mixture over the given points.
    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        let weights = vec![w; points.len()];
        Self::new(points, weights)
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Smallest pairwise distance between support points.
    pub fn min_separation(&self) -> Result<f64> {
        if self.points.len() < 2 {
            return Err(invalid("min_separation: needs at least 2 points"));
        }
        let mut best = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                best = best.min(norm(&sub(&self.points[i], &self.points[j])));
            }
        }
        Ok(best)
    }

    pub(crate) fn sample_index(&self, stream: &mut RandomStream) -> usize {
        let u = stream.next_f64();
        let mut acc = 0.0;
        for (i, &w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        self.weights.len() - 1
    }
}

/// Isotropic Gaussian mixture with shared component std `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    pub means: Vec<Vec<f64>>,
    pub tau: f64,
    pub weights: Vec<f64>,
}

impl GaussianMixture {
    pub fn new(means: Vec<Vec<f64>>, tau: f64, weights: Vec<f64>) -> Result<Self> {
        let _ = check_uniform_dim(&means, "GaussianMixture")?;
        if means.len() != weights.len() {
            return Err(invalid("GaussianMixture: one weight per mean required"));
        }
        check_weights(&weights, "GaussianMixture")?;
        if !(tau > 0.0) {
            return Err(invalid("GaussianMixture: tau must be > 0"));
        }
        Ok(GaussianMixture {
            means,
            tau,
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.means[0].len()
    }
}

/// Uniformly random size-s support with i.i.d. standard normal values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparseGaussian {
    pub n: usize,
    pub s: usize,
}

impl SparseGaussian {
    pub fn new(n: usize, s: usize) -> Result<Self> {
        if s == 0 || s > n {
            return Err(invalid("SparseGaussian: need 1 <= s <= n"));
        }
        Ok(SparseGaussian { n, s })
    }

    /// Uniform size-s subset of 0..n by partial Fisher-Yates, returned sorted.
    pub fn sample_support(&self, stream: &mut RandomStream) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n).collect();
        for i in 0..self.s {
            let j = i + stream.next_below((self.n - i) as u64) as usize;
            idx.swap(i, j);
        }
        let mut support = idx[..self.s].to_vec();
        support.sort_unstable();
        support
    }
}

/// Pushforward of N(0, I_k) through a fixed-seed random-weight tanh network.
///
/// Layers are linear maps with tanh applied between them (the final layer is
/// linear), so a single-layer spec is a plain linear map. Weights are i.i.d.
/// N(0, 1/fan_in) materialized deterministically from `weight_seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerativePushforward {
    pub latent_dim: usize,
    pub widths: Vec<usize>,
    pub weight_seed: u64,
}

impl GenerativePushforward {
    pub fn new(latent_dim: usize, widths: Vec<usize>, weight_seed: u64) -> Result<Self> {
        if latent_dim == 0 {
            return Err(invalid("GenerativePushforward: latent_dim must be >= 1"));
        }
        if widths.is_empty() || widths.contains(&0) {
            return Err(invalid(
                "GenerativePushforward: widths must be nonempty and positive",
            ));
        }
        Ok(GenerativePushforward {
            latent_dim,
            widths,
            weight_seed,
        })
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().unwrap()
    }

    pub fn materialize(&self) -> GenerativeNet {
        let mut layers = Vec::with_capacity(self.widths.len());
        let mut fan_in = self.latent_dim;
        for (l, &width) in self.widths.iter().enumerate() {
            let mut stream = RandomStream::derive(self.weight_seed, &[l as u64]);
            let std = 1.0 / math::sqrt(fan_in as f64);
            let mut w = DenseMatrix::zeros(width, fan_in);
            for v in &mut w.data {
                *v = std * stream.next_gaussian();
            }
            layers.push(w);
            fan_in = width;
        }
        GenerativeNet { layers }
    }
}

/// A materialized network: linear layers with tanh between them.
#[derive(Debug, Clone)]
pub struct GenerativeNet {
    pub layers: Vec<DenseMatrix>,
}

impl GenerativeNet {
    pub fn from_layers(layers: Vec<DenseMatrix>) -> Self {
        GenerativeNet { layers }
    }

    pub fn forward(&self, z: &[f64]) -> Vec<f64> {
        let last = self.layers.len() - 1;
        let mut h = z.to_vec();
        for (l, w) in self.layers.iter().enumerate() {
            h = w.matvec(&h);
            if l < last {
                for x in &mut h {
                    *x = math::tanh(*x);
                }
            }
        }
        h
    }

    /// Product of per-layer spectral norms; a valid Lipschitz constant since
    /// tanh is 1-Lipschitz coordinatewise.
    pub fn lipschitz_bound(&self) -> Result<f64> {
        let mut prod = 1.0;
        for w in &self.layers {
            prod *= spectral_norm(w)?;
        }
        Ok(prod)
    }
}

/// Product of per-layer spectral norms of the materialized network.
pub fn lipschitz_bound(spec: &GenerativePushforward) -> Result<f64> {
    spec.materialize().lipschitz_bound()
}

/// A Dirac mixture whose every atom is shifted by a bounded offset.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedPrior {
    pub base: DiracMixture,
    pub offsets: Vec<Vec<f64>>,
    pub eps: f64,
}

impl PerturbedPrior {
    pub fn new(base: DiracMixture, offsets: Vec<Vec<f64>>, eps: f64) -> Result<Self> {
        if eps < 0.0 {
            return Err(invalid("PerturbedPrior: eps must be >= 0"));
        }
        if offsets.len() != base.points.len() {
            return Err(invalid(
                "PerturbedPrior: one offset per base point required",
            ));
        }
        for off in &offsets {
            if off.len() != base.dim() {
                return Err(invalid("PerturbedPrior: offset dimension mismatch"));
            }
            if norm(off) > eps {
                return Err(invalid(alloc::format!(
                    "PerturbedPrior: offset norm {} exceeds eps {}",
                    norm(off),
                    eps
                )));
            }
        }
        Ok(PerturbedPrior { base, offsets, eps })
    }

    /// Upper bound on W_inf(base, perturbed) via the identity coupling:
    /// the largest offset norm.
    pub fn wasserstein_infty_certificate(&self) -> f64 {
        self.offsets
            .iter()
            .fold(0.0f64, |acc, off| acc.max(norm(off)))
    }

    /// The perturbed mixture as an explicit Dirac mixture.
    pub fn materialize(&self) -> DiracMixture {
        let points = self
            .base
            .points
            .iter()
            .zip(&self.offsets)
            .map(|(p, o)| p.iter().zip(o).map(|(a, b)| a + b).collect())
            .collect();
        DiracMixture {
            points,
            weights: self.base.weights.clone(),
        }
    }

    /// Draws the coupled pair `(base point, perturbed point)` from one
    /// categorical draw. This is the coupling behind the W_inf certificate.
    pub fn sample_coupled(&self, stream: &mut RandomStream) -> (Vec<f64>, Vec<f64>) {
        let i = self.base.sample_index(stream);
        let base = self.base.points[i].clone();
        let pert = base
            .iter()
            .zip(&self.offsets[i])
            .map(|(a, b)| a + b)
            .collect();
        (base, pert)
    }
}

/// A declarative signal distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorSpec {
    DiracMixture(DiracMixture),
    GaussianMixture(GaussianMixture),
    SparseGaussian(SparseGaussian),
    GenerativePushforward(GenerativePushforward),
    PerturbedPrior(PerturbedPrior),
}

impl PriorSpec {
    /// Ambient dimension of samples.
    pub fn dim(&self) -> usize {
        match self {
            PriorSpec::DiracMixture(d) => d.dim(),
            PriorSpec::GaussianMixture(g) => g.dim(),
            PriorSpec::SparseGaussian(s) => s.n,
            PriorSpec::GenerativePushforward(g) => g.output_dim(),
            PriorSpec::PerturbedPrior(p) => p.base.dim(),
        }
    }
}

/// One draw from the prior.
pub fn sample_prior(spec: &PriorSpec, stream: &mut RandomStream) -> Vec<f64> {
    match spec {
        PriorSpec::DiracMixture(d) => d.points[d.sample_index(stream)].clone(),
        PriorSpec::GaussianMixture(g) => {
            let comp = DiracMixture {
                points: g.means.clone(),
                weights: g.weights.clone(),
            }
            .sample_index(stream);
            let noise = draw_gaussian(stream, g.dim());
            g.means[comp]
                .iter()
                .zip(&noise)
                .map(|(m, z)| m + g.tau * z)
                .collect()
        }
        PriorSpec::SparseGaussian(s) => {
            let support = s.sample_support(stream);
            let values = draw_gaussian(stream, s.s);
            let mut x = vec![0.0; s.n];
            for (idx, v) in support.into_iter().zip(values) {
                x[idx] = v;
            }
            x
        }
        PriorSpec::GenerativePushforward(g) => {
            let z = draw_gaussian(stream, g.latent_dim);
            g.materialize().forward(&z)
        }
        PriorSpec::PerturbedPrior(p) => p.sample_coupled(stream).1,
    }
}
