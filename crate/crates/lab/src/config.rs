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

//! The JSON experiment-config schema (version 1) and its validation.
//!
//! Parsing is strict: unknown keys are rejected, the `schema` field is
//! required, and every invariant violation is reported with the JSON
//! pointer path of the offending field.

use brl_core::operators::{Basis, OperatorSpec, SubgaussianKind};
use brl_core::priors::{
    DiracMixture, GaussianMixture, GenerativePushforward, PerturbedPrior, PriorSpec, SparseGaussian,
};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorConfig {
    DiracMixture {
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
    GaussianMixture {
        means: Vec<Vec<f64>>,
        tau: f64,
        weights: Vec<f64>,
    },
    SparseGaussian {
        n: usize,
        s: usize,
    },
    GenerativePushforward {
        latent_dim: usize,
        widths: Vec<usize>,
        weight_seed: u64,
        activation: Activation,
    },
    PerturbedPrior {
        base: Box<PriorConfig>,
        offsets: Vec<Vec<f64>>,
        eps: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorConfig {
    Subgaussian { kind: KindConfig },
    SubsampledOrthogonal { basis: BasisConfig },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindConfig {
    Gaussian,
    Rademacher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisConfig {
    Identity,
    Hadamard,
    Dct,
}

impl BasisConfig {
    pub fn to_core(self) -> Basis {
        match self {
            BasisConfig::Identity => Basis::Identity,
            BasisConfig::Hadamard => Basis::Hadamard,
            BasisConfig::Dct => Basis::Dct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum PosteriorModeConfig {
    Exact,
    Particles { n_particles: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundModeConfig {
    None,
    TheoremMain {
        delta: f64,
        #[serde(default = "default_c_prime")]
        c_prime: f64,
        #[serde(default = "default_t")]
        t: f64,
    },
    Simplified {
        delta: f64,
        d: f64,
    },
}

fn default_c_prime() -> f64 {
    2.0
}

fn default_t() -> f64 {
    2.0
}

/// The raw on-disk config. `validate` turns it into core-typed pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub schema: u32,
    pub real_prior: PriorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_prior: Option<PriorConfig>,
    pub operator: OperatorConfig,
    pub sigma: f64,
    pub m_values: Vec<usize>,
    pub threshold_factor: f64,
    pub eta: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub posterior_mode: PosteriorModeConfig,
    pub bound_mode: BoundModeConfig,
}

/// A validated experiment configuration with core-typed fields.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub raw: RawConfig,
    pub real_prior: PriorSpec,
    pub model_prior: PriorSpec,
    pub operator: OperatorSpec,
    pub sigma: f64,
    pub m_values: Vec<usize>,
    pub threshold_factor: f64,
    pub eta: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub posterior_mode: PosteriorModeConfig,
    pub bound_mode: BoundModeConfig,
}

fn bad(path: &str, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("{path}: {msg}"))
}

fn build_prior(cfg: &PriorConfig, path: &str) -> Result<PriorSpec, HarnessError> {
    match cfg {
        PriorConfig::DiracMixture { points, weights } => {
            check_weight_block(weights, path)?;
            DiracMixture::new(points.clone(), weights.clone())
                .map(PriorSpec::DiracMixture)
                .map_err(|e| bad(path, e))
        }
        PriorConfig::GaussianMixture {
            means,
            tau,
            weights,
        } => {
            check_weight_block(weights, path)?;
            GaussianMixture::new(means.clone(), *tau, weights.clone())
                .map(PriorSpec::GaussianMixture)
                .map_err(|e| bad(path, e))
        }
        PriorConfig::SparseGaussian { n, s } => SparseGaussian::new(*n, *s)
            .map(PriorSpec::SparseGaussian)
            .map_err(|e| bad(path, e)),
        PriorConfig::GenerativePushforward {
            latent_dim,
            widths,
            weight_seed,
            activation,
        } => {
            let Activation::Tanh = activation;
            GenerativePushforward::new(*latent_dim, widths.clone(), *weight_seed)
                .map(PriorSpec::GenerativePushforward)
                .map_err(|e| bad(path, e))
        }
        PriorConfig::PerturbedPrior { base, offsets, eps } => {
            let base_path = format!("{path}/base");
            let base_spec = build_prior(base, &base_path)?;
            let PriorSpec::DiracMixture(dirac) = base_spec else {
                return Err(bad(
                    &base_path,
                    "perturbed_prior base must be a dirac_mixture",
                ));
            };
            PerturbedPrior::new(dirac, offsets.clone(), *eps)
                .map(PriorSpec::PerturbedPrior)
                .map_err(|e| bad(&format!("{path}/offsets"), e))
        }
    }
}

fn check_weight_block(weights: &[f64], path: &str) -> Result<(), HarnessError> {
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(bad(
            &format!("{path}/weights"),
            format!("weights must sum to 1 (residual {:+e})", sum - 1.0),
        ));
    }
    if weights.iter().any(|&w| w < 0.0) {
        return Err(bad(
            &format!("{path}/weights"),
            "weights must be nonnegative",
        ));
    }
    Ok(())
}

fn build_operator(cfg: &OperatorConfig) -> OperatorSpec {
    match cfg {
        OperatorConfig::Subgaussian { kind } => OperatorSpec::Subgaussian {
            kind: match kind {
                KindConfig::Gaussian => SubgaussianKind::Gaussian,
                KindConfig::Rademacher => SubgaussianKind::Rademacher,
            },
        },
        OperatorConfig::SubsampledOrthogonal { basis } => OperatorSpec::SubsampledOrthogonal {
            basis: basis.to_core(),
        },
    }
}

/// Builds a core prior from a standalone prior document (used by the
/// `cover` and `coherence` subcommands).
pub fn build_prior_standalone(cfg: &PriorConfig) -> Result<PriorSpec, HarnessError> {
    build_prior(cfg, "")
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let raw: RawConfig = serde_json::from_str(text)
        .map_err(|e| HarnessError::Config(format!("config does not match schema: {e}")))?;
    validate(raw)
}

pub fn validate(raw: RawConfig) -> Result<ExperimentConfig, HarnessError> {
    if raw.schema != SCHEMA_VERSION {
        return Err(bad(
            "/schema",
            format!("unsupported schema version {}", raw.schema),
        ));
    }
    let real_prior = build_prior(&raw.real_prior, "/real_prior")?;
    let model_prior = match &raw.model_prior {
        Some(p) => build_prior(p, "/model_prior")?,
        None => real_prior.clone(),
    };
    if real_prior.dim() != model_prior.dim() {
        return Err(bad(
            "/model_prior",
            "real and model priors must share one dimension",
        ));
    }
    if !(raw.sigma > 0.0) {
        return Err(bad("/sigma", "sigma must be > 0"));
    }
    if raw.m_values.is_empty() {
        return Err(bad("/m_values", "at least one m required"));
    }
    if raw.m_values.contains(&0) {
        return Err(bad("/m_values", "every m must be >= 1"));
    }
    if !(raw.threshold_factor > 0.0) {
        return Err(bad("/threshold_factor", "threshold_factor must be > 0"));
    }
    if !(raw.eta > 0.0) {
        return Err(bad("/eta", "eta must be > 0"));
    }
    if raw.trials == 0 {
        return Err(bad("/trials", "trials must be >= 1"));
    }
    if let PosteriorModeConfig::Particles { n_particles } = raw.posterior_mode {
        if n_particles < 2 {
            return Err(bad(
                "/posterior_mode/n_particles",
                "need at least 2 particles",
            ));
        }
    }
    if let PosteriorModeConfig::Exact = raw.posterior_mode {
        let supported = matches!(
            model_prior,
            PriorSpec::DiracMixture(_)
                | PriorSpec::GaussianMixture(_)
                | PriorSpec::PerturbedPrior(_)
        );
        if !supported {
            return Err(bad(
                "/posterior_mode",
                "exact mode requires a dirac_mixture, gaussian_mixture or perturbed_prior model prior",
            ));
        }
    }
    match raw.bound_mode {
        BoundModeConfig::TheoremMain { delta, c_prime, t } => {
            if !(delta > 0.0 && delta <= 0.25) {
                return Err(bad("/bound_mode/delta", "delta must be in (0, 1/4]"));
            }
            if !(c_prime >= 1.0) {
                return Err(bad("/bound_mode/c_prime", "c_prime must be >= 1"));
            }
            if !(t > 0.0) {
                return Err(bad("/bound_mode/t", "t must be > 0"));
            }
            if !(raw.threshold_factor >= 3.0) {
                return Err(bad(
                    "/threshold_factor",
                    "theorem_main needs threshold_factor = c + 2 with c >= 1",
                ));
            }
        }
        BoundModeConfig::Simplified { delta, d } => {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(bad("/bound_mode/delta", "delta must be in (0, 1)"));
            }
            if !(d >= 2.0) {
                return Err(bad("/bound_mode/d", "d must be >= 2"));
            }
        }
        BoundModeConfig::None => {}
    }
    let operator = build_operator(&raw.operator);
    Ok(ExperimentConfig {
        real_prior,
        model_prior,
        operator,
        sigma: raw.sigma,
        m_values: raw.m_values.clone(),
        threshold_factor: raw.threshold_factor,
        eta: raw.eta,
        trials: raw.trials,
        master_seed: raw.master_seed,
        posterior_mode: raw.posterior_mode,
        bound_mode: raw.bound_mode,
        raw,
    })
}

#[cfg(test)]
pub(crate) fn parse_raw_for_tests() -> RawConfig {
    RawConfig {
        schema: 1,
        real_prior: PriorConfig::DiracMixture {
            points: vec![vec![0.0]],
            weights: vec![1.0],
        },
        model_prior: None,
        operator: OperatorConfig::SubsampledOrthogonal {
            basis: BasisConfig::Identity,
        },
        sigma: 0.1,
        m_values: vec![1],
        threshold_factor: 34.0,
        eta: 0.05,
        trials: 1,
        master_seed: 42,
        posterior_mode: PosteriorModeConfig::Exact,
        bound_mode: BoundModeConfig::None,
    }
}
