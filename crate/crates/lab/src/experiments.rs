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

//! The end-to-end Monte Carlo harness.
//!
//! One trial draws the true signal, the operator and the noise from streams
//! keyed by `(master_seed, m, trial, role)`, forms y = A x* + e, samples
//! x_hat from the posterior of the model prior and records whether the
//! error exceeds `threshold_factor (eta + sigma)`. Trials are independent,
//! run in parallel, and aggregate to the same report no matter how many
//! threads execute them.

use brl_core::bounds::{theorem_main_bound, theorem_simplified_expression, BoundInputs};
use brl_core::covering::{
    analytic_cov_gaussian, analytic_cov_lipschitz, analytic_cov_sparse, exact_cover_dirac,
};
use brl_core::linalg::{norm, sub};
use brl_core::noise::NoiseSpec;
use brl_core::operators::{
    coherence_dirac, coherence_sparse, draw_operator, OperatorSpec, SubgaussianKind,
};
use brl_core::posterior::{
    posterior_dirac, posterior_gaussian_mixture, posterior_particles, sample_posterior,
    PosteriorModel,
};
use brl_core::priors::{lipschitz_bound, sample_prior, PriorSpec};
use brl_core::rng::RandomStream;
use brl_core::special::chi_square_cdf;
use rayon::prelude::*;

use crate::config::{BoundModeConfig, ExperimentConfig, PosteriorModeConfig};
use crate::report::{ExperimentReport, MRow};
use crate::HarnessError;

// stream roles, one independent stream per kind of randomness in a trial
const ROLE_PRIOR: u64 = 0;
const ROLE_OPERATOR: u64 = 1;
const ROLE_NOISE: u64 = 2;
const ROLE_POSTERIOR: u64 = 3;

fn trial_stream(seed: u64, m: usize, trial: u64, role: u64) -> RandomStream {
    RandomStream::derive(seed, &[m as u64, trial, role])
}

/// Outcome of a single trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub error_norm: f64,
    pub failed: bool,
    pub q: usize,
    pub resampled: bool,
    /// Distance between the real draw and its coupled model point, when the
    /// real prior is a perturbation of the model prior.
    pub coupling_dist: Option<f64>,
}

/// Runs one trial at the given measurement count.
pub fn run_trial(
    config: &ExperimentConfig,
    m: usize,
    trial_index: u64,
) -> Result<TrialOutcome, HarnessError> {
    let seed = config.master_seed;
    let mut prior_stream = trial_stream(seed, m, trial_index, ROLE_PRIOR);
    let mut op_stream = trial_stream(seed, m, trial_index, ROLE_OPERATOR);
    let mut noise_stream = trial_stream(seed, m, trial_index, ROLE_NOISE);
    let mut post_stream = trial_stream(seed, m, trial_index, ROLE_POSTERIOR);

    // the perturbed real prior shares its categorical draw with the model
    // point, realizing the W_inf coupling
    let (x_star, coupling_dist) = match &config.real_prior {
        PriorSpec::PerturbedPrior(p) => {
            let (base, pert) = p.sample_coupled(&mut prior_stream);
            let dist = norm(&sub(&base, &pert));
            (pert, Some(dist))
        }
        other => (sample_prior(other, &mut prior_stream), None),
    };

    let n = config.real_prior.dim();
    let op = draw_operator(&config.operator, m, n, &mut op_stream)?;
    let noise = NoiseSpec::new(config.sigma, m as u32)?;
    let e = noise.draw(op.q, &mut noise_stream);
    let y: Vec<f64> = op
        .apply(&x_star)?
        .iter()
        .zip(&e)
        .map(|(a, b)| a + b)
        .collect();

    let model = match config.posterior_mode {
        PosteriorModeConfig::Exact => match &config.model_prior {
            PriorSpec::DiracMixture(d) => {
                PosteriorModel::Categorical(posterior_dirac(d, &op, &y, &noise)?)
            }
            PriorSpec::PerturbedPrior(p) => {
                PosteriorModel::Categorical(posterior_dirac(&p.materialize(), &op, &y, &noise)?)
            }
            PriorSpec::GaussianMixture(g) => {
                PosteriorModel::GaussianMixture(posterior_gaussian_mixture(g, &op, &y, &noise)?)
            }
            other => {
                return Err(HarnessError::Config(format!(
                    "exact posterior mode does not support this prior: {other:?}"
                )))
            }
        },
        PosteriorModeConfig::Particles { n_particles } => {
            PosteriorModel::Particle(posterior_particles(
                &config.model_prior,
                &op,
                &y,
                &noise,
                n_particles,
                &mut post_stream,
            )?)
        }
    };
    let x_hat = sample_posterior(&model, &mut post_stream);

    let error_norm = norm(&sub(&x_star, &x_hat));
    let threshold = config.threshold_factor * (config.eta + config.sigma);
    Ok(TrialOutcome {
        error_norm,
        failed: error_norm >= threshold,
        q: op.q,
        resampled: op.resampled,
        coupling_dist,
    })
}

/// Runs the full sweep over `m_values`, in parallel over trials.
pub fn run_sweep(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    let threshold = config.threshold_factor * (config.eta + config.sigma);
    let subsampled = matches!(config.operator, OperatorSpec::SubsampledOrthogonal { .. });
    let mut rows = Vec::with_capacity(config.m_values.len());
    for &m in &config.m_values {
        let outcomes: Result<Vec<TrialOutcome>, HarnessError> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                run_trial(config, m, trial).map_err(|e| HarnessError::Trial {
                    m,
                    trial,
                    source: Box::new(e),
                })
            })
            .collect();
        let outcomes = outcomes?;
        let failures = outcomes.iter().filter(|o| o.failed).count() as u64;
        let resampled_draws = outcomes.iter().filter(|o| o.resampled).count() as u64;
        let q_sum: u64 = outcomes.iter().map(|o| o.q as u64).sum();
        let p_hat = failures as f64 / config.trials as f64;
        let (wilson_low, wilson_high) = wilson_interval(failures, config.trials, 1.96)?;
        let bound_total = bound_total(config, m)?;
        rows.push(MRow {
            m: m as u64,
            trials: config.trials,
            failures,
            p_hat,
            wilson_low,
            wilson_high,
            bound_total,
            threshold,
            mean_q: if subsampled {
                Some(q_sum as f64 / config.trials as f64)
            } else {
                None
            },
            resampled_draws,
            seed: config.master_seed,
        });
    }
    Ok(ExperimentReport {
        schema: 1,
        config: config.raw.clone(),
        rows,
    })
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> Result<(f64, f64), HarnessError> {
    if trials == 0 || failures > trials {
        return Err(HarnessError::Config(
            "wilson_interval: need trials >= 1 and failures <= trials".into(),
        ));
    }
    if !(z > 0.0) {
        return Err(HarnessError::Config(
            "wilson_interval: z must be > 0".into(),
        ));
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

/// Log approximate covering number of a prior at (eta, delta), by the
/// tightest route available for its family.
pub fn log_cover_budget(prior: &PriorSpec, eta: f64, delta: f64) -> Result<f64, HarnessError> {
    match prior {
        PriorSpec::DiracMixture(d) => {
            let count = exact_cover_dirac(d, eta, delta)?;
            Ok((count as f64).ln())
        }
        PriorSpec::PerturbedPrior(p) => {
            let count = exact_cover_dirac(&p.materialize(), eta, delta)?;
            Ok((count as f64).ln())
        }
        PriorSpec::SparseGaussian(s) => Ok(analytic_cov_sparse(s.n, s.s, eta, delta)?),
        PriorSpec::GaussianMixture(g) => {
            // mixture bound: sum of identical per-component covers
            let per = analytic_cov_gaussian(g.dim(), g.tau, eta, delta)?;
            Ok((g.means.len() as f64).ln() + per)
        }
        PriorSpec::GenerativePushforward(g) => {
            let l = lipschitz_bound(g)?;
            Ok(analytic_cov_lipschitz(g.latent_dim, l, eta, delta)?)
        }
    }
}

/// Wasserstein budget between the configured real and model priors: zero
/// when they coincide, the explicit coupling certificate when the real
/// prior perturbs the model prior. Anything else has no certificate.
fn wasserstein_budget(config: &ExperimentConfig) -> Result<f64, HarnessError> {
    if config.real_prior == config.model_prior {
        return Ok(0.0);
    }
    if let PriorSpec::PerturbedPrior(p) = &config.real_prior {
        if PriorSpec::DiracMixture(p.base.clone()) == config.model_prior {
            return Ok(p.wasserstein_infty_certificate());
        }
    }
    Err(HarnessError::Config(
        "bound evaluation needs model_prior == real_prior or a perturbed real prior over the model prior"
            .into(),
    ))
}

/// Coherence of the operator's basis relative to the model prior's
/// difference set, exact for finite and sparse supports.
fn coherence_for(
    config: &ExperimentConfig,
    basis: brl_core::operators::Basis,
) -> Result<f64, HarnessError> {
    let n = config.model_prior.dim();
    match &config.model_prior {
        PriorSpec::DiracMixture(d) => Ok(coherence_dirac(basis, &d.points)?),
        PriorSpec::PerturbedPrior(p) => Ok(coherence_dirac(basis, &p.materialize().points)?),
        PriorSpec::SparseGaussian(s) => Ok(coherence_sparse(basis, n, s.s)?),
        _ => Err(HarnessError::Config(
            "no exact coherence available for this prior family".into(),
        )),
    }
}

/// The assembled bound value for one m, when a bound mode is configured.
pub fn bound_total(config: &ExperimentConfig, m: usize) -> Result<Option<f64>, HarnessError> {
    match config.bound_mode {
        BoundModeConfig::None => Ok(None),
        BoundModeConfig::TheoremMain { .. } => Ok(Some(main_bound_breakdown(config, m)?.total)),
        BoundModeConfig::Simplified { delta, d } => {
            let (c_low, c_upp) = concentration_pair(config, m, 1.0 / d, d)?;
            let cov = log_cover_budget(&config.model_prior, config.eta, delta)?.exp();
            Ok(Some(theorem_simplified_expression(
                d,
                config.eta,
                config.sigma,
                delta,
                cov,
                c_low,
                c_upp,
                m as u32,
            )?))
        }
    }
}

/// Lower/upper concentration constants at the given thresholds, exact for
/// Gaussian operators and Bernstein-bounded for subsampled ones.
fn concentration_pair(
    config: &ExperimentConfig,
    m: usize,
    t_low: f64,
    t_upp: f64,
) -> Result<(f64, f64), HarnessError> {
    match config.operator {
        OperatorSpec::Subgaussian {
            kind: SubgaussianKind::Gaussian,
        } => {
            let c_low = chi_square_cdf(m as f64 * t_low * t_low, m as u32)?;
            let c_upp = 1.0 - chi_square_cdf(m as f64 * t_upp * t_upp, m as u32)?;
            Ok((c_low, c_upp))
        }
        OperatorSpec::Subgaussian {
            kind: SubgaussianKind::Rademacher,
        } => Err(HarnessError::Config(
            "no explicit concentration constants for rademacher operators".into(),
        )),
        OperatorSpec::SubsampledOrthogonal { basis } => {
            // mu(U; D) >= 1 holds for any orthogonal U; roundoff can dip a
            // single-pair value just below it
            let mu = coherence_for(config, basis)?.max(1.0);
            let c_low = if t_low < 1.0 {
                brl_core::concentration::bernstein_orthog_bound(
                    t_low,
                    m as u32,
                    mu,
                    brl_core::concentration::Side::Low,
                )?
                .value
            } else {
                1.0
            };
            let c_upp = if t_upp > 1.0 {
                brl_core::concentration::bernstein_orthog_bound(
                    t_upp,
                    m as u32,
                    mu,
                    brl_core::concentration::Side::Upp,
                )?
                .value
            } else {
                1.0
            };
            Ok((c_low, c_upp))
        }
    }
}

/// Assembles the fully explicit main bound for one m.
pub fn main_bound_breakdown(
    config: &ExperimentConfig,
    m: usize,
) -> Result<brl_core::bounds::BoundBreakdown, HarnessError> {
    let BoundModeConfig::TheoremMain { delta, c_prime, t } = config.bound_mode else {
        return Err(HarnessError::Config(
            "bound_mode is not theorem_main".into(),
        ));
    };
    let c = config.threshold_factor - 2.0;
    let eps = wasserstein_budget(config)?;
    let inputs = BoundInputs {
        delta,
        eps,
        p_order: f64::INFINITY,
        eta: config.eta,
        sigma: config.sigma,
        c,
        c_prime,
        t,
        k: log_cover_budget(&config.model_prior, config.eta, delta)?,
        m: m as u32,
    };
    let noise = NoiseSpec::new(config.sigma, m as u32)?;
    let (c_low, c_upp) = concentration_pair(config, m, inputs.t_low(), inputs.t_upp())?;
    let eps_eff = inputs.eps_eff();
    let c_abs = if eps_eff == 0.0 {
        0.0
    } else {
        match config.operator {
            // ||Ax|| > t ||x|| reduction: exact chi-square upper tail
            OperatorSpec::Subgaussian {
                kind: SubgaussianKind::Gaussian,
            } => 1.0 - chi_square_cdf(m as f64 * t * t, m as u32)?,
            OperatorSpec::SubsampledOrthogonal { .. } => {
                let n = config.model_prior.dim();
                if t >= (n as f64 / m as f64).sqrt() {
                    0.0
                } else {
                    1.0 // no sharper closed form below the norm cap
                }
            }
            OperatorSpec::Subgaussian {
                kind: SubgaussianKind::Rademacher,
            } => {
                return Err(HarnessError::Config(
                    "no explicit c_abs for rademacher operators".into(),
                ))
            }
        }
    };
    let d_upp_outer = noise.d_upp(c_prime * config.sigma);
    let d_upp_inner = noise.d_upp(inputs.t_noise_inner());
    let d_shift = noise.d_shift(t * eps_eff, c_prime * config.sigma);
    Ok(theorem_main_bound(
        &inputs,
        c_abs,
        d_upp_outer,
        d_shift,
        c_low,
        c_upp,
        d_upp_inner,
    )?)
}
