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

//! Evaluators for the explicit recovery bounds.
//!
//! `theorem_main_bound` assembles the fully explicit failure-probability
//! bound
//!
//! ```text
//! p <= 2 delta + C_abs + D_upp(c' sigma)
//!      + 2 D_shift e^k [ C_low(2 sqrt 2 / sqrt c) + C_upp(sqrt c / (2 sqrt 2))
//!                        + 2 D_upp(sqrt c sigma / (2 sqrt 2)) ]
//! ```
//!
//! for the error threshold `(c + 2)(eta + sigma)`, from caller-supplied
//! constants. The simplified expression and the two measurement-count
//! conditions keep their hidden universal constants as explicit user
//! parameters, so they are diagnostics rather than certified bounds.

use crate::error::invalid;
use crate::math;
use crate::special::std_normal_cdf;
use crate::Result;

/// Parameters of the main bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    /// Failure budget, in (0, 1/4].
    pub delta: f64,
    /// Wasserstein budget between real and approximate prior.
    pub eps: f64,
    /// Wasserstein order; `f64::INFINITY` selects W_inf (delta^{1/inf} = 1).
    pub p_order: f64,
    pub eta: f64,
    pub sigma: f64,
    /// Threshold constant: the error level is (c + 2)(eta + sigma).
    pub c: f64,
    pub c_prime: f64,
    pub t: f64,
    /// Log covering-number budget (e^k enters the bound).
    pub k: f64,
    pub m: u32,
}

impl BoundInputs {
    /// delta^{1/p} with the W_inf convention delta^{1/inf} = 1.
    pub fn delta_root(&self) -> f64 {
        if self.p_order.is_infinite() {
            1.0
        } else {
            math::powf(self.delta, 1.0 / self.p_order)
        }
    }

    /// eps / delta^{1/p}, the effective W_inf budget after decomposition.
    pub fn eps_eff(&self) -> f64 {
        if self.eps == 0.0 {
            0.0
        } else {
            self.eps / self.delta_root()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 0.25) {
            return Err(invalid("BoundInputs: delta must be in (0, 1/4]"));
        }
        if self.eps < 0.0 {
            return Err(invalid("BoundInputs: eps must be >= 0"));
        }
        if !(self.p_order >= 1.0) {
            return Err(invalid("BoundInputs: p_order must be >= 1"));
        }
        if !(self.eta > 0.0) || !(self.sigma > 0.0) {
            return Err(invalid("BoundInputs: eta and sigma must be > 0"));
        }
        if !(self.c >= 1.0) || !(self.c_prime >= 1.0) {
            return Err(invalid("BoundInputs: c and c_prime must be >= 1"));
        }
        if !(self.t > 0.0) {
            return Err(invalid("BoundInputs: t must be > 0"));
        }
        if self.m == 0 {
            return Err(invalid("BoundInputs: m must be >= 1"));
        }
        if self.sigma < self.eps_eff() {
            return Err(invalid("BoundInputs: requires sigma >= eps / delta^{1/p}"));
        }
        Ok(())
    }

    /// Argument of C_low in the inner bracket: 2 sqrt 2 / sqrt c.
    pub fn t_low(&self) -> f64 {
        2.0 * core::f64::consts::SQRT_2 / math::sqrt(self.c)
    }

    /// Argument of C_upp in the inner bracket: sqrt c / (2 sqrt 2).
    pub fn t_upp(&self) -> f64 {
        math::sqrt(self.c) / (2.0 * core::f64::consts::SQRT_2)
    }

    /// Argument of the inner noise tail: sqrt c sigma / (2 sqrt 2).
    pub fn t_noise_inner(&self) -> f64 {
        math::sqrt(self.c) * self.sigma / (2.0 * core::f64::consts::SQRT_2)
    }
}

/// Every additive term of the main bound plus the total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundBreakdown {
    pub term_2delta: f64,
    pub term_c_abs: f64,
    pub term_d_upp_cprime: f64,
    pub term_shift_factor: f64,
    pub term_exp_k: f64,
    pub term_c_low: f64,
    pub term_c_upp: f64,
    pub term_d_upp_inner: f64,
    /// Raw sum; may exceed 1 (vacuous but informative in sweeps).
    pub total: f64,
    /// Raw sum clamped to [0, 1].
    pub total_clamped: f64,
    /// The error level the probability refers to: (c + 2)(eta + sigma).
    pub threshold: f64,
}

fn check_probability(v: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(invalid(alloc::format!(
            "{what} must be a probability in [0, 1]"
        )));
    }
    Ok(())
}

/// Assembles the main bound from its constants.
pub fn theorem_main_bound(
    inputs: &BoundInputs,
    c_abs: f64,
    d_upp_outer: f64,
    d_shift: f64,
    c_low: f64,
    c_upp: f64,
    d_upp_inner: f64,
) -> Result<BoundBreakdown> {
    inputs.validate()?;
    check_probability(c_abs, "c_abs")?;
    check_probability(d_upp_outer, "d_upp_outer")?;
    check_probability(c_low, "c_low")?;
    check_probability(c_upp, "c_upp")?;
    check_probability(d_upp_inner, "d_upp_inner")?;
    if !(d_shift >= 1.0) {
        return Err(invalid("d_shift must be >= 1"));
    }
    let term_exp_k = math::exp(inputs.k);
    let inner = c_low + c_upp + 2.0 * d_upp_inner;
    let total = 2.0 * inputs.delta + c_abs + d_upp_outer + 2.0 * d_shift * term_exp_k * inner;
    Ok(BoundBreakdown {
        term_2delta: 2.0 * inputs.delta,
        term_c_abs: c_abs,
        term_d_upp_cprime: d_upp_outer,
        term_shift_factor: d_shift,
        term_exp_k,
        term_c_low: c_low,
        term_c_upp: c_upp,
        term_d_upp_inner: d_upp_inner,
        total,
        total_clamped: total.clamp(0.0, 1.0),
        threshold: (inputs.c + 2.0) * (inputs.eta + inputs.sigma),
    })
}

/// The simplified bound expression
/// `delta + Cov_{eta,delta}(P) [ C_low(1/d) + C_upp(d) + e^{-m/16} ]`.
///
/// The hidden universal constant behind the simplified statement is not
/// reconstructed here, so this value is for monotonicity and diagnostic use,
/// not a certified probability. The matching error level is
/// `(8 d^2 + 2)(eta + sigma)`.
#[allow(clippy::too_many_arguments)]
pub fn theorem_simplified_expression(
    d: f64,
    _eta: f64,
    _sigma: f64,
    delta: f64,
    cov_count: f64,
    c_low: f64,
    c_upp: f64,
    m: u32,
) -> Result<f64> {
    if !(d >= 2.0) {
        return Err(invalid("theorem_simplified_expression: d must be >= 2"));
    }
    Ok(delta + cov_count * (c_low + c_upp + math::exp(-(m as f64) / 16.0)))
}

/// Minimal m from the subgaussian measurement condition
/// `m >= c (k_cov_log + log(1/delta))`, with the non-explicit constant
/// supplied by the caller.
pub fn m_condition_subgauss(k_cov_log: f64, delta: f64, c_const: f64) -> Result<u64> {
    if !(delta > 0.0) {
        return Err(invalid("m_condition_subgauss: delta must be > 0"));
    }
    if !(c_const > 0.0) {
        return Err(invalid("m_condition_subgauss: c_const must be > 0"));
    }
    if k_cov_log < 0.0 {
        return Err(invalid("m_condition_subgauss: k_cov_log must be >= 0"));
    }
    Ok(math::ceil(c_const * (k_cov_log + math::ln(1.0 / delta))) as u64)
}

/// Minimal m from the subsampled-orthogonal condition
/// `m >= c mu (cov_log + log(1/delta))`.
pub fn m_condition_orthog(cov_log: f64, delta: f64, mu: f64, c_const: f64) -> Result<u64> {
    if !(mu >= 1.0) {
        return Err(invalid("m_condition_orthog: mu must be >= 1"));
    }
    if !(delta > 0.0) {
        return Err(invalid("m_condition_orthog: delta must be > 0"));
    }
    if !(c_const > 0.0) {
        return Err(invalid("m_condition_orthog: c_const must be > 0"));
    }
    if cov_log < 0.0 {
        return Err(invalid("m_condition_orthog: cov_log must be >= 0"));
    }
    Ok(math::ceil(c_const * mu * (cov_log + math::ln(1.0 / delta))) as u64)
}

/// Total variation between two Gaussians with equal covariance whose means
/// differ by `delta_param` standard deviations: `2 Phi(delta/2) - 1`.
pub fn tv_gaussian_shift(delta_param: f64) -> Result<f64> {
    if delta_param < 0.0 {
        return Err(invalid("tv_gaussian_shift: delta must be >= 0"));
    }
    Ok(2.0 * std_normal_cdf(delta_param / 2.0) - 1.0)
}

/// Lower bound on the expected TV separation of the int/ext measurement
/// distributions: `max(0, 1 - (C_low + C_upp + 2 D_upp))`.
pub fn tv_separation_lower_bound(c: f64, c_low: f64, c_upp: f64, d_upp_inner: f64) -> Result<f64> {
    if !(c >= 1.0) {
        return Err(invalid("tv_separation_lower_bound: c must be >= 1"));
    }
    check_probability(c_low, "c_low")?;
    check_probability(c_upp, "c_upp")?;
    check_probability(d_upp_inner, "d_upp_inner")?;
    Ok((1.0 - (c_low + c_upp + 2.0 * d_upp_inner)).max(0.0))
}
