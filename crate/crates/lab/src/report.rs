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

//! Experiment reports: JSON for the full record, CSV for plotting stacks.
//!
//! The CSV column set and order are frozen:
//! `m,trials,failures,p_hat,wilson_low,wilson_high,bound_total,threshold,mean_q,seed`.
//! Optional columns are left empty when not applicable.

use serde::Serialize;

use crate::config::RawConfig;
use crate::HarnessError;

/// Per-m aggregate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MRow {
    pub m: u64,
    pub trials: u64,
    pub failures: u64,
    pub p_hat: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_total: Option<f64>,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_q: Option<f64>,
    pub resampled_draws: u64,
    pub seed: u64,
}

/// Full experiment record: config echo plus per-m rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub config: RawConfig,
    pub rows: Vec<MRow>,
}

pub const CSV_HEADER: &str =
    "m,trials,failures,p_hat,wilson_low,wilson_high,bound_total,threshold,mean_q,seed";

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String, HarnessError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let bound = r.bound_total.map(|b| b.to_string()).unwrap_or_default();
            let mean_q = r.mean_q.map(|q| q.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.m,
                r.trials,
                r.failures,
                r.p_hat,
                r.wilson_low,
                r.wilson_high,
                bound,
                r.threshold,
                mean_q,
                r.seed
            ));
        }
        out
    }
}
