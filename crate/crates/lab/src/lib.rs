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

//! Experiment harness, verification suites, file formats and CLI plumbing
//! for the recovery laboratory built on `brl-core`.

// `!(x > 0.0)` rejects NaN where `x <= 0.0` would accept it
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;

pub mod cli;
pub mod config;
pub mod experiments;
pub mod report;
pub mod verify;

/// Errors surfaced by the harness.
#[derive(Debug)]
pub enum HarnessError {
    /// Configuration or usage problem (CLI exit code 1).
    Config(String),
    /// A numerical routine failed.
    Core(brl_core::Error),
    /// A trial failed, with its coordinates.
    Trial {
        m: usize,
        trial: u64,
        source: Box<HarnessError>,
    },
    Io(std::io::Error),
    Json(serde_json::Error),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Config(msg) => write!(f, "{msg}"),
            HarnessError::Core(e) => write!(f, "{e}"),
            HarnessError::Trial { m, trial, source } => {
                write!(f, "trial failed at m={m}, trial={trial}: {source}")
            }
            HarnessError::Io(e) => write!(f, "io error: {e}"),
            HarnessError::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<brl_core::Error> for HarnessError {
    fn from(e: brl_core::Error) -> Self {
        HarnessError::Core(e)
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e)
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Json(e)
    }
}
