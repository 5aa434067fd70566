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

use alloc::string::String;
use core::fmt;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidInput(String),
    /// Power iteration failed to reach the requested tolerance.
    PowerIterationDiverged {
        /// Iterations performed before giving up.
        iterations: usize,
    },
    /// A symmetric positive-definite factorization hit a nonpositive pivot.
    FactorizationFailed {
        /// Rough conditioning indicator (ratio of extreme diagonal pivots).
        condition_estimate: f64,
    },
    /// A sampler produced only degenerate (zero) directions.
    DegenerateDirections,
    /// A Bernoulli row draw came up empty twice in a row.
    EmptyOperatorDraw,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::PowerIterationDiverged { iterations } => {
                write!(
                    f,
                    "power iteration did not converge in {iterations} iterations"
                )
            }
            Error::FactorizationFailed { condition_estimate } => write!(
                f,
                "SPD factorization failed (condition estimate {condition_estimate:.3e})"
            ),
            Error::DegenerateDirections => {
                write!(f, "direction sampler produced only zero vectors")
            }
            Error::EmptyOperatorDraw => {
                write!(f, "subsampled operator drew zero rows twice")
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
