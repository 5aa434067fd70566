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

//! Numerical core for posterior-sampling recovery experiments.
//!
//! Everything in this crate is pure computation on `f64` vectors: priors and
//! their samplers, forward-operator distributions, Gaussian noise constants,
//! approximate covering numbers, concentration estimates and the explicit
//! recovery bounds they feed. Randomness always flows through an explicit
//! counter-based [`rng::RandomStream`], so results are reproducible bit for
//! bit regardless of platform or thread schedule.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the experiment
//! harness live in the companion `brl` crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` rejects NaN where `x <= 0.0` would accept it; validation
// code here relies on that, so the negated-comparison lint stays off.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index-heavy loops over symmetric matrix halves read clearer than
// iterator chains in the dense kernels
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod bounds;
pub mod concentration;
pub mod covering;
mod error;
pub mod linalg;
pub(crate) mod math;
pub mod noise;
pub mod operators;
pub mod posterior;
pub mod priors;
pub mod rng;
pub mod special;
pub mod transform;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
