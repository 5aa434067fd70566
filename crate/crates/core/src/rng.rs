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

//! Counter-based random streams.
//!
//! Every stochastic routine in this workspace draws from a [`RandomStream`],
//! which produces the i-th output as a pure function of
//! `(master_seed, stream_id, counter = i)`. Identical coordinates yield
//! identical values on every platform and under any thread schedule, so
//! Monte Carlo runs are reproducible no matter how trials are scheduled.
//! Distinct `stream_id`s give statistically independent streams.
//!
//! The generator is the SplitMix64 output function applied to a per-stream
//! key advanced by the Weyl constant; it has a full 2^64 period per stream
//! and no shared mutable state.

use alloc::vec::Vec;

use crate::math;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A splittable counter-based random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomStream {
    pub master_seed: u64,
    pub stream_id: u64,
    pub counter: u64,
}

impl RandomStream {
    /// Stream at counter zero for the given `(master_seed, stream_id)`.
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RandomStream {
            master_seed,
            stream_id,
            counter: 0,
        }
    }

    /// Derives a stream id by folding the given coordinates into the seed.
    ///
    /// Used by the experiment harness to key independent streams per
    /// `(m, trial, role)` triple.
    pub fn derive(master_seed: u64, parts: &[u64]) -> Self {
        let mut id = 0x6A09_E667_F3BC_C909u64;
        for (i, &p) in parts.iter().enumerate() {
            id = mix64(id ^ p.wrapping_add(GOLDEN_GAMMA.wrapping_mul(i as u64 + 1)));
        }
        RandomStream::new(master_seed, id)
    }

    #[inline]
    fn key(&self) -> u64 {
        mix64(self.master_seed ^ mix64(self.stream_id ^ 0x2545_F491_4F6C_DD1D))
    }

    /// Next raw 64-bit output; advances the counter by one.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let out = mix64(
            self.key()
                .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)),
        );
        self.counter += 1;
        out
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `(0, 1]`; never zero, safe under `ln`.
    #[inline]
    pub fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)` by rejection on the top range.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }

    /// One standard normal draw (Box-Muller; consumes two uniforms).
    #[inline]
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.next_f64_open();
        let u2 = self.next_f64();
        math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * core::f64::consts::PI * u2)
    }
}

/// `n` i.i.d. standard normal entries.
pub fn draw_gaussian(stream: &mut RandomStream, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i + 2 <= n {
        let u1 = stream.next_f64_open();
        let u2 = stream.next_f64();
        let r = math::sqrt(-2.0 * math::ln(u1));
        let theta = 2.0 * core::f64::consts::PI * u2;
        out.push(r * math::cos(theta));
        out.push(r * math::sin(theta));
        i += 2;
    }
    if i < n {
        out.push(stream.next_gaussian());
    }
    out
}

/// `n` i.i.d. Rademacher (±1) entries.
pub fn draw_rademacher(stream: &mut RandomStream, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if stream.next_u64() >> 63 == 1 {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}
