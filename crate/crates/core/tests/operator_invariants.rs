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

//! Monte Carlo invariants of the subsampled operator scheme.

use brl_core::linalg::operator_norm;
use brl_core::operators::{draw_operator, Basis, OperatorSpec};
use brl_core::rng::RandomStream;

#[test]
fn subsampled_scheme_is_isotropic_entrywise() {
    // E(A^T A) = I; averaged over 1e4 draws (m=32, n=64, dct) each entry
    // stays within 5 standard errors of the identity.
    let (m, n) = (32usize, 64usize);
    let spec = OperatorSpec::SubsampledOrthogonal { basis: Basis::Dct };
    let n_draws = 10_000u64;

    let rows: Vec<Vec<f64>> = (0..n).map(|i| Basis::Dct.row(n, i)).collect();
    let mut acc = vec![0.0f64; n * n];
    let scale_sq = n as f64 / m as f64;
    for d in 0..n_draws {
        let mut stream = RandomStream::new(60_601, d);
        let op = draw_operator(&spec, m, n, &mut stream).unwrap();
        let selected = match &op.matrix {
            brl_core::operators::OperatorMatrix::Subsampled { selected, .. } => selected.clone(),
            _ => unreachable!(),
        };
        for &r in &selected {
            let row = &rows[r];
            for i in 0..n {
                let ri = row[i] * scale_sq;
                for j in 0..n {
                    acc[i * n + j] += ri * row[j];
                }
            }
        }
    }

    // per-entry variance of one draw: (n/m)(1 - m/n) sum_i u_ij^2 u_ik^2
    let p = m as f64 / n as f64;
    for i in 0..n {
        for j in 0..n {
            let mean = acc[i * n + j] / n_draws as f64;
            let want = if i == j { 1.0 } else { 0.0 };
            let var_one: f64 = (0..n)
                .map(|r| {
                    let u = rows[r][i] * rows[r][j];
                    scale_sq * scale_sq * u * u * p * (1.0 - p)
                })
                .sum();
            let se = (var_one / n_draws as f64).sqrt();
            assert!(
                (mean - want).abs() <= 5.0 * se,
                "entry ({i},{j}): {mean} vs {want}, 5se {}",
                5.0 * se
            );
        }
    }
}

#[test]
fn power_iteration_respects_almost_sure_norm_bound() {
    // ||A|| <= sqrt(n/m) almost surely; 1e4 draws across the three bases
    let (m, n) = (16usize, 64usize);
    let cap = (n as f64 / m as f64).sqrt() + 1e-9;
    for (b_idx, &basis) in [Basis::Identity, Basis::Hadamard, Basis::Dct]
        .iter()
        .enumerate()
    {
        let spec = OperatorSpec::SubsampledOrthogonal { basis };
        for d in 0..10_000u64 {
            let mut stream = RandomStream::new(70_700 + b_idx as u64, d);
            let op = draw_operator(&spec, m, n, &mut stream).unwrap();
            let est = operator_norm(
                op.n,
                |x| op.apply(x).unwrap(),
                |y| op.apply_transpose(y).unwrap(),
            )
            .unwrap();
            assert!(est <= cap, "{basis:?} draw {d}: {est} > {cap}");
        }
    }
}
