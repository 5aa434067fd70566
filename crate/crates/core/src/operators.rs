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

//! Forward-operator distributions and realized operators.
//!
//! Two families: dense subgaussian matrices with i.i.d. entries of variance
//! 1/m, and randomly-subsampled orthogonal transforms where each row of an
//! orthogonal matrix U is kept independently with probability m/n and the
//! result is rescaled by sqrt(n/m). Both are isotropic: E ||Ax||^2 = ||x||^2.
//!
//! The subsampled row count q is a Binomial(n, m/n) random variable, not
//! fixed at m. An empty draw is retried once; a second empty draw is an
//! error.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::invalid;
use crate::linalg::{norm, operator_norm, sup_norm, DenseMatrix};
use crate::math;
use crate::priors::{sample_prior, PriorSpec};
use crate::rng::RandomStream;
use crate::transform::{dct_entry, dct_ortho, dct_ortho_inverse, fwht_ortho, hadamard_entry};
use crate::{Error, Result};

/// Entry law for dense subgaussian operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgaussianKind {
    Gaussian,
    Rademacher,
}

/// The orthogonal matrix behind a subsampled operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Identity,
    Hadamard,
    Dct,
}

impl Basis {
    /// U x.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Basis::Identity => Ok(x.to_vec()),
            Basis::Hadamard => fwht_ortho(x),
            Basis::Dct => dct_ortho(x),
        }
    }

    /// U^T y (= U^{-1} y since U is orthogonal).
    pub fn inverse(&self, y: &[f64]) -> Result<Vec<f64>> {
        match self {
            Basis::Identity => Ok(y.to_vec()),
            Basis::Hadamard => fwht_ortho(y),
            Basis::Dct => dct_ortho_inverse(y),
        }
    }

    /// Entry (row, col) of U.
    pub fn entry(&self, n: usize, row: usize, col: usize) -> f64 {
        match self {
            Basis::Identity => {
                if row == col {
                    1.0
                } else {
                    0.0
                }
            }
            Basis::Hadamard => hadamard_entry(n, row, col),
            Basis::Dct => dct_entry(n, row, col),
        }
    }

    /// Row `row` of U as a dense vector.
    pub fn row(&self, n: usize, row: usize) -> Vec<f64> {
        (0..n).map(|col| self.entry(n, row, col)).collect()
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(invalid("basis dimension must be >= 1"));
        }
        if matches!(self, Basis::Hadamard) && !n.is_power_of_two() {
            return Err(invalid("hadamard basis requires n to be a power of two"));
        }
        Ok(())
    }
}

/// Distribution of forward operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorSpec {
    Subgaussian { kind: SubgaussianKind },
    SubsampledOrthogonal { basis: Basis },
}

/// A realized forward operator.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorMatrix {
    /// Dense m x n matrix, entries already scaled by 1/sqrt(m).
    Dense(DenseMatrix),
    /// (basis, strictly increasing kept-row indices, scale = sqrt(n/m)).
    Subsampled {
        basis: Basis,
        selected: Vec<usize>,
        scale: f64,
    },
}

/// A drawn operator together with its draw metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawnOperator {
    pub matrix: OperatorMatrix,
    pub m_nominal: usize,
    pub n: usize,
    /// Realized row count (equals `m_nominal` for dense operators).
    pub q: usize,
    /// Whether an empty subsampled draw had to be retried.
    pub resampled: bool,
}

fn draw_subsampled_rows(n: usize, p: f64, stream: &mut RandomStream) -> Vec<usize> {
    (0..n).filter(|_| stream.next_f64() < p).collect()
}

/// Draws an operator from the given distribution.
pub fn draw_operator(
    spec: &OperatorSpec,
    m: usize,
    n: usize,
    stream: &mut RandomStream,
) -> Result<DrawnOperator> {
    if m == 0 || n == 0 {
        return Err(invalid("draw_operator: m and n must be >= 1"));
    }
    match spec {
        OperatorSpec::Subgaussian { kind } => {
            let scale = 1.0 / math::sqrt(m as f64);
            let mut a = DenseMatrix::zeros(m, n);
            match kind {
                SubgaussianKind::Gaussian => {
                    for v in &mut a.data {
                        *v = scale * stream.next_gaussian();
                    }
                }
                SubgaussianKind::Rademacher => {
                    for v in &mut a.data {
                        *v = if stream.next_u64() >> 63 == 1 {
                            scale
                        } else {
                            -scale
                        };
                    }
                }
            }
            Ok(DrawnOperator {
                matrix: OperatorMatrix::Dense(a),
                m_nominal: m,
                n,
                q: m,
                resampled: false,
            })
        }
        OperatorSpec::SubsampledOrthogonal { basis } => {
            if m > n {
                return Err(invalid("draw_operator: subsampled requires m <= n"));
            }
            basis.check_dim(n)?;
            let p = m as f64 / n as f64;
            let mut selected = draw_subsampled_rows(n, p, stream);
            let mut resampled = false;
            if selected.is_empty() {
                resampled = true;
                selected = draw_subsampled_rows(n, p, stream);
                if selected.is_empty() {
                    return Err(Error::EmptyOperatorDraw);
                }
            }
            let q = selected.len();
            Ok(DrawnOperator {
                matrix: OperatorMatrix::Subsampled {
                    basis: *basis,
                    selected,
                    scale: math::sqrt(n as f64 / m as f64),
                },
                m_nominal: m,
                n,
                q,
                resampled,
            })
        }
    }
}

impl DrawnOperator {
    /// A x.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(invalid("apply: dimension mismatch"));
        }
        match &self.matrix {
            OperatorMatrix::Dense(a) => Ok(a.matvec(x)),
            OperatorMatrix::Subsampled {
                basis,
                selected,
                scale,
            } => {
                let t = basis.forward(x)?;
                Ok(selected.iter().map(|&i| scale * t[i]).collect())
            }
        }
    }

    /// A^T y.
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.q {
            return Err(invalid("apply_transpose: dimension mismatch"));
        }
        match &self.matrix {
            OperatorMatrix::Dense(a) => Ok(a.matvec_transpose(y)),
            OperatorMatrix::Subsampled {
                basis,
                selected,
                scale,
            } => {
                let mut padded = vec![0.0; self.n];
                for (row, &i) in selected.iter().enumerate() {
                    padded[i] = scale * y[row];
                }
                basis.inverse(&padded)
            }
        }
    }

    /// The operator as an explicit dense matrix (test and oracle path).
    pub fn to_dense(&self) -> DenseMatrix {
        match &self.matrix {
            OperatorMatrix::Dense(a) => a.clone(),
            OperatorMatrix::Subsampled {
                basis,
                selected,
                scale,
            } => {
                let rows: Vec<Vec<f64>> = selected
                    .iter()
                    .map(|&i| basis.row(self.n, i).iter().map(|v| scale * v).collect())
                    .collect();
                DenseMatrix::from_rows(&rows)
            }
        }
    }

    /// Operator-norm bound theta: exactly sqrt(n/m) for subsampled draws,
    /// a power-iteration estimate for dense ones.
    pub fn op_norm_bound(&self) -> Result<f64> {
        match &self.matrix {
            OperatorMatrix::Subsampled { .. } => {
                Ok(math::sqrt(self.n as f64 / self.m_nominal as f64))
            }
            OperatorMatrix::Dense(_) => operator_norm(
                self.n,
                |x| self.apply(x).unwrap(),
                |y| self.apply_transpose(y).unwrap(),
            ),
        }
    }
}

/// Classical coherence mu_*(U) = n max_{ij} u_ij^2.
pub fn mu_star(basis: Basis, n: usize) -> Result<f64> {
    basis.check_dim(n)?;
    match basis {
        Basis::Identity => Ok(n as f64),
        Basis::Hadamard => Ok(1.0),
        Basis::Dct => {
            let mut max_sq = 0.0f64;
            for row in 0..n {
                for col in 0..n {
                    let e = dct_entry(n, row, col);
                    max_sq = max_sq.max(e * e);
                }
            }
            Ok(n as f64 * max_sq)
        }
    }
}

/// Exact coherence of U relative to the set of (2s)-sparse vectors:
/// n times the largest top-2s energy of any row of U.
///
/// For x supported on a set S, sup |<u_i, x>|^2 / ||x||^2 over that support
/// equals the energy of u_i restricted to S, so the supremum over all
/// (2s)-sparse x picks the 2s largest squared entries of the best row.
pub fn coherence_sparse(basis: Basis, n: usize, s: usize) -> Result<f64> {
    basis.check_dim(n)?;
    if s == 0 || 2 * s > n {
        return Err(invalid("coherence_sparse: need 1 <= 2s <= n"));
    }
    match basis {
        Basis::Identity => Ok(n as f64),
        Basis::Hadamard => Ok(2.0 * s as f64),
        Basis::Dct => {
            let mut best = 0.0f64;
            let mut sq = vec![0.0f64; n];
            for row in 0..n {
                for (col, slot) in sq.iter_mut().enumerate() {
                    let e = dct_entry(n, row, col);
                    *slot = e * e;
                }
                sq.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
                let energy: f64 = sq[..2 * s].iter().sum();
                best = best.max(energy);
            }
            Ok(n as f64 * best)
        }
    }
}

/// Exact coherence of U relative to the difference set of a finite point
/// support: n max over pairs of ||U (x_i - x_j)||_inf^2 / ||x_i - x_j||^2.
pub fn coherence_dirac(basis: Basis, points: &[Vec<f64>]) -> Result<f64> {
    if points.len() < 2 {
        return Err(invalid("coherence_dirac: needs at least 2 points"));
    }
    let n = points[0].len();
    basis.check_dim(n)?;
    let mut best = 0.0f64;
    let mut any = false;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d: Vec<f64> = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| a - b)
                .collect();
            let nd = norm(&d);
            if nd < 1e-12 {
                continue;
            }
            any = true;
            let t = basis.forward(&d)?;
            let ratio = sup_norm(&t) / nd;
            best = best.max(ratio * ratio);
        }
    }
    if !any {
        return Err(Error::DegenerateDirections);
    }
    Ok(n as f64 * best)
}

/// Sampled lower bound on the coherence of U relative to
/// supp(prior) - supp(prior): the max over `n_pairs` sampled difference
/// directions. Pairs closer than 1e-12 are skipped.
pub fn coherence_empirical(
    basis: Basis,
    n: usize,
    prior: &PriorSpec,
    n_pairs: usize,
    stream: &mut RandomStream,
) -> Result<f64> {
    basis.check_dim(n)?;
    if n_pairs == 0 {
        return Err(invalid("coherence_empirical: n_pairs must be >= 1"));
    }
    if prior.dim() != n {
        return Err(invalid("coherence_empirical: prior dimension mismatch"));
    }
    let mut best: Option<f64> = None;
    for _ in 0..n_pairs {
        let x1 = sample_prior(prior, stream);
        let x2 = sample_prior(prior, stream);
        let d: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a - b).collect();
        let nd = norm(&d);
        if nd < 1e-12 {
            continue;
        }
        let t = basis.forward(&d)?;
        let ratio = sup_norm(&t) / nd;
        let val = n as f64 * ratio * ratio;
        best = Some(best.map_or(val, |b: f64| b.max(val)));
    }
    best.ok_or(Error::DegenerateDirections)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sub;
    use crate::priors::DiracMixture;

    #[test]
    fn identity_full_sampling_is_identity() {
        // m = n: every row kept with probability 1, scale 1
        let spec = OperatorSpec::SubsampledOrthogonal {
            basis: Basis::Identity,
        };
        let mut stream = RandomStream::new(3, 0);
        let op = draw_operator(&spec, 8, 8, &mut stream).unwrap();
        assert_eq!(op.q, 8);
        let x = vec![1.0, -2.0, 3.0, 0.5, 0.0, 7.0, -1.0, 2.0];
        assert_eq!(op.apply(&x).unwrap(), x);
        assert!((op.op_norm_bound().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn apply_zero_gives_zero() {
        let spec = OperatorSpec::Subgaussian {
            kind: SubgaussianKind::Gaussian,
        };
        let op = draw_operator(&spec, 5, 9, &mut RandomStream::new(1, 1)).unwrap();
        let y = op.apply(&[0.0; 9]).unwrap();
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn subsampled_matches_dense_reconstruction() {
        let mut stream = RandomStream::new(10, 0);
        for case in 0..100u64 {
            let basis = match case % 3 {
                0 => Basis::Identity,
                1 => Basis::Hadamard,
                _ => Basis::Dct,
            };
            let spec = OperatorSpec::SubsampledOrthogonal { basis };
            let mut op_stream = RandomStream::new(11, case);
            let op = draw_operator(&spec, 8, 16, &mut op_stream).unwrap();
            let x = crate::rng::draw_gaussian(&mut stream, 16);
            let fast = op.apply(&x).unwrap();
            let dense = op.to_dense().matvec(&x);
            for (a, b) in fast.iter().zip(&dense) {
                assert!((a - b).abs() < 1e-9);
            }
            // transpose path agrees with the dense transpose too
            let y = crate::rng::draw_gaussian(&mut stream, op.q);
            let fast_t = op.apply_transpose(&y).unwrap();
            let dense_t = op.to_dense().matvec_transpose(&y);
            for (a, b) in fast_t.iter().zip(&dense_t) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gaussian_isotropy() {
        // mean of ||Ax||^2 over 1e4 draws for unit x is 1 within the
        // chi-square fluctuation 4 sqrt(2/m) / 100
        let spec = OperatorSpec::Subgaussian {
            kind: SubgaussianKind::Gaussian,
        };
        let m = 8usize;
        let n = 16usize;
        let mut x = vec![0.0; n];
        x[3] = 0.6;
        x[11] = -0.8;
        let mut acc = 0.0;
        for i in 0..10_000u64 {
            let mut stream = RandomStream::new(500, i);
            let op = draw_operator(&spec, m, n, &mut stream).unwrap();
            let y = op.apply(&x).unwrap();
            acc += crate::linalg::dot(&y, &y);
        }
        let mean = acc / 10_000.0;
        let tol = 4.0 * (2.0 / m as f64).sqrt() / 100.0;
        assert!((mean - 1.0).abs() < tol, "mean {mean} tol {tol}");
    }

    #[test]
    fn subsampled_row_count_is_binomial() {
        let spec = OperatorSpec::SubsampledOrthogonal {
            basis: Basis::Hadamard,
        };
        let (m, n) = (32usize, 256usize);
        let mut acc = 0.0;
        for i in 0..10_000u64 {
            let mut stream = RandomStream::new(900, i);
            acc += draw_operator(&spec, m, n, &mut stream).unwrap().q as f64;
        }
        let mean = acc / 10_000.0;
        let p = m as f64 / n as f64;
        let tol = 4.0 * (m as f64 * (1.0 - p)).sqrt() / 100.0;
        assert!((mean - m as f64).abs() < tol, "mean {mean} tol {tol}");
    }

    #[test]
    fn subsampled_rejects_m_above_n() {
        let spec = OperatorSpec::SubsampledOrthogonal {
            basis: Basis::Identity,
        };
        assert!(draw_operator(&spec, 9, 8, &mut RandomStream::new(0, 0)).is_err());
    }

    #[test]
    fn hadamard_requires_power_of_two() {
        let spec = OperatorSpec::SubsampledOrthogonal {
            basis: Basis::Hadamard,
        };
        assert!(draw_operator(&spec, 3, 12, &mut RandomStream::new(0, 0)).is_err());
    }

    #[test]
    fn op_norm_bound_subsampled_values() {
        let spec = OperatorSpec::SubsampledOrthogonal {
            basis: Basis::Hadamard,
        };
        let op = draw_operator(&spec, 64, 256, &mut RandomStream::new(2, 0)).unwrap();
        assert!((op.op_norm_bound().unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn op_norm_dense_matches_svd_value() {
        // diag(3, 1) / sqrt(2): top singular value 3/sqrt(2)
        let a = DenseMatrix::from_rows(&[
            vec![3.0 / (2.0f64).sqrt(), 0.0],
            vec![0.0, 1.0 / (2.0f64).sqrt()],
        ]);
        let op = DrawnOperator {
            matrix: OperatorMatrix::Dense(a),
            m_nominal: 2,
            n: 2,
            q: 2,
            resampled: false,
        };
        let want = 3.0 / (2.0f64).sqrt();
        assert!((op.op_norm_bound().unwrap() - want).abs() < want * 1e-6);
    }

    #[test]
    fn power_iteration_never_exceeds_subsampled_bound() {
        // ||A|| <= sqrt(n/m) a.s.; the estimate must respect it
        let spec = OperatorSpec::SubsampledOrthogonal { basis: Basis::Dct };
        for i in 0..200u64 {
            let mut stream = RandomStream::new(77, i);
            let op = draw_operator(&spec, 8, 32, &mut stream).unwrap();
            let est = operator_norm(
                op.n,
                |x| op.apply(x).unwrap(),
                |y| op.apply_transpose(y).unwrap(),
            )
            .unwrap();
            assert!(est <= (32.0f64 / 8.0).sqrt() + 1e-9);
        }
    }

    #[test]
    fn mu_star_values() {
        assert!((mu_star(Basis::Hadamard, 64).unwrap() - 1.0).abs() < 1e-12);
        assert!((mu_star(Basis::Identity, 17).unwrap() - 17.0).abs() < 1e-12);
        // dct: exhaustive row-scan oracle
        let n = 8;
        let mut max_sq = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let e = dct_entry(n, r, c);
                max_sq = max_sq.max(e * e);
            }
        }
        assert!((mu_star(Basis::Dct, n).unwrap() - n as f64 * max_sq).abs() < 1e-12);
    }

    #[test]
    fn coherence_sparse_values_and_upper_bound() {
        assert!((coherence_sparse(Basis::Identity, 16, 4).unwrap() - 16.0).abs() < 1e-12);
        assert!((coherence_sparse(Basis::Hadamard, 16, 2).unwrap() - 4.0).abs() < 1e-12);
        assert!(coherence_sparse(Basis::Identity, 16, 9).is_err());
        // mu <= 2 s mu_star across a grid
        for &(basis, n) in &[
            (Basis::Identity, 16usize),
            (Basis::Hadamard, 16),
            (Basis::Dct, 16),
            (Basis::Dct, 24),
        ] {
            for s in 1..=4 {
                let mu = coherence_sparse(basis, n, s).unwrap();
                let cap = 2.0 * s as f64 * mu_star(basis, n).unwrap();
                assert!(mu <= cap + 1e-9, "{basis:?} n={n} s={s}: {mu} > {cap}");
            }
        }
    }

    #[test]
    fn coherence_sparse_brute_force_hadamard() {
        // brute force over all size-2s supports and rows for n=16, s=2:
        // uniform squared entries 1/n make every support carry 2s/n energy
        let n = 16usize;
        let s = 2usize;
        let mut best = 0.0f64;
        for row in 0..n {
            let sq: Vec<f64> = (0..n)
                .map(|c| {
                    let e = hadamard_entry(n, row, c);
                    e * e
                })
                .collect();
            // top 2s entries of this row
            let mut sorted = sq.clone();
            sorted.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
            best = best.max(sorted[..2 * s].iter().sum());
        }
        assert!((n as f64 * best - coherence_sparse(Basis::Hadamard, n, s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn coherence_sparse_monotone_in_s() {
        for &basis in &[Basis::Identity, Basis::Hadamard, Basis::Dct] {
            let mut prev = 0.0;
            for s in 1..=8 {
                let mu = coherence_sparse(basis, 32, s).unwrap();
                assert!(mu >= prev - 1e-12);
                prev = mu;
            }
        }
    }

    #[test]
    fn coherence_empirical_identity_two_atoms() {
        let prior = PriorSpec::DiracMixture(
            DiracMixture::uniform(vec![vec![0.0; 8], {
                let mut e1 = vec![0.0; 8];
                e1[0] = 1.0;
                e1
            }])
            .unwrap(),
        );
        let mut stream = RandomStream::new(21, 0);
        let mu = coherence_empirical(Basis::Identity, 8, &prior, 64, &mut stream).unwrap();
        // the only nonzero difference is e_1, so the ratio is exactly n
        assert!((mu - 8.0).abs() < 1e-12);
    }

    #[test]
    fn coherence_empirical_never_exceeds_ambient() {
        let prior = PriorSpec::SparseGaussian(crate::priors::SparseGaussian::new(32, 3).unwrap());
        for seed in 0..20u64 {
            let mut stream = RandomStream::new(seed, 0);
            for &basis in &[Basis::Identity, Basis::Hadamard, Basis::Dct] {
                let mu = coherence_empirical(basis, 32, &prior, 50, &mut stream).unwrap();
                assert!(mu <= 32.0 + 1e-9);
            }
        }
    }

    #[test]
    fn coherence_empirical_below_exact_sparse() {
        // sampled lower bound never exceeds the exact sparse coherence
        let s = 3usize;
        let prior = PriorSpec::SparseGaussian(crate::priors::SparseGaussian::new(64, s).unwrap());
        for seed in 0..20u64 {
            let mut stream = RandomStream::new(1000 + seed, 0);
            for &basis in &[Basis::Hadamard, Basis::Dct] {
                let emp = coherence_empirical(basis, 64, &prior, 30, &mut stream).unwrap();
                let exact = coherence_sparse(basis, 64, s).unwrap();
                assert!(emp <= exact + 1e-9, "{basis:?}: {emp} > {exact}");
            }
        }
    }

    #[test]
    fn coherence_empirical_degenerate_pairs_error() {
        let prior =
            PriorSpec::DiracMixture(DiracMixture::new(vec![vec![1.0, 2.0]], vec![1.0]).unwrap());
        let mut stream = RandomStream::new(0, 0);
        assert!(matches!(
            coherence_empirical(Basis::Identity, 2, &prior, 10, &mut stream),
            Err(Error::DegenerateDirections)
        ));
    }

    #[test]
    fn coherence_dirac_matches_manual_pair() {
        let points = vec![vec![0.0, 0.0], vec![3.0, 4.0]];
        let mu = coherence_dirac(Basis::Identity, &points).unwrap();
        // difference (3,4): sup-norm 4, norm 5 -> 2 * 16/25
        assert!((mu - 2.0 * 16.0 / 25.0).abs() < 1e-12);
        let d = sub(&points[0], &points[1]);
        assert!((norm(&d) - 5.0).abs() < 1e-12);
    }
}
