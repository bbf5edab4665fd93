// SPDX-License-Identifier: Apache-2.0

//! Lie algebra generated by a set of matrices, computed numerically.
//!
//! The span is kept as an orthonormal basis under the trace inner product
//! `⟨A, B⟩ = tr(AᵀB)`. Brackets of basis pairs are projected against the
//! current basis and admitted when the orthogonal remainder is large enough;
//! the process stops once every pair has been bracketed without growth.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{build_x, ModelConfig, OmegaVector};

/// Default relative threshold for admitting a new direction.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Tolerance on `‖JA + AᵀJ‖` for membership in `sp(N)`.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Largest generator set `verify_sp_generation` will build.
pub const MAX_GENERATORS: u64 = 1 << 20;

/// `[[0, I], [−I, 0]]` of order `2n`.
pub fn symplectic_form(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::InvalidDimension(
            "symplectic form needs n >= 1".into(),
        ));
    }
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    Ok(j)
}

/// `dim sp(N) = N(2N + 1)`.
pub fn sp_dimension(n: usize) -> usize {
    n * (2 * n + 1)
}

/// `AB − BA`.
pub fn bracket(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::InvalidArgument(format!(
            "bracket needs equal square shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a * b - b * a)
}

/// `‖JA + AᵀJ‖_F`; zero exactly when `A ∈ sp(N)`.
pub fn sp_membership_residual(a: &DMatrix<f64>) -> Result<f64> {
    let d = a.nrows();
    if !a.is_square() || d == 0 || !d.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "sp(N) membership needs even square order, got {:?}",
            a.shape()
        )));
    }
    let j = symplectic_form(d / 2)?;
    Ok((&j * a + a.transpose() * &j).norm())
}

/// Linear span of square matrices, stored as an orthonormal basis.
#[derive(Debug, Clone)]
pub struct MatrixSpan {
    dim: usize,
    basis: Vec<DMatrix<f64>>,
}

impl MatrixSpan {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            basis: Vec::new(),
        }
    }

    /// Matrix order (each element is `dim × dim`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[DMatrix<f64>] {
        &self.basis
    }

    /// Component of `m` orthogonal to the span (two Gram-Schmidt passes).
    pub fn orthogonal_component(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut r = m.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.dot(&r);
                r -= b * c;
            }
        }
        r
    }

    /// Adds `m` when its orthogonal remainder exceeds `tol · max(1, ‖m‖)`.
    /// Returns whether the rank grew.
    pub fn insert(&mut self, m: &DMatrix<f64>, tol: f64) -> Result<bool> {
        if m.shape() != (self.dim, self.dim) {
            return Err(Error::InvalidArgument(format!(
                "span holds {0}x{0} matrices, got {1:?}",
                self.dim,
                m.shape()
            )));
        }
        let r = self.orthogonal_component(m);
        let rn = r.norm();
        if rn > tol * m.norm().max(1.0) {
            self.basis.push(r / rn);
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// Singular values of the Gram matrix of the basis; all equal to one for
    /// an orthonormal basis.
    pub fn gram_singular_values(&self) -> Vec<f64> {
        let k = self.basis.len();
        if k == 0 {
            return Vec::new();
        }
        let g = DMatrix::from_fn(k, k, |i, j| self.basis[i].dot(&self.basis[j]));
        g.singular_values().iter().copied().collect()
    }
}

/// Rank and basis of the smallest bracket-closed subspace containing
/// `generators`.
pub fn lie_span_dimension(
    generators: &[DMatrix<f64>],
    rank_tol: f64,
) -> Result<(usize, MatrixSpan)> {
    let first = generators
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty generator list".into()))?;
    let d = first.nrows();
    if let Some(g) = generators.iter().find(|g| !g.is_square() || g.nrows() != d) {
        return Err(Error::InvalidArgument(format!(
            "generators must be square of order {d}, got {:?}",
            g.shape()
        )));
    }
    if !(rank_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rank_tol must be positive, got {rank_tol}"
        )));
    }

    let mut span = MatrixSpan::new(d);
    for g in generators {
        span.insert(g, rank_tol)?;
    }

    let cap = d * d;
    // Every basis element is bracketed with every earlier one; elements
    // admitted later get their turn when `i` reaches them.
    let mut i = 0;
    while i < span.rank() {
        for j in 0..i {
            let b = bracket(&span.basis[i], &span.basis[j])?;
            span.insert(&b, rank_tol)?;
            if span.rank() > cap {
                return Err(Error::Internal(format!(
                    "span rank {} exceeds ambient dimension {cap}",
                    span.rank()
                )));
            }
        }
        i += 1;
    }
    Ok((span.rank(), span))
}

/// Outcome of the `sp(N)` generation check at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SpGeneration {
    pub generated: bool,
    pub rank: usize,
    pub expected_rank: usize,
    /// Largest `‖JA + AᵀJ‖` over the generators.
    pub max_membership_residual: f64,
}

/// Builds `{ℓ X_ω(E) : ω ∈ {0,1}^N}` and checks that it generates `sp(N)`.
pub fn verify_sp_generation(
    config: &ModelConfig,
    energy: f64,
    rank_tol: f64,
) -> Result<SpGeneration> {
    let n = config.n();
    if n > 20 {
        return Err(Error::ResourceLimit(format!(
            "2^{n} generators exceed the limit of {MAX_GENERATORS}"
        )));
    }
    let count = 1u64 << n;
    let mut generators = Vec::with_capacity(count as usize);
    let mut max_res: f64 = 0.0;
    for mask in 0..count {
        let x =
            build_x(config, &OmegaVector::binary(n, mask), energy)?.into_matrix() * config.ell();
        max_res = max_res.max(sp_membership_residual(&x)?);
        generators.push(x);
    }
    let (rank, _) = lie_span_dimension(&generators, rank_tol)?;
    let expected_rank = sp_dimension(n);
    Ok(SpGeneration {
        generated: rank == expected_rank && max_res <= MEMBERSHIP_TOL,
        rank,
        expected_rank,
        max_membership_residual: max_res,
    })
}
