// SPDX-License-Identifier: Apache-2.0

//! Small dense helpers shared by the other modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest singular value.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().max()
}

/// Maximum absolute column sum.
pub fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigenvalues in nondecreasing order with matching eigenvector columns.
///
/// The input is assumed symmetric; only its lower triangle is read by the
/// underlying solver.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if n == 0 || n != a.ncols() {
        return Err(Error::InvalidDimension(format!(
            "symmetric eigensolver needs a nonempty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure(
            "non-finite entry in symmetric matrix".into(),
        ));
    }
    let eig =
        SymmetricEigen::try_new(a.clone(), f64::EPSILON, 1000 * n.max(8)).ok_or_else(|| {
            Error::NumericalFailure(format!("symmetric eigensolver did not converge (n={n})"))
        })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// In-place QR of a row-major `d × d` matrix by modified Gram-Schmidt with one
/// reorthogonalisation pass.
///
/// On return `a` holds the orthonormal factor (columns) and `diag` the
/// diagonal of `R`, which is strictly positive by construction. A zero or
/// non-finite column norm is reported as an internal error.
pub(crate) fn qr_positive_in_place(a: &mut [f64], d: usize, diag: &mut [f64]) -> Result<()> {
    debug_assert_eq!(a.len(), d * d);
    debug_assert_eq!(diag.len(), d);
    for j in 0..d {
        let mut r_jj_sq_before = 0.0;
        for r in 0..d {
            r_jj_sq_before += a[r * d + j] * a[r * d + j];
        }
        for _pass in 0..2 {
            for k in 0..j {
                let mut dot = 0.0;
                for r in 0..d {
                    dot += a[r * d + k] * a[r * d + j];
                }
                for r in 0..d {
                    a[r * d + j] -= dot * a[r * d + k];
                }
            }
        }
        let mut norm_sq = 0.0;
        for r in 0..d {
            norm_sq += a[r * d + j] * a[r * d + j];
        }
        let norm = norm_sq.sqrt();
        if !(norm > 0.0) || !norm.is_finite() || !r_jj_sq_before.is_finite() {
            return Err(Error::Internal(format!(
                "QR produced a non-positive diagonal entry in column {j} (|r|={norm})"
            )));
        }
        for r in 0..d {
            a[r * d + j] /= norm;
        }
        diag[j] = norm;
    }
    Ok(())
}

/// `out = a · b` for row-major square matrices of order `d`.
pub(crate) fn matmul_into(a: &[f64], b: &[f64], out: &mut [f64], d: usize) {
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for k in 0..d {
                s += a[i * d + k] * b[k * d + j];
            }
            out[i * d + j] = s;
        }
    }
}

/// Row-major copy of a square `DMatrix`.
pub(crate) fn to_row_major(a: &DMatrix<f64>) -> Vec<f64> {
    let d = a.nrows();
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            v.push(a[(i, j)]);
        }
    }
    v
}
