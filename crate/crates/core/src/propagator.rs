// SPDX-License-Identifier: Apache-2.0

//! Single-cell transfer matrices `T_ω(E) = exp(ℓ X_ω(E))`.
//!
//! Since `X² = diag(M, M)`, the exponential splits into even and odd parts
//! in `M`:
//!
//! ```text
//! exp(ℓX) = [[ C,   S ],
//!            [ M S, C ]],   C = cosh(ℓ√M),  S = sinh(ℓ√M)/√M
//! ```
//!
//! evaluated through the eigendecomposition of `M`, with `cosh/sinh` turning
//! into `cos/sin` on negative eigenvalues. [`transfer_matrix_oracle`] computes
//! the same matrix with a general Padé scaling-and-squaring exponential.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lie::symplectic_form;
use crate::linalg::{one_norm, spectral_norm};
use crate::model::{build_m, build_x, ModelConfig, OmegaVector, SymmetricMatrix};

/// Largest `‖ℓX‖` accepted by the general-purpose exponential.
pub const ORACLE_NORM_LIMIT: f64 = 700.0;

/// Below this `|ℓ²λ|` the scalar functions switch to their Taylor series.
const SERIES_SWITCH: f64 = 1e-6;

/// Real `2N × 2N` matrix expected to preserve the standard symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    entries: DMatrix<f64>,
}

impl SymplecticMatrix {
    /// Wraps a square matrix of even order. Symplecticity is not enforced;
    /// query it with [`SymplecticMatrix::symplectic_residual`].
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        let d = entries.nrows();
        if d != entries.ncols() {
            return Err(Error::InvalidArgument(format!(
                "symplectic matrix must be square, got {}x{}",
                d,
                entries.ncols()
            )));
        }
        if d == 0 || !d.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "symplectic matrix must have even positive order, got {d}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(2 * n, 2 * n),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// `‖TᵀJT − J‖` in the spectral norm.
    pub fn symplectic_residual(&self) -> f64 {
        let j = symplectic_form(self.dim() / 2).expect("order is even and positive");
        spectral_norm(&(self.entries.transpose() * &j * &self.entries - j))
    }

    pub fn determinant(&self) -> f64 {
        self.entries.determinant()
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.entries)
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        if self.dim() != rhs.dim() {
            return Err(Error::InvalidArgument(format!(
                "cannot compose {}x{} with {}x{}",
                self.dim(),
                self.dim(),
                rhs.dim(),
                rhs.dim()
            )));
        }
        Ok(Self {
            entries: &self.entries * &rhs.entries,
        })
    }
}

/// `‖TᵀJT − J‖` (spectral norm).
pub fn check_symplectic(t: &SymplecticMatrix) -> f64 {
    t.symplectic_residual()
}

/// Even part `cosh(ℓ√λ)`, entire in `λ`.
fn even_part(lambda: f64, ell: f64) -> f64 {
    let z = ell * ell * lambda;
    if z.abs() < SERIES_SWITCH {
        1.0 + z / 2.0 * (1.0 + z / 12.0 * (1.0 + z / 30.0))
    } else if lambda > 0.0 {
        (ell * lambda.sqrt()).cosh()
    } else {
        (ell * (-lambda).sqrt()).cos()
    }
}

/// Odd part `sinh(ℓ√λ)/√λ`, entire in `λ`, equal to `ℓ` at `λ = 0`.
fn odd_part(lambda: f64, ell: f64) -> f64 {
    let z = ell * ell * lambda;
    if z.abs() < SERIES_SWITCH {
        ell * (1.0 + z / 6.0 * (1.0 + z / 20.0 * (1.0 + z / 42.0)))
    } else if lambda > 0.0 {
        let r = lambda.sqrt();
        (ell * r).sinh() / r
    } else {
        let r = (-lambda).sqrt();
        (ell * r).sin() / r
    }
}

/// `exp(ℓ [[0, I], [M, 0]])` by functional calculus on `M`.
pub fn exp_block_hamiltonian(m: &SymmetricMatrix, ell: f64) -> Result<SymplecticMatrix> {
    let n = m.dim();
    let (lambda, q) = m.eigen()?;
    let even: Vec<f64> = lambda.iter().map(|&l| even_part(l, ell)).collect();
    let odd: Vec<f64> = lambda.iter().map(|&l| odd_part(l, ell)).collect();
    let lam_odd: Vec<f64> = lambda.iter().zip(&odd).map(|(l, s)| l * s).collect();

    // Q diag(f) Qᵀ
    let apply = |f: &[f64]| -> DMatrix<f64> {
        let mut qf = q.clone();
        for (c, v) in f.iter().enumerate() {
            qf.column_mut(c).scale_mut(*v);
        }
        qf * q.transpose()
    };
    let c = apply(&even);
    let s = apply(&odd);
    let ms = apply(&lam_odd);

    let mut t = DMatrix::zeros(2 * n, 2 * n);
    t.view_mut((0, 0), (n, n)).copy_from(&c);
    t.view_mut((0, n), (n, n)).copy_from(&s);
    t.view_mut((n, 0), (n, n)).copy_from(&ms);
    t.view_mut((n, n), (n, n)).copy_from(&c);
    Ok(SymplecticMatrix { entries: t })
}

/// `T_ω(E) = exp(ℓ X_ω(E))` in closed form.
pub fn transfer_matrix(
    config: &ModelConfig,
    omega: &OmegaVector,
    energy: f64,
) -> Result<SymplecticMatrix> {
    let m = build_m(config, omega, energy)?;
    exp_block_hamiltonian(&m, config.ell())
}

/// `T_ω(E)` through the general dense exponential.
pub fn transfer_matrix_oracle(
    config: &ModelConfig,
    omega: &OmegaVector,
    energy: f64,
) -> Result<SymplecticMatrix> {
    let x = build_x(config, omega, energy)?.into_matrix() * config.ell();
    SymplecticMatrix::from_matrix(matrix_exp(&x)?)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// Dense matrix exponential: scaling and squaring around the `[13/13]` Padé
/// approximant.
///
/// Returns a range error when `‖A‖₂ > 700`, beyond which the result is not
/// representable in general.
pub fn matrix_exp(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = a.nrows();
    if d != a.ncols() {
        return Err(Error::InvalidArgument(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            d,
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("non-finite matrix entry".into()));
    }
    let norm2 = spectral_norm(a);
    if norm2 > ORACLE_NORM_LIMIT {
        return Err(Error::Range(format!(
            "‖A‖ = {norm2} exceeds {ORACLE_NORM_LIMIT}"
        )));
    }
    if d == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }

    let norm1 = one_norm(a);
    let squarings = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * 2f64.powi(-squarings);

    let b = &PADE13;
    let id = DMatrix::<f64>::identity(d, d);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::NumericalFailure("singular Padé denominator".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn free_cfg(ell: f64) -> ModelConfig {
        ModelConfig::bernoulli(1, ell, vec![1.0], 1.0).unwrap()
    }

    fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn nilpotent_generator() {
        let cfg = free_cfg(0.7);
        let t = transfer_matrix(&cfg, &OmegaVector::binary(1, 0), 0.0).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[1.0, 0.7, 0.0, 1.0]);
        assert!((t.as_matrix() - expect).norm() < 1e-15);
    }

    #[test]
    fn hyperbolic_scalar_cell() {
        let cfg = free_cfg(1.0);
        let t = transfer_matrix(&cfg, &OmegaVector::binary(1, 0), -1.0).unwrap();
        let (c, s) = (1f64.cosh(), 1f64.sinh());
        let expect = DMatrix::from_row_slice(2, 2, &[c, s, s, c]);
        assert!(rel_err(t.as_matrix(), &expect) < 1e-14);
    }

    #[test]
    fn elliptic_scalar_cell() {
        let cfg = free_cfg(PI);
        let t = transfer_matrix(&cfg, &OmegaVector::binary(1, 0), 1.0).unwrap();
        let expect = -DMatrix::<f64>::identity(2, 2);
        assert!((t.as_matrix() - expect).norm() < 1e-14);
    }

    #[test]
    fn series_branch_is_continuous() {
        let ell = 0.8;
        for &lam in &[1e-7, -1e-7, 1e-5, -1e-5, 1.6e-6, -1.6e-6] {
            let z: f64 = ell * ell * lam;
            let direct_even = if lam > 0.0 {
                (ell * lam.sqrt()).cosh()
            } else {
                (ell * (-lam).sqrt()).cos()
            };
            let direct_odd = if lam > 0.0 {
                (ell * lam.sqrt()).sinh() / lam.sqrt()
            } else {
                (ell * (-lam).sqrt()).sin() / (-lam).sqrt()
            };
            assert!((even_part(lam, ell) - direct_even).abs() < 1e-15, "z={z}");
            assert!((odd_part(lam, ell) - direct_odd).abs() < 1e-12, "z={z}");
        }
        assert_eq!(odd_part(0.0, ell), ell);
        assert_eq!(even_part(0.0, ell), 1.0);
    }

    #[test]
    fn oracle_matches_scalar_cases() {
        for &(ell, e) in &[(0.7, 0.0), (1.0, -1.0), (PI, 1.0)] {
            let cfg = free_cfg(ell);
            let w = OmegaVector::binary(1, 0);
            let a = transfer_matrix(&cfg, &w, e).unwrap();
            let b = transfer_matrix_oracle(&cfg, &w, e).unwrap();
            assert!((a.as_matrix() - b.as_matrix()).norm() <= 1e-10 * b.as_matrix().norm());
        }
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(matrix_exp(&z).unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn exp_range_error() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 800.0, 0.0, 0.0]);
        assert!(matches!(matrix_exp(&a), Err(Error::Range(_))));
    }

    #[test]
    fn check_symplectic_cases() {
        assert_eq!(check_symplectic(&SymplecticMatrix::identity(2)), 0.0);
        let two = SymplecticMatrix::from_matrix(DMatrix::identity(4, 4) * 2.0).unwrap();
        assert!(check_symplectic(&two) > 0.0);
        assert!(matches!(
            SymplecticMatrix::from_matrix(DMatrix::identity(3, 3)),
            Err(Error::InvalidArgument(_))
        ));
    }
}
