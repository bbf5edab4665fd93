// SPDX-License-Identifier: Apache-2.0

//! Matrix-valued random Schrödinger operators on the line: single-cell transfer
//! matrices, the critical length and energy interval on which every
//! transfer-matrix generator lies in a prescribed neighbourhood of the
//! identity, a numerical check that the generators' logarithms span the
//! symplectic Lie algebra, and Monte-Carlo estimation of the Lyapunov spectrum.
//!
//! The model is
//!
//! ```text
//! H = -d²/dx² ⊗ I_N + V₀ + Σₙ diag(c₁ ω₁⁽ⁿ⁾, …, c_N ω_N⁽ⁿ⁾) 1_[0,ℓ](x - ℓn)
//! ```
//!
//! with `V₀` the tridiagonal matrix carrying zeros on the diagonal and ones on
//! both off-diagonals.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod interval;
pub mod lie;
pub mod linalg;
pub mod lyapunov;
pub mod model;
pub mod propagator;
pub mod report;

pub use config::{parse_config, RunConfig};
pub use error::{Error, Result};
pub use interval::{
    critical_length, energy_interval, extremal_eigenvalues, verify_containment, ContainmentReport,
    EnergyInterval, ExtremalEigenvalues,
};
pub use lie::{
    bracket, lie_span_dimension, sp_dimension, symplectic_form, verify_sp_generation, MatrixSpan,
    SpGeneration,
};
pub use lyapunov::{
    lyapunov_spectrum, sample_omega, separability_scan, LyapunovEstimate, ScanOptions, ScanReport,
    Verdict,
};
pub use model::{
    build_m, build_v0, build_x, spectrum_m, x_norm, BlockHamiltonianMatrix, ModelConfig,
    OmegaVector, SiteLaw, SymmetricMatrix,
};
pub use propagator::{check_symplectic, transfer_matrix, transfer_matrix_oracle, SymplecticMatrix};
