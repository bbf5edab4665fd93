// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// `ell` is not below the critical length, so the energy interval is empty.
    #[error("empty energy interval: ell={ell} is not below the critical length ell_c={ell_c}")]
    EmptyInterval { ell: f64, ell_c: f64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
