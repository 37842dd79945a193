// Copyright 2026 The unruh-metrology Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The requested Fock truncation cannot hold the state within tolerance.
    #[error("truncation error: {reason} (suggested dimension: {suggested_dim})")]
    Truncation { reason: String, suggested_dim: usize },

    #[error("index {index} out of truncation (dimension {dim})")]
    IndexOutOfTruncation { index: usize, dim: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("finite-difference step {step} outside [{min}, {max}]")]
    StepSize { step: f64, min: f64, max: f64 },

    #[error("singular Jacobian: {0}")]
    SingularJacobian(String),

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("Fisher-information sum did not converge: {0}")]
    TailBound(String),
}
