// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "adaptive quadrature did not converge in {operation}: worst subinterval \
         [{lo:e}, {hi:e}] has error estimate {error:e} (total {total_error:e}, \
         requested {tolerance:e})"
    )]
    QuadratureNonConvergence {
        operation: &'static str,
        lo: f64,
        hi: f64,
        error: f64,
        total_error: f64,
        tolerance: f64,
    },

    #[error("degenerate eigenvalues {value} of a level shift block: resonance energies are required to be simple")]
    DegenerateEigenvalues { value: num_complex::Complex64 },

    #[error("resonance energies {first} and {second} coincide: resonance energies are required to be distinct")]
    ResonancesNotDistinct {
        first: num_complex::Complex64,
        second: num_complex::Complex64,
    },

    #[error("label has {n0} unflipped spins; enumerating 2^{n0} sign patterns needs an explicit pattern above {limit}")]
    TooManyPatterns { n0: usize, limit: usize },

    #[error("spin index {index} out of range for an ensemble of {total} spins")]
    SpinIndexOutOfRange { index: usize, total: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Rewrites the operation name carried by a quadrature failure.
    pub(crate) fn in_operation(self, operation: &'static str) -> Self {
        match self {
            Error::QuadratureNonConvergence {
                lo,
                hi,
                error,
                total_error,
                tolerance,
                ..
            } => Error::QuadratureNonConvergence {
                operation,
                lo,
                hi,
                error,
                total_error,
                tolerance,
            },
            other => other,
        }
    }
}
