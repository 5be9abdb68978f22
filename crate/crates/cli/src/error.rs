// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("{operation}: {source}")]
    Numeric {
        operation: &'static str,
        #[source]
        source: spinbath::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("validity check failed: {0}")]
    Validity(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validity(_) => 2,
            CliError::Verification(_) => 3,
            _ => 1,
        }
    }
}

pub(crate) trait NumericContext<T> {
    fn during(self, operation: &'static str) -> Result<T>;
}

impl<T> NumericContext<T> for spinbath::Result<T> {
    fn during(self, operation: &'static str) -> Result<T> {
        self.map_err(|source| CliError::Numeric { operation, source })
    }
}
