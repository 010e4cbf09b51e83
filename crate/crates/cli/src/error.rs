//! CLI error carrying the process exit code.
//!
//! Exit codes: 0 success, 1 runtime/certification failure, 2 configuration
//! or usage error, 3 method inapplicable for the configured system.

use std::fmt;

use tbdrive_core::propagate::PropagateError;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn inapplicable(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        Self::runtime(format!("{context}: {err}"))
    }

    /// Map a propagation error onto an exit code: applicability guards give
    /// 3, bad run parameters give 2.
    pub fn from_propagate(err: PropagateError) -> Self {
        match err {
            PropagateError::DirichletRequired { .. }
            | PropagateError::NoSu2Realization { .. }
            | PropagateError::SingularLambda { .. } => {
                Self::inapplicable(format!("method inapplicable: {err}"))
            }
            PropagateError::FactorizationOverflow { .. } => {
                Self::runtime(format!("method failed: {err}"))
            }
            other => Self::config(format!("{other}")),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}
