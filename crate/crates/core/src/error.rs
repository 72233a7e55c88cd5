//! Error types shared by all model modules.

use thiserror::Error;

/// Errors reported by model construction and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its documented invariant.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: String,
    },

    /// A week index fell outside the scenario horizon.
    #[error("week {week} out of range 1..={horizon}")]
    WeekOutOfRange { week: u32, horizon: u32 },

    /// Two scenarios that must share a horizon do not.
    #[error("horizon mismatch: {left} weeks vs {right} weeks")]
    HorizonMismatch { left: u32, right: u32 },

    /// An intermediate value stopped being finite.
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    /// An iterative solver exhausted its iteration budget.
    #[error("solver failed to converge within {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: u32, residual: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
