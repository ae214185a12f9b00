use alloc::string::String;

use crate::equilibrium::Regime;
use crate::params::ValidationReport;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(ValidationReport),
    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("regime mismatch: operation requires {expected:?}, parameters are {found:?}")]
    RegimeMismatch { expected: Regime, found: Regime },
    #[error("{what} did not converge (residual {residual:e})")]
    NonConvergence { what: &'static str, residual: f64 },
    #[error("contract design has no solution: {0}")]
    Unsolvable(String),
    #[error("effort shares are undefined when total effort at the breakthrough is zero")]
    UndefinedShare,
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }
}
