//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the numerical routines.
///
/// Domain and pole errors describe inputs outside the region where a formula is
/// defined; the numerical variants describe a computation that ran but could not
/// certify its answer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the documented domain of the operation.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// Evaluation requested at (or numerically indistinguishable from) a pole.
    #[error("pole of {op} at chi = {chi}, x = {x}")]
    Pole { op: &'static str, chi: f64, x: f64 },

    /// A continuous branch cannot be followed through the requested point.
    #[error("branch point encountered in {op} at chi = {chi}, x = {x}")]
    Branch { op: &'static str, chi: f64, x: f64 },

    /// A solution required to stay positive (or otherwise admissible) did not.
    #[error("validity condition violated in {op}: {reason}")]
    Validity { op: &'static str, reason: String },

    /// An iterative or adaptive procedure stopped before meeting its tolerance.
    #[error("{op} did not converge: {reason}")]
    NonConvergence { op: &'static str, reason: String },

    /// Catastrophic cancellation: sum of magnitudes over magnitude of the sum.
    #[error("cancellation ratio {ratio:.3e} in {op} exceeds the limit {limit:.1e}")]
    Cancellation { op: &'static str, ratio: f64, limit: f64 },
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain { op, reason: reason.into() }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
