use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines and the experiment harness.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what}: tolerance not met (estimate {estimate:e}, error bound {error:e})")]
    Tolerance {
        what: String,
        estimate: f64,
        error: f64,
    },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("kernel series truncated at degree {degree}: tail bound {bound:e} exceeds tolerance")]
    Truncation {
        partial: Complex64,
        bound: f64,
        degree: usize,
    },

    #[error("{what}: no convergence after {iterations} iterations (best value {best:e})")]
    Convergence {
        what: String,
        best: f64,
        iterations: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("non-finite value at node {node}: {what}")]
    Evaluation { node: Complex64, what: String },

    #[error("lattice invalid: {0}")]
    LatticeInvalid(String),

    #[error("resource limit: {reason} (try r_max <= {suggested_r_max:.4})")]
    Resource {
        reason: String,
        suggested_r_max: f64,
    },

    #[error("patch {patch}: {reason}")]
    Patch { patch: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        LabError::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        LabError::Precondition(msg.into())
    }

    /// True for failures caused by bad inputs rather than numerics.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            LabError::Domain(_)
                | LabError::Precondition(_)
                | LabError::Parse(_)
                | LabError::Io(_)
                | LabError::Csv(_)
                | LabError::LatticeInvalid(_)
        )
    }
}
