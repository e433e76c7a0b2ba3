use crate::instances::ValidationReport;
use crate::solver::PipelineStats;
use thiserror::Error;

/// Library-wide error type. Usage errors (out-of-range ids, empty center
/// sets) panic instead; everything data- or resource-driven goes through
/// this enum so callers can map it to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("instance failed validation:\n{0}")]
    InvalidInstance(ValidationReport),

    #[error("schema: {0}")]
    Schema(String),

    #[error("search space of {size} candidates exceeds cap {cap}")]
    CapExceeded { size: u128, cap: u64 },

    #[error("node budget {budget} exhausted at radius {radius}")]
    NodeBudget { budget: u64, radius: f64 },

    #[error("no feasible solution found: {0}")]
    Infeasible(Box<PipelineStats>),

    #[error("no feasible center set exists")]
    NoFeasible,

    #[error("search aborted by resource limits: {0}")]
    Resource(Box<PipelineStats>),

    #[error("internal: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command-line frontend.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) => 1,
            Error::InvalidInstance(_) | Error::Infeasible(_) | Error::NoFeasible => 2,
            Error::CapExceeded { .. } | Error::NodeBudget { .. } | Error::Resource(_) => 3,
            Error::Internal(_) => 101,
        }
    }
}
