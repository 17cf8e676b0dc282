use thiserror::Error;

/// Errors raised by the lattice, the solvers and the verification checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NonCommensurate: {0}")]
    NonCommensurate(String),

    #[error("UnknownSpec: {0}")]
    UnknownSpec(String),

    #[error("SupportViolation: {0}")]
    SupportViolation(String),

    #[error("SmallnessViolated: {0}")]
    SmallnessViolated(String),

    #[error("NonConvergence: increment {increment:e} after {iterations} iterations")]
    NonConvergence { iterations: usize, increment: f64 },

    #[error("StepCollapse: {0}")]
    StepCollapse(String),

    #[error("ConeOutsideGrid: {0}")]
    ConeOutsideGrid(String),

    #[error("GaussLawViolated: {0}")]
    GaussLawViolated(String),

    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
