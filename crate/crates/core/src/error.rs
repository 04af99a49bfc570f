use thiserror::Error;

/// Errors raised by the analysis routines.
///
/// Negative analysis verdicts (a path that is not auxetic, a framework with a
/// trivial auxetic cone) are ordinary return values, not errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("dimension error: expected d = {expected}, got d = {got}")]
    DimensionError { expected: usize, got: usize },

    #[error("cone search undecided after budget exhausted (best min-eigenvalue {best_value:e})")]
    Undecided { best_value: f64 },

    #[error("no auxetic direction available at this framework")]
    NoAuxeticDirection,

    #[error("constraint projection failed at tau = {tau}")]
    StepFailure { tau: f64 },

    #[error("pseudo-triangulation generator stalled at {edges} of {target} edge orbits")]
    GeneratorStalled { edges: usize, target: usize },

    #[error("complex nodes: radicand {radicand:e} is negative")]
    ComplexNodes { radicand: f64 },

    #[error("cone inclusion violated: {0}")]
    InclusionViolation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
