use thiserror::Error;

/// Errors surfaced by the certification library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("states do not share the same party specification")]
    SpecMismatch,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("state set is not pairwise orthogonal (states {0} and {1})")]
    NotOrthogonal(usize, usize),
    #[error("parameter constraint violated: {0}")]
    ParamConstraintViolated(String),
    #[error("unknown state family: {0}")]
    UnknownFamily(String),
    #[error("combined states do not span the full space")]
    SpanDeficient,
    #[error("ideal is not zero-dimensional")]
    NotZeroDimensional,
    #[error("root finding did not converge within {0} iterations")]
    NonConvergence(u32),
    #[error("back-substituted solution residual {0:.3e} exceeds the acceptance bar")]
    ResidualTooLarge(f64),
    #[error("operator does not preserve orthogonality of the set")]
    OrthogonalityPreservationViolated,
    #[error("witness operator is proportional to the identity")]
    TrivialWitness,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("states {0:?} are not biseparable")]
    NotBiseparable(Vec<usize>),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
