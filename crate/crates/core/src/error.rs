use thiserror::Error;

/// Errors shared across the crate.
///
/// The CLI maps these onto exit codes: input/precondition problems are
/// exit 2, infeasible/unbounded programs exit 3, and anything that ran
/// into an enumeration or size guard exits 4.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("linear program infeasible: {0}")]
    Infeasible(String),

    #[error("linear program unbounded: {0}")]
    Unbounded(String),

    #[error("desk-scale limit exceeded: {0}")]
    DeskScaleLimit(String),

    #[error("construction unsupported: {0}")]
    Unsupported(String),

    #[error("retries exhausted: {0}")]
    RetriesExhausted(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
