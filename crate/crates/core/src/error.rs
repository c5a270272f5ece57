use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    SpecMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("label count mismatch: {0} vs {1}")]
    LabelCountMismatch(usize, usize),
    #[error("directedness mismatch between pattern and target")]
    DirectednessMismatch,
    #[error("label map has arity {found}, expected {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("budget exceeded in {what}: needs {needed}, limit {limit}")]
    Budget {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    #[error("block {block} has {size} positions, needs {needed}")]
    BlockTooSmall {
        block: usize,
        size: usize,
        needed: usize,
    },
    #[error("no family graph separates {0}")]
    SeparationFailure(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no witness found within the search bounds")]
    WitnessNotFound,
    #[error("oracle and constructive verdicts disagree: {0}")]
    Disagreement(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),
}

impl Error {
    pub(crate) fn budget(what: &'static str, needed: u128, limit: u64) -> Self {
        Error::Budget {
            what,
            needed,
            limit: limit as u128,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }

    /// Errors caused by the caller's input rather than by resource limits or defects.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::Budget { .. }
                | Error::SeparationFailure(_)
                | Error::Disagreement(_)
                | Error::InvariantViolated(_)
                | Error::WitnessNotFound
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
