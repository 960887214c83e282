use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("malformed setting: {0}")]
    MalformedSetting(String),

    #[error("malformed representation: {0}")]
    MalformedRepresentation(String),

    #[error("path is not composable: {0}")]
    Composition(String),

    #[error("capacity exceeded: {what} is {got}, bound is {bound}")]
    Capacity {
        what: &'static str,
        got: usize,
        bound: usize,
    },

    #[error("illegal move: {0}")]
    IllegalMove(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("inconsistent data: {0}")]
    Inconsistency(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("no semi-invariants of positive degree: the semistable locus is empty")]
    EmptyProj,

    #[error("budget of {budget_secs}s exhausted after {completed}/{total} partitions ({found} settings found so far)")]
    BudgetExhausted {
        budget_secs: u64,
        completed: usize,
        total: usize,
        found: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),
}
