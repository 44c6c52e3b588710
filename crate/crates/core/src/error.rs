use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SudoqError {
    #[error("block side must be at least 1, got {0}")]
    BadDimension(usize),
    #[error("bad token {token:?} at position {position}: expected '.', '0' or 1..={max}")]
    BadToken { token: String, position: usize, max: usize },
    #[error("expected {expected} tokens, found {found}")]
    BadLength { expected: usize, found: usize },
    #[error("grid has empty cells")]
    NotFull,
    #[error("cell ({row}, {col}) is not normalized (norm {norm})")]
    NotNormalized { row: usize, col: usize, norm: f64 },
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("clues repeat symbol {symbol} within constraint {constraint}")]
    InfeasibleClues { constraint: usize, symbol: usize },
    #[error("rank mismatch: rank(S) = {source_rank}, rank(T) = {target_rank}")]
    RankMismatch { source_rank: usize, target_rank: usize },
    #[error("matrix is not positive semidefinite (eigenvalue {0})")]
    NotPsd(f64),
    #[error("exhaustive search needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: f64, budget: u64 },
    #[error("grid class {found} does not match conjecture {expected}")]
    WrongClass { expected: String, found: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, SudoqError>;
