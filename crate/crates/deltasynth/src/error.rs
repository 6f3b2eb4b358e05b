use crate::game::UltimatelyPeriodicPlay;
use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("horizon {horizon} is shorter than the history length {history}")]
    InvalidHorizon { horizon: usize, history: usize },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("invalid monitor: {0}")]
    InvalidMonitor(String),
    #[error("invalid expression: {0}")]
    InvalidExpr(String),
    #[error("wrong hierarchy class: {0}")]
    WrongClass(String),
    #[error("labelling is not eventually constant along the witness play")]
    NotEventuallyConstant(UltimatelyPeriodicPlay),
    #[error("invalid Π⁰₂ presentation: {0}")]
    InvalidPresentation(String),
    #[error("configurations belong to different monitors")]
    MonitorMismatch,
    #[error("configuration is not winning for Player 1")]
    NotWinning,
    #[error("Player 1 has no winning strategy from the initial history")]
    NoWinningStrategy,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("node budget of {budget} exceeded while {context}")]
    BudgetExceeded { budget: usize, context: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{0}")]
    Io(String),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
