use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Numerical { iterations: usize, residual: f64 },

    #[error("trace error at line {line}: {message}")]
    Trace { line: usize, message: String },

    #[error("trace io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("trace does not cover cells: {}", .missing.join(", "))]
    Coverage { missing: Vec<String> },

    #[error("value undefined (V* = 0) on weighted states {states:?}")]
    UndefinedState { states: Vec<usize> },

    #[error("policy error: {0}")]
    Policy(String),
}
