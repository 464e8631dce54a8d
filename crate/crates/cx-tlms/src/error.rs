//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by tensor, filter and simulation operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("index {index} out of bounds for mode {mode} (size {size})")]
    IndexOutOfBounds {
        mode: usize,
        index: usize,
        size: usize,
    },

    #[error("invalid mode {mode} for an order-{order} tensor")]
    InvalidMode { mode: usize, order: usize },

    #[error("non-finite input: {context}")]
    NonFinite { context: &'static str },

    #[error("capacity exceeded: {elements} elements > {limit} limit")]
    Capacity { elements: usize, limit: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numeric abort: non-finite state in {arch} at sample {sample} of run {run}")]
    NumericAbort {
        arch: String,
        run: usize,
        sample: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
