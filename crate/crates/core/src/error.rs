use std::io;

/// Errors surfaced by the embedding pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("truncated SVD did not converge after {matvecs} products (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    Convergence {
        matvecs: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("alignment error: {missing_count} label(s) missing from embedding {missing:?}, {extra_count} unknown label(s) {extra:?}")]
    Alignment {
        /// First few labels present in the graph but not in the embedding.
        missing: Vec<String>,
        missing_count: usize,
        /// First few labels present in the embedding but not in the graph.
        extra: Vec<String>,
        extra_count: usize,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
