use std::fmt;

use thiserror::Error;

/// Errors raised by operator arithmetic, closure construction and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The bordered Gram inverse update found a non-positive Schur complement.
    #[error("numerical degeneracy while appending element {element}: schur complement {schur:e} at or below floor {floor:e}")]
    NumericalDegeneracy {
        element: usize,
        schur: f64,
        floor: f64,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("timed out after {0:.3} s")]
    Timeout(f64),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl fmt::Display) -> Self {
        Error::InvalidInput(msg.to_string())
    }
}
