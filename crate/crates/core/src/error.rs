use thiserror::Error;

use crate::lp::LpError;

/// Errors raised by the instance, oracle and ratio operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain the operation is defined on
    /// (for instance `d < 4` for the insertion costs, or odd `n`).
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("point index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("instance has {points} points, cap is {cap}")]
    TooLarge { points: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("LP solver failed: {0}")]
    Lp(#[from] LpError),

    #[error("cutting-plane loop did not converge after {rounds} rounds")]
    CutRoundLimit { rounds: usize },

    /// The LP solver reported a non-optimal status where an optimum was required.
    #[error("LP relaxation ended with status {0:?}")]
    LpStatus(crate::lp::LpStatus),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than by a numerical
    /// or internal failure.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::IndexOutOfRange { .. }
                | Error::TooLarge { .. }
                | Error::Parse(_)
                | Error::Unsupported(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
