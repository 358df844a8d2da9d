use thiserror::Error;

use crate::engine::Plan;
use crate::enclosure::Enclosure;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The truncation `(N, λ)` does not satisfy the validity hypothesis, so it
    /// bounds nothing.
    #[error("invalid (N, λ) = ({n}, {lambda}): {reason}")]
    InvalidTruncation {
        n: u32,
        lambda: String,
        reason: String,
    },

    /// The escalation budget ran out before the enclosure met the tolerance.
    #[error("unreachable tolerance after {escalations} escalations: best width {}", best.0.width())]
    UnreachableTolerance {
        escalations: u32,
        best: Box<(Enclosure, Plan)>,
    },

    /// Two certified bounds crossed. This indicates a defect, never a
    /// property of the input.
    #[error("inconsistent bounds: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
