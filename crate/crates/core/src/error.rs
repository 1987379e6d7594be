use thiserror::Error;

use crate::geometry::Vec2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An operation was applied outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Betke reference direction collides with an edge normal.
    #[error("reference direction ({:.6}, {:.6}) is an edge normal; retry with ({:.6}, {:.6})", .rejected.x, .rejected.y, .suggested.x, .suggested.y)]
    RetryWithPerturbedW { rejected: Vec2, suggested: Vec2 },

    /// The d_tr optimizer did not settle; `best_rho` is the best value with a witness.
    #[error("approximation did not converge (best rho = {best_rho})")]
    Approximation { best_rho: f64 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("move not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
