use thiserror::Error;

use crate::context::{Context, Violation};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A context collected no particles, so no frequency can be formed.
    #[error("context {0} has an empty ensemble (no detected particles)")]
    ZeroEnsemble(Context),

    /// λ is undefined because one of the weighted branch probabilities is zero.
    #[error("degenerate branch: c1*p1 = {weighted1}, c2*p2 = {weighted2}")]
    DegenerateBranch { weighted1: f64, weighted2: f64 },

    /// A hyperbolic transform produced a value that is not a probability.
    #[error("value {0} is outside [0, 1]")]
    OutOfRange(f64),

    #[error("probability wave is not normalized: sum of |phi|^2 = {0}")]
    Normalization(f64),

    #[error("model violates {} invariant(s): {}", .0.len(), summarize(.0))]
    InvalidModel(Vec<Violation>),

    #[error("outcome space: {0}")]
    Space(String),

    #[error("length mismatch: expected {expected} bins, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid scenario: {0}")]
    Scenario(String),
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
