use thiserror::Error;

use crate::geometry::Point;

/// Errors raised by the library. Property failures found while checking a
/// construction are not errors; they are collected into reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coordinate out of range in point ({x}, {y})")]
    CoordinateRange { x: i64, y: i64 },

    #[error("duplicate point ({}, {})", .0.x, .0.y)]
    DuplicatePoint(Point),

    #[error("pair classification needs two distinct points, got ({}, {}) twice", .0.x, .0.y)]
    EqualPoints(Point),

    #[error("line needs two distinct defining indices, got {0} twice")]
    EqualIndices(usize),

    #[error("index {index} out of range for a set of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("coordinate overflow while transforming ({x}, {y})")]
    Overflow { x: i64, y: i64 },

    #[error("input is degenerate: points {0} and {1} share a coordinate")]
    DegenerateInput(usize, usize),

    #[error("layer index {index} out of range (decomposition has layers 0..={max})")]
    BadLayerIndex { index: usize, max: usize },

    #[error("point set is collinear: some line contains every point")]
    CollinearHost,

    #[error("sequence is not monotone at positions {0} and {1}")]
    NotMonotone(usize, usize),

    #[error("sequence must have at least {needed} points, got {got}")]
    SequenceTooShort { needed: usize, got: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("distance matrix violates metric axioms at ({i}, {j}, {k}): {reason}")]
    MetricViolation {
        i: usize,
        j: usize,
        k: usize,
        reason: &'static str,
    },

    #[error("property {tag} does not apply to a line with role {role}")]
    BadContext { tag: String, role: String },

    #[error("invalid threshold {0}: must lie strictly between 0 and 1")]
    BadThreshold(String),

    #[error("search space too large: {0}")]
    SpaceTooLarge(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
