//! Crate-wide error type.

use crate::geom::Vec2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Expression source failed to parse.
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    /// Expression referenced a name that is not `x`, `y`, `pi`, a function,
    /// or a declared parameter.
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    /// A function was called with the wrong number of arguments.
    #[error("{name} expects {expected} argument(s), got {got} (offset {offset})")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
        offset: usize,
    },

    /// Runtime evaluation fault (division by zero, non-finite result).
    /// `offset` locates the offending operator in the expression source;
    /// built-in families report `offset` 0.
    #[error("evaluation fault at offset {offset}: {message} (point {x}, {y})")]
    EvalFault {
        offset: usize,
        message: String,
        x: f64,
        y: f64,
    },

    /// Symbolic differentiation hit a construct it does not support.
    #[error("non-differentiable construct at offset {offset}: {message}")]
    NonDifferentiable { offset: usize, message: String },

    /// An expression map failed the mandatory deck-commutation check.
    #[error("map is not homotopic to the identity: deck-commutation defect {defect:.3e} exceeds {tol:.3e}")]
    NotPeriodic { defect: f64, tol: f64 },

    /// A batch operation aborted; carries the seed point that faulted.
    #[error("evaluation fault at seed ({seed_x}, {seed_y}): {source}")]
    BatchFault {
        seed_x: f64,
        seed_y: f64,
        #[source]
        source: Box<Error>,
    },

    /// Half-plane intersection came out empty (inconsistent support data).
    #[error("half-plane intersection is empty: {0}")]
    EmptyIntersection(String),

    /// Half-plane intersection is unbounded (directions do not span).
    #[error("half-plane intersection is unbounded: {0}")]
    UnboundedIntersection(String),

    /// A guaranteed-termination bound was exceeded; indicates a logic bug.
    #[error("internal logic error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn batch(seed: Vec2, source: Error) -> Error {
        Error::BatchFault {
            seed_x: seed.x,
            seed_y: seed.y,
            source: Box::new(source),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
