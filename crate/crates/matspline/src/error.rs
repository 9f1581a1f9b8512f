//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by matrix arithmetic, problem setup, and the spline builder.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two operands have incompatible shapes.
    #[error("dimension mismatch in {op}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    /// A square matrix was required.
    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    /// Linear system is singular to working precision.
    #[error("matrix is singular to working precision (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    Singular { pivot: f64, threshold: f64 },

    /// An operation produced a non-finite entry.
    #[error("{op} produced a non-finite entry")]
    NonFinite { op: &'static str },

    /// Truncated series failed to reach the tolerance within the term cap.
    #[error("{op} did not converge within {max_terms} terms (argument norm {norm:.3e} too large for a plain series)")]
    SeriesDiverged {
        op: &'static str,
        max_terms: usize,
        norm: f64,
    },

    /// A scalar argument was outside its admissible range.
    #[error("invalid argument for {op}: {message}")]
    InvalidArgument { op: &'static str, message: String },

    /// Evaluation point outside the spline's interval.
    #[error("x = {x} is outside the domain [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    /// No Lipschitz constant available for a general right-hand side.
    #[error(
        "no Lipschitz constant: supply one explicitly (the step bound is unusable without it)"
    )]
    MissingLipschitz,

    /// Unknown builtin problem name.
    #[error("unknown builtin problem '{name}'; available: {available}")]
    UnknownProblem { name: String, available: String },

    /// Step size violates the existence bound h < sqrt(6/L).
    #[error(
        "step h = {h} rejected: the bound requires h < {limit} (= sqrt(6/L) with L = {lipschitz})"
    )]
    RejectedStep { h: f64, limit: f64, lipschitz: f64 },

    /// Fixed-point iteration hit the iteration cap.
    #[error("fixed-point iteration did not converge after {iterations} iterations (last residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A verification fixture was fed data of the wrong shape.
    #[error("fixture mismatch: {message}")]
    Fixture { message: String },

    /// A problem file could not be parsed.
    #[error("problem file error: {message}")]
    ProblemFile { message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
