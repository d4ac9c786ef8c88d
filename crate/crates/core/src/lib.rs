//! Exact symbolic tensor calculus on skew, almost-Lie and Lie algebroids.
//!
//! Everything is computed over the field of rational functions in the
//! chart coordinates, so every identity check is an exact decision, not a
//! numerical test. The crate covers the contravariant calculus of a
//! bivector field, Jacobi pairs, contravariant Levi-Civita connections
//! and the geometric structures built on top of them (cosymplectic,
//! contact, locally conformally symplectic, almost contact metric), plus
//! a small model language and check runner used by the CLI.

pub mod algebroid;
pub mod checks;
pub mod coeff;
pub mod generator;
pub mod jacobi;
pub mod linalg;
pub mod model;
pub mod poisson;
pub mod riemann;
pub mod structures;

use thiserror::Error as ThisError;

/// Errors shared across the engine.
#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at evaluation point")]
    PoleAtPoint,
    #[error("section rank does not match the algebroid")]
    RankMismatch,
    #[error("tensors have different variance")]
    VarianceMismatch,
    #[error("tensor degrees are incompatible")]
    DegreeMismatch,
    #[error("matrix is degenerate over the scalar field")]
    Degenerate,
    #[error("the base algebroid is not a Lie algebroid")]
    NotLie,
    #[error("the pair is not a Jacobi structure")]
    NotJacobi,
    #[error("no 1-form lambda has been set on the context")]
    MissingLambda,
    #[error("tensor does not live on the connection's base")]
    BaseMismatch,
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("rank must be odd")]
    EvenRank,
    #[error("the top-degree form is degenerate")]
    DegenerateTopForm,
    #[error("the 1-form is not a contact form")]
    NotContact,
    #[error("the metric is not associated with the solved endomorphism")]
    NotAssociated,
    #[error("axiom violated: {0}")]
    AxiomViolation(String),
    #[error("unsupported generator parameters: {0}")]
    UnsupportedParams(String),
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown name `{name}` at line {line}")]
    UnknownName { name: String, line: usize },
    #[error("shape error at line {line}: {msg}")]
    Shape { line: usize, msg: String },
}
