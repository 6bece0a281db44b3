use thiserror::Error;

use crate::tomography::Estimate;

/// Errors raised by density construction, scoring and estimation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix must have dimension at least 1")]
    EmptyMatrix,

    #[error("matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is not 1 (got {0})")]
    BadTrace(f64),

    #[error("vector has (near) zero norm")]
    ZeroVector,

    #[error("vector is not l2-normalized (norm {0})")]
    NotNormalized(f64),

    #[error("entry {index} is not a finite value")]
    NonFinite { index: usize },

    #[error("not a probability distribution: {0}")]
    NotDistribution(String),

    #[error("symmetric eigensolver did not converge")]
    ConvergenceFailure,

    #[error("expected a 2x2 density, got dimension {0}")]
    WrongDimension(usize),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("all superposition weights are zero")]
    AllZeroWeights,

    #[error("negative weight {weight} for index {index}")]
    NegativeWeight { index: usize, weight: f64 },

    #[error("event sequence is empty")]
    EmptySequence,

    #[error("duplicate document id {0:?}")]
    DuplicateDocId(String),

    #[error("unknown document {0:?}")]
    UnknownDoc(String),

    #[error("document {0:?} has no tokens")]
    EmptyDocument(String),

    #[error("unknown term {0:?}")]
    UnknownTerm(String),

    #[error("query has no in-vocabulary terms")]
    NoKnownTerms,

    #[error("invalid smoothing parameter: {0}")]
    InvalidSmoothing(String),

    #[error("density is not a pure state (purity {0})")]
    NotPure(f64),

    #[error("method {method} requires {expected}")]
    RepresentationMismatch {
        method: &'static str,
        expected: &'static str,
    },

    #[error("ranked lists are not comparable: {0}")]
    DocSetMismatch(String),

    #[error("event {index} ({label}) has zero measure under the current state")]
    ZeroMeasureEvent { index: usize, label: String },

    #[error("event {0} is not a standard-basis event")]
    NonBasisEvent(usize),

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("invalid estimator configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "estimator stopped after {} iterations without converging",
        .0.steps()
    )]
    DidNotConverge(Box<Estimate>),
}

pub type Result<T> = std::result::Result<T, Error>;
