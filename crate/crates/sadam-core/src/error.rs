//! Error types shared across the library.

use crate::vector::ParamVector;
use thiserror::Error;

/// Errors produced by library operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Two vectors (or a vector and an objective) disagree on dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A dimension of zero was requested where `dim >= 1` is required.
    #[error("dimension must be at least 1")]
    InvalidDimension,

    /// A hyperparameter or configuration field is out of its valid range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The objective returned a non-finite value during a geometric probe.
    ///
    /// `probe_index` is `None` when the failure occurred at the base point
    /// rather than a perturbed one; `direction` carries the offending probe
    /// direction when there is one.
    #[error("probe failure: non-finite value {value} at {}", probe_location(*probe_index))]
    ProbeFailure {
        probe_index: Option<usize>,
        value: f64,
        direction: Option<Box<ParamVector>>,
    },

    /// A gradient evaluation produced NaN or infinity.
    #[error("non-finite gradient at step {step}")]
    NonFiniteGradient { step: u64 },

    /// The relative-curvature ratio is undefined because the gradient is zero.
    #[error("relative curvature is undefined for a zero gradient")]
    UndefinedCurvature,

    /// A matrix argument that must be symmetric is not.
    #[error("matrix is not symmetric at entry ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    /// An analysis window exceeds the available record length.
    #[error("window of {window} steps exceeds record of {available} steps")]
    WindowTooLarge { window: usize, available: usize },

    /// An experiment configuration references an unknown objective/optimizer.
    #[error("unknown {kind} id: {id}")]
    UnknownId { kind: &'static str, id: String },

    /// A dataset operation received an empty or undersized sample set.
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    /// File output failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn probe_location(index: Option<usize>) -> String {
    match index {
        Some(i) => format!("probe direction {i}"),
        None => "the probe base point".to_string(),
    }
}

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
