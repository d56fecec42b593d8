//! The benchmark suite: non-smooth objectives with exact Clarke-distance
//! oracles, the quantization operator with its straight-through backward
//! rule, synthetic two-class datasets, and a small dense ReLU network.
//!
//! Every objective exposes one fixed measurable selection of its Clarke
//! subdifferential as `gradient`; at kinks the selection takes sign(0) = 0.
//! Optimizers consume that selection as-is and never resample.

mod closed_form;
mod dataset;
mod mlp;
mod quantize;

pub use closed_form::{synthetic_landscape, L1Quadratic, Linear, Quadratic};
pub use dataset::{draw_blob_sample, make_blobs, SampleSet};
pub use mlp::{MlpObjective, MlpSpec};
pub use quantize::{dequantize, quantize, ste_gradient, QuantizerConfig, Staircase};

use crate::vector::ParamVector;

/// Mini-batch selector: indices into the objective's dataset, or `None` for
/// the full dataset (and always `None` for closed-form objectives).
pub type BatchIndices<'a> = Option<&'a [usize]>;

/// An evaluatable loss with a fixed subgradient selection and, when the
/// function is simple enough to admit one, an exact distance-to-stationarity
/// oracle.
pub trait Objective: Send + Sync {
    /// Parameter dimension.
    fn dim(&self) -> usize;

    /// Loss value at `x` on the given batch.
    fn value(&self, x: &ParamVector, batch: BatchIndices<'_>) -> f64;

    /// One fixed element of the Clarke subdifferential at `x`.
    fn gradient(&self, x: &ParamVector, batch: BatchIndices<'_>) -> ParamVector;

    /// Exact Euclidean distance from 0 to the Clarke subdifferential at `x`,
    /// when the objective has a closed form for it. Zero exactly on the
    /// stationary set.
    fn clarke_distance(&self, _x: &ParamVector) -> Option<f64> {
        None
    }

    /// Number of samples when the objective is dataset-backed.
    fn num_samples(&self) -> Option<usize> {
        None
    }
}

/// Constant function; every probe of it is exactly zero.
#[derive(Clone, Debug)]
pub struct Constant {
    dim: usize,
    value: f64,
}

impl Constant {
    pub fn new(dim: usize, value: f64) -> Self {
        Self { dim, value }
    }
}

impl Objective for Constant {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, _x: &ParamVector, _batch: BatchIndices<'_>) -> f64 {
        self.value
    }

    fn gradient(&self, x: &ParamVector, _batch: BatchIndices<'_>) -> ParamVector {
        ParamVector::zeros(x.dim()).expect("dim >= 1")
    }

    fn clarke_distance(&self, _x: &ParamVector) -> Option<f64> {
        Some(0.0)
    }
}
