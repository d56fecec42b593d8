//! Simulated quantization: round-and-clamp forward, straight-through
//! backward, and the piecewise-constant staircase objective built from them.

use crate::error::{Error, Result};
use crate::objectives::{BatchIndices, Objective};
use crate::vector::ParamVector;
use serde::{Deserialize, Serialize};

/// Uniform quantizer `x_q = clamp(round(x * scale), q_min, q_max)`.
///
/// Ties round half-to-even so the mapping is bias-free; golden outputs
/// depend on this choice, so it is part of the contract.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizerConfig {
    pub scale: f64,
    pub q_min: i64,
    pub q_max: i64,
}

impl QuantizerConfig {
    pub fn new(scale: f64, q_min: i64, q_max: i64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "scale",
                reason: format!("must be positive and finite, got {scale}"),
            });
        }
        if q_min >= q_max {
            return Err(Error::InvalidParameter {
                name: "q_min/q_max",
                reason: format!("requires q_min < q_max, got {q_min} >= {q_max}"),
            });
        }
        Ok(Self {
            scale,
            q_min,
            q_max,
        })
    }

    /// Width of one quantization plateau in input units.
    pub fn plateau_width(&self) -> f64 {
        1.0 / self.scale
    }

    /// Center of the plateau holding quantization level `level`.
    pub fn plateau_center(&self, level: i64) -> f64 {
        level as f64 / self.scale
    }

    /// The input-space boundary between levels `level` and `level + 1`.
    /// With ties-to-even rounding the exact boundary point belongs to the
    /// even neighbor; probes care only about its location.
    pub fn jump_at(&self, level: i64) -> f64 {
        (level as f64 + 0.5) / self.scale
    }

    fn in_range(&self, x: f64) -> bool {
        let scaled = x * self.scale;
        scaled >= self.q_min as f64 && scaled <= self.q_max as f64
    }
}

/// Elementwise quantization to integer levels (returned as exact floats).
pub fn quantize(x: &[f64], q: &QuantizerConfig) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            (v * q.scale)
                .round_ties_even()
                .clamp(q.q_min as f64, q.q_max as f64)
        })
        .collect()
}

/// Map integer levels back to input units: `v / scale`.
pub fn dequantize(levels: &[f64], q: &QuantizerConfig) -> Vec<f64> {
    levels.iter().map(|&v| v / q.scale).collect()
}

/// Straight-through backward rule with clipping: the upstream gradient
/// passes unchanged where `x * scale` lies inside `[q_min, q_max]` and is
/// zeroed where the clamp saturates.
pub fn ste_gradient(upstream: &[f64], x: &[f64], q: &QuantizerConfig) -> Vec<f64> {
    debug_assert_eq!(upstream.len(), x.len());
    upstream
        .iter()
        .zip(x)
        .map(|(&u, &xi)| if q.in_range(xi) { u } else { 0.0 })
        .collect()
}

/// Separable staircase objective
/// `f(x) = sum_i (dequantize(quantize(x_i)) - target)^2`.
///
/// Piecewise constant with jumps at the rounding boundaries; the canonical
/// instance is one-dimensional, and the separable extension exists so the
/// 2-D field scanner has a staircase surface to walk.
///
/// `gradient` applies the straight-through rule to the squared error, so it
/// is nonzero on plateaus even though the true derivative there is zero.
#[derive(Clone, Debug)]
pub struct Staircase {
    quantizer: QuantizerConfig,
    target: f64,
    dim: usize,
}

impl Staircase {
    /// The canonical 1-D staircase.
    pub fn new(quantizer: QuantizerConfig, target: f64) -> Self {
        Self::with_dim(quantizer, target, 1)
    }

    /// Separable d-dimensional extension.
    pub fn with_dim(quantizer: QuantizerConfig, target: f64, dim: usize) -> Self {
        assert!(dim >= 1, "dim must be >= 1");
        Self {
            quantizer,
            target,
            dim,
        }
    }

    pub fn quantizer(&self) -> &QuantizerConfig {
        &self.quantizer
    }
}

impl Objective for Staircase {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &ParamVector, _batch: BatchIndices<'_>) -> f64 {
        let deq = dequantize(&quantize(x.as_slice(), &self.quantizer), &self.quantizer);
        deq.iter().map(|v| (v - self.target) * (v - self.target)).sum()
    }

    fn gradient(&self, x: &ParamVector, _batch: BatchIndices<'_>) -> ParamVector {
        let deq = dequantize(&quantize(x.as_slice(), &self.quantizer), &self.quantizer);
        let upstream: Vec<f64> = deq.iter().map(|v| 2.0 * (v - self.target)).collect();
        ParamVector::from_raw(ste_gradient(&upstream, x.as_slice(), &self.quantizer))
    }
}
