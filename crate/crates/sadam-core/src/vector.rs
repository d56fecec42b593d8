//! Flat parameter vectors and the arithmetic the optimizers are built on.
//!
//! Everything is `f64`. Probe variances at perturbation scales around 1e-2
//! lose their signal in single precision, so there is no `f32` path.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A flat, fixed-dimension parameter vector.
///
/// Construction rejects empty and non-finite input; operations that combine
/// two vectors check dimensions and return [`Error::DimensionMismatch`] on
/// disagreement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    data: Vec<f64>,
}

impl ParamVector {
    /// Wrap a raw vector. Fails on empty input or non-finite entries.
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidDimension);
        }
        if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "data",
                reason: format!("non-finite entry {} at index {bad}", data[bad]),
            });
        }
        Ok(Self { data })
    }

    /// Zero vector of dimension `dim` (`dim >= 1`).
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension);
        }
        Ok(Self {
            data: vec![0.0; dim],
        })
    }

    /// Internal constructor for values already known to be well-formed.
    pub(crate) fn from_raw(data: Vec<f64>) -> Self {
        debug_assert!(!data.is_empty());
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    /// True if every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    /// Dot product.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Euclidean norm.
    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `a * x + y`, leaving both inputs untouched.
    pub fn axpy(a: f64, x: &Self, y: &Self) -> Result<Self> {
        x.check_dim(y)?;
        Ok(Self::from_raw(
            x.data
                .iter()
                .zip(&y.data)
                .map(|(xi, yi)| a * xi + yi)
                .collect(),
        ))
    }

    /// Elementwise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_raw(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    /// Elementwise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_raw(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    /// Elementwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_raw(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * b)
                .collect(),
        ))
    }

    /// Elementwise division with a caller-supplied denominator offset:
    /// `self_i / (other_i + eps)`. The caller chooses `eps`; this library
    /// never picks a guard value silently.
    pub fn div_eps(&self, other: &Self, eps: f64) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_raw(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a / (b + eps))
                .collect(),
        ))
    }

    /// Elementwise square root.
    pub fn sqrt(&self) -> Self {
        Self::from_raw(self.data.iter().map(|v| v.sqrt()).collect())
    }

    /// Elementwise clamp into `[lo, hi]`.
    pub fn clamp(&self, lo: f64, hi: f64) -> Self {
        Self::from_raw(self.data.iter().map(|v| v.clamp(lo, hi)).collect())
    }

    /// Scalar multiple.
    pub fn scale(&self, a: f64) -> Self {
        Self::from_raw(self.data.iter().map(|v| a * v).collect())
    }
}

impl std::ops::Index<usize> for ParamVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}
