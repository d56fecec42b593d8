//! Minimal dense symmetric matrices for the quadratic probe oracles.
//!
//! This is not a linear-algebra layer; it holds the Hessians of synthetic
//! quadratics (dimension <= a few dozen) and offers exactly the reductions
//! the closed-form moment formulas need: trace, Frobenius norm, quadratic
//! form, and matrix-vector product.

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Dense symmetric matrix, full row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Build from row-major entries, verifying exact symmetry.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension);
        }
        if data.len() != dim * dim {
            return Err(Error::InvalidParameter {
                name: "data",
                reason: format!("expected {} entries, got {}", dim * dim, data.len()),
            });
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if data[i * dim + j] != data[j * dim + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { dim, data })
    }

    /// Zero matrix.
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension);
        }
        Ok(Self {
            dim,
            data: vec![0.0; dim * dim],
        })
    }

    /// Diagonal matrix.
    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut m = Self::zeros(dim)?;
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * dim + i] = v;
        }
        Ok(m)
    }

    /// Random symmetric matrix with entries on the order of `scale`,
    /// built as `(A + A^T) / 2` so symmetry is exact in floating point.
    pub fn random(rng: &mut SeededRng, dim: usize, scale: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension);
        }
        let a: Vec<f64> = (0..dim * dim)
            .map(|_| rng.standard_normal() * scale)
            .collect();
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = 0.5 * (a[i * dim + j] + a[j * dim + i]);
            }
        }
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `u^T M u`.
    pub fn quad_form(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim);
        let mut acc = 0.0;
        for (i, ui) in u.iter().enumerate() {
            let row_slice = &self.data[i * self.dim..(i + 1) * self.dim];
            let row: f64 = row_slice.iter().zip(u).map(|(m, uj)| m * uj).sum();
            acc += ui * row;
        }
        acc
    }

    /// `M x` into a fresh vector.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }
}
