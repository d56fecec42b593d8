//! Closed-form objectives with exact Clarke-distance oracles.

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::objectives::{BatchIndices, Objective};
use crate::vector::ParamVector;

/// Weighted L1-plus-diagonal-quadratic family:
///
/// ```text
/// f(x) = c * sum_i |x_i - a_i|  +  1/2 * sum_i q_i * x_i^2
/// ```
///
/// The subgradient selection takes sign(0) = 0 at the kinks `x_i = a_i`.
/// The Clarke subdifferential is the per-coordinate interval
/// `q_i x_i + c * d|x_i - a_i|`, where `d|t|` is `{sign(t)}` off the kink
/// and `[-1, 1]` on it, so the distance from zero has a closed form.
#[derive(Clone, Debug)]
pub struct L1Quadratic {
    anchor: Vec<f64>,
    l1_weight: f64,
    quad: Vec<f64>,
}

impl L1Quadratic {
    pub fn new(anchor: Vec<f64>, l1_weight: f64, quad: Vec<f64>) -> Result<Self> {
        if anchor.is_empty() {
            return Err(Error::InvalidDimension);
        }
        if anchor.len() != quad.len() {
            return Err(Error::DimensionMismatch {
                expected: anchor.len(),
                got: quad.len(),
            });
        }
        if l1_weight.is_nan() || l1_weight < 0.0 {
            return Err(Error::InvalidParameter {
                name: "l1_weight",
                reason: format!("must be >= 0, got {l1_weight}"),
            });
        }
        if let Some(q) = quad.iter().find(|q| q.is_nan() || **q < 0.0) {
            return Err(Error::InvalidParameter {
                name: "quad",
                reason: format!("diagonal weights must be >= 0, got {q}"),
            });
        }
        Ok(Self {
            anchor,
            l1_weight,
            quad,
        })
    }
}

impl Objective for L1Quadratic {
    fn dim(&self) -> usize {
        self.anchor.len()
    }

    fn value(&self, x: &ParamVector, _batch: BatchIndices<'_>) -> f64 {
        let mut acc = 0.0;
        for (i, xi) in x.iter().enumerate() {
            acc += self.l1_weight * (xi - self.anchor[i]).abs() + 0.5 * self.quad[i] * xi * xi;
        }
        acc
    }

    fn gradient(&self, x: &ParamVector, _batch: BatchIndices<'_>) -> ParamVector {
        let data = x
            .iter()
            .enumerate()
            .map(|(i, xi)| {
                let t = xi - self.anchor[i];
                let sub = if t == 0.0 { 0.0 } else { t.signum() };
                self.l1_weight * sub + self.quad[i] * xi
            })
            .collect();
        ParamVector::from_raw(data)
    }

    fn clarke_distance(&self, x: &ParamVector) -> Option<f64> {
        let mut acc = 0.0;
        for (i, xi) in x.iter().enumerate() {
            let smooth = self.quad[i] * xi;
            let t = xi - self.anchor[i];
            let d = if t == 0.0 {
                // Interval smooth + c*[-1, 1]; distance from 0.
                (smooth.abs() - self.l1_weight).max(0.0)
            } else {
                (smooth + self.l1_weight * t.signum()).abs()
            };
            acc += d * d;
        }
        Some(acc.sqrt())
    }
}

/// The 2-D benchmark landscape `f(x, y) = |x-1| + |y-1| + 0.5 (x^2 + y^2)`,
/// whose unique minimizer is (1, 1).
pub fn synthetic_landscape() -> L1Quadratic {
    L1Quadratic::new(vec![1.0, 1.0], 1.0, vec![1.0, 1.0]).expect("valid parameters")
}

/// Linear function `f(x) = g . x`. The directional difference quotient is
/// exactly `g . u`, which makes this the reference workload for the probe
/// concentration study.
#[derive(Clone, Debug)]
pub struct Linear {
    g: ParamVector,
}

impl Linear {
    pub fn new(g: ParamVector) -> Self {
        Self { g }
    }

    pub fn gradient_vector(&self) -> &ParamVector {
        &self.g
    }
}

impl Objective for Linear {
    fn dim(&self) -> usize {
        self.g.dim()
    }

    fn value(&self, x: &ParamVector, _batch: BatchIndices<'_>) -> f64 {
        self.g.dot(x).expect("dimension checked at entry")
    }

    fn gradient(&self, _x: &ParamVector, _batch: BatchIndices<'_>) -> ParamVector {
        self.g.clone()
    }

    fn clarke_distance(&self, _x: &ParamVector) -> Option<f64> {
        Some(self.g.norm2())
    }
}

/// Smooth quadratic `f(x) = g . x + 1/2 x^T H x` with symmetric `H`.
///
/// Its directional difference quotients terminate at second order, so the
/// sphere-moment formulas for the population probe score are exact on it.
#[derive(Clone, Debug)]
pub struct Quadratic {
    g: ParamVector,
    h: SymMatrix,
}

impl Quadratic {
    pub fn new(g: ParamVector, h: SymMatrix) -> Result<Self> {
        if g.dim() != h.dim() {
            return Err(Error::DimensionMismatch {
                expected: g.dim(),
                got: h.dim(),
            });
        }
        Ok(Self { g, h })
    }

    pub fn linear_term(&self) -> &ParamVector {
        &self.g
    }

    pub fn hessian(&self) -> &SymMatrix {
        &self.h
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.g.dim()
    }

    fn value(&self, x: &ParamVector, _batch: BatchIndices<'_>) -> f64 {
        self.g.dot(x).expect("dimension checked at entry") + 0.5 * self.h.quad_form(x.as_slice())
    }

    fn gradient(&self, x: &ParamVector, _batch: BatchIndices<'_>) -> ParamVector {
        let hx = self.h.matvec(x.as_slice());
        let data = self
            .g
            .iter()
            .zip(hx)
            .map(|(gi, hxi)| gi + hxi)
            .collect();
        ParamVector::from_raw(data)
    }

    fn clarke_distance(&self, x: &ParamVector) -> Option<f64> {
        Some(self.gradient(x, None).norm2())
    }
}
