//! Closed-form probe-score oracles for quadratic functions.
//!
//! For `f(x) = g.x + 1/2 x^T H x` the difference quotient along a unit
//! direction `u` is exactly `Y(u) = g.u + (delta/2) u^T H u`, and the
//! sphere moments of `Y` have closed forms:
//!
//! ```text
//! E[Y]          = (delta / 2) tr(H) / d
//! E[(g.u)^2]    = ||g||^2 / d
//! E[(u^T H u)^2] = (tr(H)^2 + 2 ||H||_F^2) / (d (d + 2))
//! E[(g.u)(u^T H u)] = 0
//! ```
//!
//! These are exact (no remainder terms), which makes the population score
//! computed here the reference that the Monte-Carlo probe must converge to.

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Population probe score of a quadratic with gradient `g` and Hessian `h`
/// at the probed point, for perturbation scale `delta` and stability
/// constant `epsilon`.
pub fn population_lgi_quadratic(
    g: &[f64],
    h: &SymMatrix,
    delta: f64,
    epsilon: f64,
) -> Result<f64> {
    if g.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: g.len(),
        });
    }
    let d = g.len() as f64;
    let g_sq = g.iter().map(|v| v * v).sum::<f64>();
    let trace = h.trace();
    let fro_sq = h.fro_norm().powi(2);

    let mean_y = 0.5 * delta * trace / d;
    let second_moment =
        g_sq / d + delta * delta * 0.25 * (trace * trace + 2.0 * fro_sq) / (d * (d + 2.0));
    // Algebraically nonnegative; floor the float residual.
    let variance = (second_moment - mean_y * mean_y).max(0.0);
    Ok(variance / (second_moment + epsilon))
}

/// Relative curvature `kappa = delta * ||H||_F / ||g||` of the smoothed
/// surrogate. Undefined (an error) at zero gradient.
pub fn relative_curvature(g: &[f64], h: &SymMatrix, delta: f64) -> Result<f64> {
    if g.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: g.len(),
        });
    }
    let g_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if g_norm == 0.0 {
        return Err(Error::UndefinedCurvature);
    }
    Ok(delta * h.fro_norm() / g_norm)
}

/// Probe score predicted from the relative curvature alone:
///
/// ```text
/// rho = (1 + kappa^2 / (2 (d + 2))) / (1 + kappa^2 / (2 (d + 2)) + epsilon d / ||g||^2)
/// ```
///
/// Uses the exact sphere second-moment factor `d + 2`, so on traceless
/// Hessians this agrees with [`population_lgi_quadratic`] identically
/// rather than only in the large-`d` limit.
pub fn curvature_lgi(kappa: f64, grad_norm: f64, d: usize, epsilon: f64) -> Result<f64> {
    if grad_norm == 0.0 {
        return Err(Error::UndefinedCurvature);
    }
    let d = d as f64;
    let hump = 1.0 + kappa * kappa / (2.0 * (d + 2.0));
    Ok(hump / (hump + epsilon * d / (grad_norm * grad_norm)))
}

/// Gap between the exponential brake and its proximal-form counterpart at
/// `z = lambda * rho`, together with the quadratic bound it must respect:
/// returns `(|exp(-z) - 1/(1+z)|, z^2 / 2)`.
pub fn proximal_brake_gap(z: f64) -> (f64, f64) {
    let gap = ((-z).exp() - 1.0 / (1.0 + z)).abs();
    (gap, 0.5 * z * z)
}
