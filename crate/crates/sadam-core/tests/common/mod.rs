//! Shared test oracles, independent of the library's gradient paths.

use sadam_core::objectives::{BatchIndices, Objective};
use sadam_core::vector::ParamVector;

/// Central finite-difference gradient of an objective: one evaluation pair
/// per coordinate, never touching the analytic gradient code.
#[allow(dead_code)]
pub fn fd_gradient(
    f: &dyn Objective,
    x: &ParamVector,
    batch: BatchIndices<'_>,
    h: f64,
) -> ParamVector {
    let mut out = Vec::with_capacity(x.dim());
    for i in 0..x.dim() {
        let mut hi = x.clone();
        hi.as_mut_slice()[i] += h;
        let mut lo = x.clone();
        lo.as_mut_slice()[i] -= h;
        out.push((f.value(&hi, batch) - f.value(&lo, batch)) / (2.0 * h));
    }
    ParamVector::new(out).expect("finite differences of finite values")
}

/// Max-norm relative disagreement between two vectors, normalized by the
/// larger of the reference magnitude and 1.
#[allow(dead_code)]
pub fn rel_inf_error(reference: &ParamVector, candidate: &ParamVector) -> f64 {
    let denom = reference
        .iter()
        .map(|v| v.abs())
        .fold(1.0f64, f64::max);
    reference
        .iter()
        .zip(candidate.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        / denom
}
