//! Local Geometric Instability: a bounded score of local non-smoothness
//! estimated from randomized directional difference quotients.
//!
//! For an objective `f` at point `x` with perturbation scale `delta`, draw
//! `k` directions `u_i` uniformly from the unit sphere and form
//!
//! ```text
//! D_i = (f(x + delta * u_i) - f(x)) / delta
//! rho = Var({D_i}) / (Mean({D_i^2}) + epsilon)
//! ```
//!
//! The variance uses the 1/k (population-style) normalization. That choice
//! is load-bearing: with it, `Var = Mean(D^2) - Mean(D)^2 <= Mean(D^2)`, so
//! `0 <= rho < 1` for every input, and the multiplicative step-size brake
//! `exp(-lambda * rho)` stays inside `(exp(-lambda), 1]` — updates are
//! damped but never stalled. A 1/(k-1) sample variance would break the
//! bound; most statistics libraries default to it, hence the hand-rolled
//! reduction here.
//!
//! One behavioral caveat, visible directly in the score's closed form on
//! smooth functions: `rho` compares the variance of `D` against its raw
//! second moment, and on the sphere the first-order term `g . u` has mean
//! zero. Wherever the local gradient is large relative to
//! `sqrt(epsilon * d)`, the ratio saturates toward 1 even though the
//! function is perfectly smooth there; `rho` only drops to 0 in regions
//! where the directional slopes are dominated by their common mean (or
//! vanish entirely, as on quantization plateaus). The score is therefore a
//! relative-variance reading, not a smoothness certificate, and the
//! staircase/plateau contrast is where it carries the most signal.

mod concentration;
mod oracle;

pub use concentration::{concentration_study, log_log_slope, ConcentrationRow};
pub use oracle::{
    curvature_lgi, population_lgi_quadratic, proximal_brake_gap, relative_curvature,
};

use crate::error::{Error, Result};
use crate::exec;
use crate::objectives::{BatchIndices, Objective};
use crate::rng::{sample_unit_sphere, SeededRng};
use crate::vector::ParamVector;
use serde::{Deserialize, Serialize};

/// Probe hyperparameters.
///
/// Defaults follow the reference operating point: `k = 2`, `delta = 0.01`,
/// `lambda = 2.0`, `epsilon = 1e-6`, no score cap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LgiConfig {
    /// Number of probe directions, `>= 1`.
    pub k: usize,
    /// Perturbation scale, `> 0`.
    pub delta: f64,
    /// Stability constant in the score denominator, `>= 0`. Strictly
    /// positive values guarantee `rho < 1`; zero is accepted so the exact
    /// scale-invariance of the raw ratio can be exercised.
    pub epsilon: f64,
    /// Damping coefficient of the brake, `>= 0`.
    pub lambda: f64,
    /// Optional post-hoc upper clip on the score. Off by default: the 1/k
    /// normalization already bounds `rho` below 1, so a cap of 10.0 (the
    /// reference table value) can never bind. It exists to keep that table
    /// auditable.
    pub rho_cap: Option<f64>,
}

impl Default for LgiConfig {
    fn default() -> Self {
        Self {
            k: 2,
            delta: 0.01,
            epsilon: 1e-6,
            lambda: 2.0,
            rho_cap: None,
        }
    }
}

impl LgiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: "probe count must be >= 1".to_string(),
            });
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("must be positive and finite, got {}", self.delta),
            });
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("must be >= 0 and finite, got {}", self.epsilon),
            });
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("must be >= 0 and finite, got {}", self.lambda),
            });
        }
        if let Some(cap) = self.rho_cap {
            if cap.is_nan() || cap <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: "rho_cap",
                    reason: format!("must be positive when set, got {cap}"),
                });
            }
        }
        Ok(())
    }
}

/// The result of one probe: the score, its brake, and the raw statistics
/// it was computed from.
#[derive(Clone, Debug)]
pub struct LgiEstimate {
    /// Instability score in `[0, 1)` (for `epsilon > 0`).
    pub rho: f64,
    /// The individual difference quotients, in draw order.
    pub probes: Vec<f64>,
    /// Their mean.
    pub mean: f64,
    /// Their variance under the 1/k normalization.
    pub variance: f64,
    /// Their raw second moment `(1/k) sum D_i^2`.
    pub mean_sq: f64,
    /// `exp(-lambda * rho)`.
    pub brake: f64,
    /// `f` at the probe base point — computed anyway, kept as a diagnostic
    /// so callers need not re-evaluate the loss.
    pub base_value: f64,
}

/// The multiplicative step-size factor `exp(-lambda * rho)`.
pub fn brake(rho: f64, lambda: f64) -> f64 {
    (-lambda * rho).exp()
}

/// Estimate the instability score of `f` at `x`.
///
/// All `k + 1` evaluations reuse the same mini-batch: the score measures
/// the geometry of one realized function, and mixing batches would conflate
/// data noise with it. Directions come from the caller's probe-stream
/// generator, so the draw sequence is reproducible and independent of any
/// data or initialization randomness.
///
/// Evaluations may run in parallel; the quotients are collected in draw
/// order and reduced sequentially, so the score is bit-deterministic for a
/// given seed regardless of thread count.
///
/// A non-finite objective value aborts the probe with the offending
/// direction rather than folding a NaN into the score.
pub fn lgi_probe(
    f: &dyn Objective,
    x: &ParamVector,
    batch: BatchIndices<'_>,
    cfg: &LgiConfig,
    rng: &mut SeededRng,
) -> Result<LgiEstimate> {
    cfg.validate()?;
    if x.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x.dim(),
        });
    }

    let base = f.value(x, batch);
    if !base.is_finite() {
        return Err(Error::ProbeFailure {
            probe_index: None,
            value: base,
            direction: None,
        });
    }

    let d = x.dim();
    let mut probes = Vec::with_capacity(cfg.k);
    // Directions are drawn sequentially (one RNG stream); evaluations fan
    // out in chunks so million-probe oracle runs neither hold all
    // directions in memory nor serialize the objective evaluations.
    const CHUNK: usize = 4096;
    let mut drawn = 0;
    while drawn < cfg.k {
        let take = CHUNK.min(cfg.k - drawn);
        let dirs: Vec<ParamVector> = (0..take)
            .map(|_| sample_unit_sphere(rng, d))
            .collect::<Result<_>>()?;
        let values = exec::ordered_map(take, |i| {
            let u = &dirs[i];
            let shifted = ParamVector::axpy(cfg.delta, u, x).expect("dimensions match");
            f.value(&shifted, batch)
        });
        for (i, v) in values.into_iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::ProbeFailure {
                    probe_index: Some(drawn + i),
                    value: v,
                    direction: Some(Box::new(dirs[i].clone())),
                });
            }
            probes.push((v - base) / cfg.delta);
        }
        drawn += take;
    }

    Ok(estimate_from_probes(base, probes, cfg))
}

/// Reduce a set of difference quotients to the score. Shared by the
/// stochastic probe and the dense-direction oracle used in tests.
pub fn estimate_from_probes(base_value: f64, probes: Vec<f64>, cfg: &LgiConfig) -> LgiEstimate {
    let k = probes.len() as f64;
    let mean = probes.iter().sum::<f64>() / k;
    let variance = probes.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / k;
    let mean_sq = probes.iter().map(|d| d * d).sum::<f64>() / k;
    let raw = variance / (mean_sq + cfg.epsilon);
    // 0/0 can only arise with epsilon = 0 on an exactly constant function;
    // the score of a flat region is zero by definition.
    let raw = if raw.is_nan() { 0.0 } else { raw };
    let rho = match cfg.rho_cap {
        Some(cap) => raw.min(cap),
        None => raw,
    };
    LgiEstimate {
        rho,
        mean,
        variance,
        mean_sq,
        brake: brake(rho, cfg.lambda),
        probes,
        base_value,
    }
}
