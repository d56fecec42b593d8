//! S-Adam and the baselines it is compared against.
//!
//! One S-Adam iteration, in order: (1) probe the local geometry to get the
//! instability score `rho_t`; (2) take the objective's subgradient
//! selection `g_t`; (3) update the exponential moments
//! `m <- b1 m + (1-b1) g`, `v <- b2 v + (1-b2) g^2`; (4) damp the step size,
//! `eta_hat = eta_t * exp(-lambda rho_t)`; (5) move,
//! `w' = w - eta_hat * m / (sqrt(v) + eps) - eta_hat * wd * w`.
//!
//! Bias correction is off by default — the damped update above is the
//! algorithm verbatim — and can be switched on so comparisons against AdamW
//! (which is always bias-corrected, per its standard semantics) are
//! apples-to-apples. With `lambda = 0` or `k = 1` the brake is exactly 1
//! and the S-Adam trajectory is bit-identical to AdamW's at matched
//! settings: both run the same shared update kernel, and the probe draws
//! come from a stream the data ordering never sees.
//!
//! Weight decay is decoupled and scaled by the braked step size, so "slow
//! down near singularities" applies to the decay pull as well.

use crate::error::{Error, Result};
use crate::lgi::{lgi_probe, LgiConfig};
use crate::objectives::{BatchIndices, Objective};
use crate::rng::SeededRng;
use crate::vector::ParamVector;
use serde::{Deserialize, Serialize};

/// Step-size schedules; `t` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepSchedule {
    /// `eta_t = eta0`.
    Constant { eta0: f64 },
    /// `eta_t = eta0 / sqrt(t)`; diverging sum, square-summable it is not.
    InverseSqrt { eta0: f64 },
    /// `eta_t = eta0 / t^p` with `p` in (0.5, 1]: diverging sum with
    /// square-summable terms.
    RobbinsMonro { eta0: f64, p: f64 },
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule::Constant { eta0: 1e-3 }
    }
}

impl StepSchedule {
    pub fn validate(&self) -> Result<()> {
        let eta0 = match self {
            StepSchedule::Constant { eta0 } | StepSchedule::InverseSqrt { eta0 } => *eta0,
            StepSchedule::RobbinsMonro { eta0, p } => {
                if !(*p > 0.5 && *p <= 1.0) {
                    return Err(Error::InvalidParameter {
                        name: "p",
                        reason: format!("needs 0.5 < p <= 1, got {p}"),
                    });
                }
                *eta0
            }
        };
        if !(eta0 > 0.0 && eta0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "eta0",
                reason: format!("must be positive and finite, got {eta0}"),
            });
        }
        Ok(())
    }

    /// Base step size at step `t >= 1`.
    pub fn eta(&self, t: u64) -> f64 {
        debug_assert!(t >= 1);
        match self {
            StepSchedule::Constant { eta0 } => *eta0,
            StepSchedule::InverseSqrt { eta0 } => eta0 / (t as f64).sqrt(),
            StepSchedule::RobbinsMonro { eta0, p } => eta0 / (t as f64).powf(*p),
        }
    }
}

/// Everything one optimizer step produces.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    /// The new iterate.
    pub w_next: ParamVector,
    /// The applied displacement `w_next - w`.
    pub update: ParamVector,
    /// Objective value at the pre-step iterate on this step's batch.
    pub loss: f64,
    /// Instability score (0 for optimizers that do not probe).
    pub rho: f64,
    /// Brake factor (1 for optimizers that do not probe).
    pub brake: f64,
    /// Effective step size actually applied.
    pub eta_hat: f64,
    /// Norm of the consumed (sub)gradient.
    pub grad_norm: f64,
}

impl StepOutcome {
    pub fn update_norm(&self) -> f64 {
        self.update.norm2()
    }
}

/// A sequential first-order optimizer. One state per run; steps are
/// strictly ordered within a run.
pub trait Optimizer: Send {
    fn name(&self) -> &'static str;

    /// Advance one step from `w` with base step size `eta_t`.
    ///
    /// `probe_rng` is the dedicated probe-direction stream; only probing
    /// optimizers draw from it.
    fn step(
        &mut self,
        f: &dyn Objective,
        w: &ParamVector,
        batch: BatchIndices<'_>,
        eta_t: f64,
        probe_rng: &mut SeededRng,
    ) -> Result<StepOutcome>;
}

/// Soft-threshold operator `sign(u) * max(|u| - tau, 0)`, the proximal map
/// of `tau * |.|`.
pub fn soft_threshold(u: f64, tau: f64) -> f64 {
    u.signum() * (u.abs() - tau).max(0.0)
}

// ---------------------------------------------------------------------------
// Shared Adam kernel
// ---------------------------------------------------------------------------

/// Moment buffers and the update arithmetic shared by S-Adam and AdamW.
///
/// Sharing the kernel is what makes the degeneration equivalence exact:
/// when the brake is 1.0, multiplying the step size by it is an IEEE no-op,
/// and every other operation is the same code in the same order.
#[derive(Clone, Debug)]
struct AdamCore {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamCore {
    fn new(dim: usize) -> Self {
        Self {
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn apply(
        &mut self,
        w: &ParamVector,
        g: &ParamVector,
        beta1: f64,
        beta2: f64,
        eta_eff: f64,
        eps: f64,
        weight_decay: f64,
        bias_correction: bool,
    ) -> (ParamVector, ParamVector) {
        self.t += 1;
        let t = self.t;
        let (bc1, bc2) = if bias_correction {
            (1.0 - beta1.powi(t as i32), 1.0 - beta2.powi(t as i32))
        } else {
            (1.0, 1.0)
        };
        let mut w_next = Vec::with_capacity(w.dim());
        let mut update = Vec::with_capacity(w.dim());
        for i in 0..w.dim() {
            let gi = g[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * gi;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * gi * gi;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            let step = eta_eff * (m_hat / (v_hat.sqrt() + eps)) + eta_eff * weight_decay * w[i];
            w_next.push(w[i] - step);
            update.push(-step);
        }
        (
            ParamVector::from_raw(w_next),
            ParamVector::from_raw(update),
        )
    }
}

fn check_adam_params(beta1: f64, beta2: f64, eps: f64, weight_decay: f64) -> Result<()> {
    for (name, b) in [("beta1", beta1), ("beta2", beta2)] {
        if !(0.0..1.0).contains(&b) {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("must lie in [0, 1), got {b}"),
            });
        }
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: format!("must be positive, got {eps}"),
        });
    }
    if !(weight_decay >= 0.0 && weight_decay.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "weight_decay",
            reason: format!("must be >= 0, got {weight_decay}"),
        });
    }
    Ok(())
}

fn finite_gradient(g: ParamVector, step: u64) -> Result<ParamVector> {
    if g.is_finite() {
        Ok(g)
    } else {
        Err(Error::NonFiniteGradient { step })
    }
}

// ---------------------------------------------------------------------------
// S-Adam
// ---------------------------------------------------------------------------

/// S-Adam hyperparameters. The denominator constant `eps` here is Adam's
/// (default 1e-8) and is distinct from the probe's stability constant
/// `lgi.epsilon` (default 1e-6); the two play different roles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SAdamParams {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    /// Off by default (the printed update rule has none); switch on for
    /// fair comparisons against AdamW.
    pub bias_correction: bool,
    pub lgi: LgiConfig,
}

impl Default for SAdamParams {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.01,
            bias_correction: false,
            lgi: LgiConfig::default(),
        }
    }
}

impl SAdamParams {
    pub fn validate(&self) -> Result<()> {
        check_adam_params(self.beta1, self.beta2, self.eps, self.weight_decay)?;
        self.lgi.validate()
    }
}

/// The probing optimizer.
#[derive(Clone, Debug)]
pub struct SAdam {
    params: SAdamParams,
    core: AdamCore,
}

impl SAdam {
    pub fn new(params: SAdamParams, dim: usize) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            core: AdamCore::new(dim),
        })
    }

    pub fn params(&self) -> &SAdamParams {
        &self.params
    }
}

impl Optimizer for SAdam {
    fn name(&self) -> &'static str {
        "sadam"
    }

    fn step(
        &mut self,
        f: &dyn Objective,
        w: &ParamVector,
        batch: BatchIndices<'_>,
        eta_t: f64,
        probe_rng: &mut SeededRng,
    ) -> Result<StepOutcome> {
        let est = lgi_probe(f, w, batch, &self.params.lgi, probe_rng)?;
        let g = finite_gradient(f.gradient(w, batch), self.core.t + 1)?;
        let grad_norm = g.norm2();
        let eta_hat = eta_t * est.brake;
        let (w_next, update) = self.core.apply(
            w,
            &g,
            self.params.beta1,
            self.params.beta2,
            eta_hat,
            self.params.eps,
            self.params.weight_decay,
            self.params.bias_correction,
        );
        Ok(StepOutcome {
            w_next,
            update,
            loss: est.base_value,
            rho: est.rho,
            brake: est.brake,
            eta_hat,
            grad_norm,
        })
    }
}

// ---------------------------------------------------------------------------
// AdamW
// ---------------------------------------------------------------------------

/// AdamW hyperparameters; bias correction is part of AdamW's definition and
/// has no switch here.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdamWParams {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for AdamWParams {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.01,
        }
    }
}

impl AdamWParams {
    pub fn validate(&self) -> Result<()> {
        check_adam_params(self.beta1, self.beta2, self.eps, self.weight_decay)
    }
}

/// Adam with decoupled weight decay.
#[derive(Clone, Debug)]
pub struct AdamW {
    params: AdamWParams,
    core: AdamCore,
}

impl AdamW {
    pub fn new(params: AdamWParams, dim: usize) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            core: AdamCore::new(dim),
        })
    }
}

impl Optimizer for AdamW {
    fn name(&self) -> &'static str {
        "adamw"
    }

    fn step(
        &mut self,
        f: &dyn Objective,
        w: &ParamVector,
        batch: BatchIndices<'_>,
        eta_t: f64,
        _probe_rng: &mut SeededRng,
    ) -> Result<StepOutcome> {
        let loss = f.value(w, batch);
        let g = finite_gradient(f.gradient(w, batch), self.core.t + 1)?;
        let grad_norm = g.norm2();
        let (w_next, update) = self.core.apply(
            w,
            &g,
            self.params.beta1,
            self.params.beta2,
            eta_t,
            self.params.eps,
            self.params.weight_decay,
            true,
        );
        Ok(StepOutcome {
            w_next,
            update,
            loss,
            rho: 0.0,
            brake: 1.0,
            eta_hat: eta_t,
            grad_norm,
        })
    }
}

// ---------------------------------------------------------------------------
// Prox-SGD
// ---------------------------------------------------------------------------

/// Momentum SGD on the smooth loss followed by the soft-threshold proximal
/// map of an L1 penalty (prox-last forward-backward ordering).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProxSgdParams {
    pub momentum: f64,
    pub l1_weight: f64,
}

impl Default for ProxSgdParams {
    fn default() -> Self {
        Self {
            momentum: 0.9,
            l1_weight: 1e-4,
        }
    }
}

impl ProxSgdParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidParameter {
                name: "momentum",
                reason: format!("must lie in [0, 1), got {}", self.momentum),
            });
        }
        if !(self.l1_weight >= 0.0 && self.l1_weight.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "l1_weight",
                reason: format!("must be >= 0, got {}", self.l1_weight),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ProxSgd {
    params: ProxSgdParams,
    velocity: Vec<f64>,
    t: u64,
}

impl ProxSgd {
    pub fn new(params: ProxSgdParams, dim: usize) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            velocity: vec![0.0; dim],
            t: 0,
        })
    }
}

impl Optimizer for ProxSgd {
    fn name(&self) -> &'static str {
        "prox_sgd"
    }

    fn step(
        &mut self,
        f: &dyn Objective,
        w: &ParamVector,
        batch: BatchIndices<'_>,
        eta_t: f64,
        _probe_rng: &mut SeededRng,
    ) -> Result<StepOutcome> {
        self.t += 1;
        let loss = f.value(w, batch);
        let g = finite_gradient(f.gradient(w, batch), self.t)?;
        let grad_norm = g.norm2();
        let tau = eta_t * self.params.l1_weight;
        let mut w_next = Vec::with_capacity(w.dim());
        let mut update = Vec::with_capacity(w.dim());
        for i in 0..w.dim() {
            self.velocity[i] = self.params.momentum * self.velocity[i] + g[i];
            let tentative = w[i] - eta_t * self.velocity[i];
            let out = soft_threshold(tentative, tau);
            w_next.push(out);
            update.push(out - w[i]);
        }
        Ok(StepOutcome {
            w_next: ParamVector::from_raw(w_next),
            update: ParamVector::from_raw(update),
            loss,
            rho: 0.0,
            brake: 1.0,
            eta_hat: eta_t,
            grad_norm,
        })
    }
}

// ---------------------------------------------------------------------------
// Plain subgradient descent
// ---------------------------------------------------------------------------

/// `w' = w - eta_t * g` with `g` the objective's Clarke selection.
#[derive(Clone, Debug, Default)]
pub struct Subgrad {
    t: u64,
}

impl Subgrad {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Optimizer for Subgrad {
    fn name(&self) -> &'static str {
        "subgrad"
    }

    fn step(
        &mut self,
        f: &dyn Objective,
        w: &ParamVector,
        batch: BatchIndices<'_>,
        eta_t: f64,
        _probe_rng: &mut SeededRng,
    ) -> Result<StepOutcome> {
        self.t += 1;
        let loss = f.value(w, batch);
        let g = finite_gradient(f.gradient(w, batch), self.t)?;
        let grad_norm = g.norm2();
        let w_next = ParamVector::axpy(-eta_t, &g, w).expect("dimensions match");
        let update = w_next.sub(w).expect("dimensions match");
        Ok(StepOutcome {
            w_next,
            update,
            loss,
            rho: 0.0,
            brake: 1.0,
            eta_hat: eta_t,
            grad_norm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{synthetic_landscape, L1Quadratic};
    use crate::rng::RngStream;

    fn probe_rng() -> SeededRng {
        SeededRng::new(7, RngStream::Probe)
    }

    #[test]
    fn soft_threshold_shrinks_and_kills() {
        assert_eq!(soft_threshold(1.0, 0.3), 0.7);
        assert_eq!(soft_threshold(-0.2, 0.3), 0.0);
        assert_eq!(soft_threshold(-1.0, 0.25), -0.75);
    }

    #[test]
    fn schedules_match_their_formulas() {
        assert_eq!(StepSchedule::Constant { eta0: 0.1 }.eta(9), 0.1);
        assert_eq!(StepSchedule::InverseSqrt { eta0: 1.0 }.eta(4), 0.5);
        let rm = StepSchedule::RobbinsMonro { eta0: 1.0, p: 1.0 };
        assert_eq!(rm.eta(8), 0.125);
        assert!(StepSchedule::RobbinsMonro { eta0: 1.0, p: 0.5 }
            .validate()
            .is_err());
        assert!(StepSchedule::Constant { eta0: 0.0 }.validate().is_err());
    }

    #[test]
    fn sadam_one_step_by_hand() {
        // Degenerate betas on the 2-D landscape from the origin:
        // g = (-1, -1), m = g, v = g^2, so each coordinate moves by
        // +0.1 / (1 + 1e-8).
        let params = SAdamParams {
            beta1: 0.0,
            beta2: 0.0,
            eps: 1e-8,
            weight_decay: 0.0,
            bias_correction: false,
            lgi: LgiConfig {
                lambda: 0.0,
                ..LgiConfig::default()
            },
        };
        let f = synthetic_landscape();
        let mut opt = SAdam::new(params, 2).unwrap();
        let w0 = ParamVector::zeros(2).unwrap();
        let out = opt.step(&f, &w0, None, 0.1, &mut probe_rng()).unwrap();
        let expected = 0.1 / (1.0 + 1e-8);
        for &wi in out.w_next.as_slice() {
            assert!((wi - expected).abs() < 1e-15, "w = {wi}");
        }
        assert_eq!(out.brake, 1.0);
        assert_eq!(out.eta_hat, 0.1);
    }

    #[test]
    fn adamw_zero_gradient_only_decays() {
        // g = 0 forever: the gradient term stays 0/(0+eps) = 0 and decay
        // shrinks w by (1 - eta * wd) per step.
        let f = crate::objectives::Constant::new(1, 3.0);
        let params = AdamWParams {
            weight_decay: 0.01,
            ..AdamWParams::default()
        };
        let mut opt = AdamW::new(params, 1).unwrap();
        let mut w = ParamVector::new(vec![1.0]).unwrap();
        let mut rng = probe_rng();
        for _ in 0..3 {
            w = opt.step(&f, &w, None, 0.001, &mut rng).unwrap().w_next;
        }
        let expected = (1.0f64 - 1e-5).powi(3);
        assert!((w.as_slice()[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn adamw_fixed_point_without_decay() {
        let f = crate::objectives::Constant::new(2, 0.0);
        let params = AdamWParams {
            weight_decay: 0.0,
            ..AdamWParams::default()
        };
        let mut opt = AdamW::new(params, 2).unwrap();
        let w0 = ParamVector::new(vec![0.4, -0.6]).unwrap();
        let mut w = w0.clone();
        let mut rng = probe_rng();
        for _ in 0..10 {
            w = opt.step(&f, &w, None, 0.01, &mut rng).unwrap().w_next;
        }
        assert_eq!(w, w0);
    }

    #[test]
    fn proxsgd_without_penalty_is_momentum_sgd() {
        // f(x) = 1/2 (x - 5)^2 via the quadratic g = -5, H = [1]. With a
        // zero L1 weight the soft-threshold is the identity, so the
        // trajectory must match a hand-rolled momentum SGD bit-for-bit.
        use crate::matrix::SymMatrix;
        use crate::objectives::Quadratic;
        let f = Quadratic::new(
            ParamVector::new(vec![-5.0]).unwrap(),
            SymMatrix::from_diag(&[1.0]).unwrap(),
        )
        .unwrap();
        let mut prox = ProxSgd::new(
            ProxSgdParams {
                momentum: 0.9,
                l1_weight: 0.0,
            },
            1,
        )
        .unwrap();
        let mut w = ParamVector::new(vec![0.0]).unwrap();
        let (mut w_ref, mut velocity) = (0.0f64, 0.0f64);
        let mut rng = probe_rng();
        for _ in 0..50 {
            w = prox.step(&f, &w, None, 0.1, &mut rng).unwrap().w_next;
            velocity = 0.9 * velocity + (w_ref - 5.0);
            w_ref -= 0.1 * velocity;
            assert_eq!(w.as_slice()[0].to_bits(), w_ref.to_bits());
        }
        assert!((w_ref - 5.0).abs() < 2.0, "made progress toward 5");
    }

    #[test]
    fn subgrad_matches_sign_arithmetic() {
        let f = L1Quadratic::new(vec![0.0], 1.0, vec![0.0]).unwrap(); // f = |x|
        let mut opt = Subgrad::new();
        let mut rng = probe_rng();
        let out = opt
            .step(&f, &ParamVector::new(vec![2.0]).unwrap(), None, 0.5, &mut rng)
            .unwrap();
        assert_eq!(out.w_next.as_slice()[0], 1.5);
        // sign(0) = 0 selection keeps the kink fixed.
        let out = opt
            .step(&f, &ParamVector::new(vec![0.0]).unwrap(), None, 0.5, &mut rng)
            .unwrap();
        assert_eq!(out.w_next.as_slice()[0], 0.0);
    }

    #[test]
    fn non_finite_gradient_is_a_step_error() {
        struct BadGrad;
        impl Objective for BadGrad {
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, _x: &ParamVector, _b: BatchIndices<'_>) -> f64 {
                0.0
            }
            fn gradient(&self, _x: &ParamVector, _b: BatchIndices<'_>) -> ParamVector {
                ParamVector::from_raw(vec![f64::NAN])
            }
        }
        let mut opt = Subgrad::new();
        let mut rng = probe_rng();
        let err = opt
            .step(&BadGrad, &ParamVector::zeros(1).unwrap(), None, 0.1, &mut rng)
            .unwrap_err();
        assert!(matches!(err, Error::NonFiniteGradient { step: 1 }));
    }
}
