//! The per-seed experiment loop and its metric record.

use crate::error::Result;
use crate::exec;
use crate::experiments::chattering::chattering_index;
use crate::experiments::{ExperimentConfig, BATCH_ORDER_SALT};
use crate::objectives::Objective;
use crate::optimizers::{Optimizer, StepSchedule};
use crate::rng::{RngStream, SeededRng};
use crate::vector::ParamVector;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

/// Whether a run completed all requested steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::Failed => "failed",
        }
    }
}

/// One recorded metric row.
///
/// `loss` is the objective at the pre-step iterate on that step's batch
/// (what the optimizer saw); `clarke_dist` is the oracle distance at the
/// post-step iterate, present only when the objective has an oracle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRow {
    pub t: u64,
    pub loss: f64,
    pub rho: f64,
    pub brake: f64,
    pub eta_hat: f64,
    pub grad_norm: f64,
    pub update_norm: f64,
    pub clarke_dist: Option<f64>,
    pub status: RunStatus,
}

/// Scalar summary of one run. Wall time is measured but deliberately kept
/// out of the serialized form: summaries must be byte-identical across
/// reruns of the same seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub status: RunStatus,
    /// Steps that actually executed (equals the request unless the run
    /// failed mid-way).
    pub executed_steps: u64,
    pub best_loss: Option<f64>,
    pub final_loss: Option<f64>,
    pub min_clarke_dist: Option<f64>,
    /// `1 - mean cosine` of consecutive updates over the chatter window.
    pub chatter_cosine: Option<f64>,
    /// Coefficient of variation of the loss over the same window.
    pub chatter_cv: Option<f64>,
    /// First step whose loss reached the configured threshold, if any.
    pub steps_to_threshold: Option<u64>,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Full record of one run: sparse metric rows plus the dense per-step
/// series the chattering analysis needs.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub rows: Vec<RunRow>,
    pub summary: RunSummary,
    /// Loss at every executed step (dense, unlike `rows`).
    pub step_losses: Vec<f64>,
    /// Cosine of each consecutive update pair (length `executed - 1`).
    pub update_cosines: Vec<f64>,
    /// Final iterate (the initial point if no step succeeded).
    pub final_w: ParamVector,
}

/// RNG streams handed to one trajectory.
pub struct TrajectoryEnv {
    pub probe_rng: SeededRng,
    pub batch_rng: SeededRng,
}

impl TrajectoryEnv {
    /// The streams a run with this seed owns.
    pub fn for_seed(seed: u64) -> Self {
        Self {
            probe_rng: SeededRng::new(seed, RngStream::Probe),
            batch_rng: SeededRng::with_salt(seed, RngStream::Data, BATCH_ORDER_SALT),
        }
    }
}

/// Drive `opt` over `f` for up to `total_steps` steps.
///
/// A non-finite loss, iterate, or gradient marks the run failed: the last
/// valid row is retained (re-emitted with failed status) and the loop
/// stops. Failed runs are results, not errors.
#[allow(clippy::too_many_arguments)]
pub fn run_trajectory(
    f: &dyn Objective,
    opt: &mut dyn Optimizer,
    schedule: &StepSchedule,
    total_steps: u64,
    batch_size: Option<usize>,
    record_every: u64,
    w0: ParamVector,
    env: &mut TrajectoryEnv,
    seed: u64,
    loss_threshold: Option<f64>,
    chatter_window: Option<usize>,
) -> RunRecord {
    let started = Instant::now();
    let has_oracle = f.clarke_distance(&w0).is_some();
    let n_samples = f.num_samples();

    let mut w = w0;
    let mut rows: Vec<RunRow> = Vec::new();
    let mut step_losses = Vec::new();
    let mut update_cosines = Vec::new();
    let mut prev_update: Option<ParamVector> = None;
    let mut status = RunStatus::Ok;
    let mut executed: u64 = 0;
    let mut best_loss: Option<f64> = None;
    let mut min_clarke = f.clarke_distance(&w);
    let mut steps_to_threshold: Option<u64> = None;
    let mut last_row: Option<RunRow> = None;

    for t in 1..=total_steps {
        let batch_indices: Option<Vec<usize>> = match (n_samples, batch_size) {
            (Some(n), Some(b)) if b < n => {
                Some((0..b).map(|_| env.batch_rng.index(n)).collect())
            }
            _ => None,
        };
        let eta_t = schedule.eta(t);
        let outcome = match opt.step(f, &w, batch_indices.as_deref(), eta_t, &mut env.probe_rng) {
            Ok(o) => o,
            Err(_) => {
                status = RunStatus::Failed;
                break;
            }
        };
        if !outcome.loss.is_finite() || !outcome.w_next.is_finite() {
            status = RunStatus::Failed;
            break;
        }

        if let Some(prev) = &prev_update {
            update_cosines.push(update_cosine(prev, &outcome.update));
        }
        prev_update = Some(outcome.update.clone());

        step_losses.push(outcome.loss);
        executed = t;
        best_loss = Some(match best_loss {
            Some(b) if b <= outcome.loss => b,
            _ => outcome.loss,
        });
        if steps_to_threshold.is_none() {
            if let Some(threshold) = loss_threshold {
                if outcome.loss <= threshold {
                    steps_to_threshold = Some(t);
                }
            }
        }
        let clarke = f.clarke_distance(&outcome.w_next);
        if let (Some(c), Some(m)) = (clarke, min_clarke) {
            if c < m {
                min_clarke = Some(c);
            }
        } else if min_clarke.is_none() {
            min_clarke = clarke;
        }

        let row = RunRow {
            t,
            loss: outcome.loss,
            rho: outcome.rho,
            brake: outcome.brake,
            eta_hat: outcome.eta_hat,
            grad_norm: outcome.grad_norm,
            update_norm: outcome.update_norm(),
            clarke_dist: if has_oracle { clarke } else { None },
            status: RunStatus::Ok,
        };
        if t % record_every == 0 || t == total_steps {
            rows.push(row.clone());
        }
        last_row = Some(row);
        w = outcome.w_next;
    }

    if status == RunStatus::Failed {
        if let Some(mut row) = last_row {
            row.status = RunStatus::Failed;
            match rows.last() {
                Some(r) if r.t == row.t => *rows.last_mut().expect("non-empty") = row,
                _ => rows.push(row),
            }
        }
    }

    let window = chatter_window.unwrap_or_else(|| 1000.min(update_cosines.len()));
    let (chatter_cosine, chatter_cv) = if window >= 1 && window <= update_cosines.len() {
        let record = (step_losses.as_slice(), update_cosines.as_slice());
        match chattering_index(record.0, record.1, window) {
            Ok((c, v)) => (Some(c), Some(v)),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };

    RunRecord {
        summary: RunSummary {
            seed,
            status,
            executed_steps: executed,
            best_loss,
            final_loss: step_losses.last().copied(),
            min_clarke_dist: min_clarke,
            chatter_cosine,
            chatter_cv,
            steps_to_threshold,
            wall_time: started.elapsed(),
        },
        rows,
        step_losses,
        update_cosines,
        final_w: w,
    }
}

/// Cosine between two consecutive updates; steps without movement carry no
/// oscillation signal and count as perfectly aligned.
fn update_cosine(a: &ParamVector, b: &ParamVector) -> f64 {
    let denom = a.norm2() * b.norm2();
    if denom == 0.0 {
        return 1.0;
    }
    (a.dot(b).expect("dimensions match") / denom).clamp(-1.0, 1.0)
}

/// One seed of an experiment.
pub fn run_single(cfg: &ExperimentConfig, seed: u64) -> Result<RunRecord> {
    cfg.validate()?;
    let f = cfg.objective.build(seed)?;
    let w0 = cfg.objective.build_init(seed, &cfg.init, f.as_ref())?;
    let mut opt = cfg.optimizer.build(f.dim())?;
    let mut env = TrajectoryEnv::for_seed(seed);
    Ok(run_trajectory(
        f.as_ref(),
        opt.as_mut(),
        &cfg.schedule,
        cfg.total_steps,
        cfg.batch_size,
        cfg.record_every,
        w0,
        &mut env,
        seed,
        cfg.loss_threshold,
        cfg.chatter_window,
    ))
}

/// All seeds of an experiment, in seed order (parallel across seeds).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    exec::ordered_map(cfg.seeds.len(), |i| run_single(cfg, cfg.seeds[i]))
        .into_iter()
        .collect()
}
