//! Finite-sample concentration of the probe score: estimation error as a
//! function of the probe count `k`, summarized per `k` by the median and
//! 0.95 quantile of `|rho_hat_k - rho|` over repeated trials.

use crate::error::{Error, Result};
use crate::exec;
use crate::lgi::{lgi_probe, LgiConfig};
use crate::objectives::Objective;
use crate::rng::{RngStream, SeededRng};
use crate::vector::ParamVector;

/// One row of the error-versus-k table.
#[derive(Clone, Copy, Debug)]
pub struct ConcentrationRow {
    pub k: usize,
    pub median_err: f64,
    pub q95_err: f64,
    pub trials: usize,
}

/// Linearly interpolated quantile of sorted data (the common "type 7"
/// convention). With one sample every quantile is that sample, so the
/// degenerate `trials = 1` table still satisfies `median == q95`.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 < sorted.len() {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

/// Run `trials` independent probes of `f` at `x` for every `k` in the grid
/// and tabulate the estimation error against the reference score `rho_ref`
/// (a population value or a high-count Monte-Carlo reference).
///
/// Trials use salted probe substreams derived from `seed`, so they are
/// independent of each other and reproducible regardless of execution
/// order; trials run in parallel when the `parallel` feature is enabled.
pub fn concentration_study(
    f: &dyn Objective,
    x: &ParamVector,
    cfg_base: &LgiConfig,
    k_grid: &[usize],
    trials: usize,
    seed: u64,
    rho_ref: f64,
) -> Result<Vec<ConcentrationRow>> {
    if k_grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "k_grid",
            reason: "must not be empty".to_string(),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: "must be >= 1".to_string(),
        });
    }
    cfg_base.validate()?;

    let mut rows = Vec::with_capacity(k_grid.len());
    for (k_idx, &k) in k_grid.iter().enumerate() {
        let cfg = LgiConfig { k, ..*cfg_base };
        let errs: Vec<Result<f64>> = exec::ordered_map(trials, |trial| {
            let salt = ((k_idx as u64) << 32) | trial as u64;
            let mut rng = SeededRng::with_salt(seed, RngStream::Probe, salt);
            let est = lgi_probe(f, x, None, &cfg, &mut rng)?;
            Ok((est.rho - rho_ref).abs())
        });
        let mut errs = errs.into_iter().collect::<Result<Vec<f64>>>()?;
        errs.sort_by(|a, b| a.total_cmp(b));
        rows.push(ConcentrationRow {
            k,
            median_err: quantile(&errs, 0.5),
            q95_err: quantile(&errs, 0.95),
            trials,
        });
    }
    Ok(rows)
}

/// Least-squares slope of `ln(err)` against `ln(k)` over the table, using
/// the chosen error column.
pub fn log_log_slope(rows: &[ConcentrationRow], err: impl Fn(&ConcentrationRow) -> f64) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.k as f64).ln(), err(r).ln()))
        .collect();
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    cov / var
}
