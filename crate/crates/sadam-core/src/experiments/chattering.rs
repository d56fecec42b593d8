//! Oscillation metrics over the tail of a run.
//!
//! Chattering has no single canonical scalar, so two components are
//! reported separately: direction churn (1 minus the mean cosine of
//! consecutive updates, in [0, 2]) and loss dispersion (coefficient of
//! variation, >= 0), both over the last `window` steps.

use crate::error::{Error, Result};

/// Compute `(cosine_component, cv_component)` over the last `window` steps.
///
/// `step_losses` must hold one loss per executed step and `update_cosines`
/// one cosine per consecutive step pair; the window must fit inside the
/// cosine series (i.e. the run must have at least `window + 1` steps).
pub fn chattering_index(
    step_losses: &[f64],
    update_cosines: &[f64],
    window: usize,
) -> Result<(f64, f64)> {
    if window == 0 {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: "must be >= 1".to_string(),
        });
    }
    if window > update_cosines.len() {
        return Err(Error::WindowTooLarge {
            window,
            available: update_cosines.len(),
        });
    }
    let cos_tail = &update_cosines[update_cosines.len() - window..];
    let mean_cos = cos_tail.iter().sum::<f64>() / window as f64;
    let cosine_component = 1.0 - mean_cos;

    let loss_tail = &step_losses[step_losses.len() - window..];
    let mean_loss = loss_tail.iter().sum::<f64>() / window as f64;
    let var = loss_tail
        .iter()
        .map(|l| (l - mean_loss) * (l - mean_loss))
        .sum::<f64>()
        / window as f64;
    let std = var.sqrt();
    let cv_component = if mean_loss == 0.0 {
        if std == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        std / mean_loss.abs()
    };
    Ok((cosine_component, cv_component))
}
