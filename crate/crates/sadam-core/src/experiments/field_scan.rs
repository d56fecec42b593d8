//! Probe the instability score over a 2-D grid.

use crate::error::{Error, Result};
use crate::exec;
use crate::experiments::RunStatus;
use crate::lgi::{lgi_probe, LgiConfig};
use crate::objectives::Objective;
use crate::rng::{RngStream, SeededRng};
use crate::vector::ParamVector;
use serde::{Deserialize, Serialize};

/// Rectangular grid specification.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let bounds = [self.x_min, self.x_max, self.y_min, self.y_max];
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "grid bounds",
                reason: "must be finite".to_string(),
            });
        }
        if self.x_min > self.x_max || self.y_min > self.y_max {
            return Err(Error::InvalidParameter {
                name: "grid bounds",
                reason: "min must not exceed max".to_string(),
            });
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidParameter {
                name: "nx/ny",
                reason: "must be >= 1".to_string(),
            });
        }
        Ok(())
    }

    fn coord(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
        }
    }

    pub fn node(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            Self::coord(self.x_min, self.x_max, ix, self.nx),
            Self::coord(self.y_min, self.y_max, iy, self.ny),
        )
    }
}

/// One scanned grid node. Probe failures leave NaN score/brake with a
/// failed status instead of aborting the scan.
#[derive(Clone, Copy, Debug)]
pub struct FieldNode {
    pub x: f64,
    pub y: f64,
    pub rho: f64,
    pub brake: f64,
    pub status: RunStatus,
}

/// Probe a 2-D objective at every grid node with a per-node derived seed,
/// row-major over (y, x). Nodes are independent and scan in parallel.
pub fn lgi_field_scan(
    f: &dyn Objective,
    grid: &GridSpec,
    cfg: &LgiConfig,
    seed: u64,
) -> Result<Vec<FieldNode>> {
    grid.validate()?;
    cfg.validate()?;
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: f.dim(),
        });
    }
    let total = grid.nx * grid.ny;
    Ok(exec::ordered_map(total, |idx| {
        let (ix, iy) = (idx % grid.nx, idx / grid.nx);
        let (x, y) = grid.node(ix, iy);
        let point = ParamVector::from_raw(vec![x, y]);
        let mut rng = SeededRng::with_salt(seed, RngStream::Probe, idx as u64);
        match lgi_probe(f, &point, None, cfg, &mut rng) {
            Ok(est) => FieldNode {
                x,
                y,
                rho: est.rho,
                brake: est.brake,
                status: RunStatus::Ok,
            },
            Err(_) => FieldNode {
                x,
                y,
                rho: f64::NAN,
                brake: f64::NAN,
                status: RunStatus::Failed,
            },
        }
    }))
}
