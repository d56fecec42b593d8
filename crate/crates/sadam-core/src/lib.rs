//! Singularity-aware optimization at desk scale: the S-Adam optimizer, its
//! Local Geometric Instability probe, baseline optimizers, closed-form
//! non-smooth benchmark objectives with exact stationarity oracles, and a
//! seeded experiment harness that writes reproducible CSV/JSON artifacts.
//!
//! The layering is strictly bottom-up:
//!
//! - [`vector`], [`rng`], [`matrix`], [`exec`] — flat `f64` vectors,
//!   stream-separated deterministic randomness, small symmetric matrices,
//!   and an order-preserving (optionally parallel) map.
//! - [`objectives`] — the benchmark suite: L1-plus-quadratic landscapes with
//!   Clarke-distance oracles, quantization with straight-through gradients,
//!   staircase surfaces, Gaussian blob datasets, and a small ReLU network.
//! - [`lgi`] — the instability score, its brake, exact quadratic oracles,
//!   and the finite-sample concentration study.
//! - [`optimizers`] — S-Adam and the baselines it is measured against.
//! - [`experiments`] — seeded runs, chattering metrics, the one-sample
//!   stability study, and the 2-D probe field scanner.
//! - [`report`] — CSV/JSON writers with embedded config hashes.
//!
//! With the default `parallel` feature, embarrassingly parallel inner loops
//! (probe evaluations, concentration trials, grid nodes, per-seed runs) run
//! on rayon; disabling the feature falls back to sequential loops with
//! bit-identical results.

pub mod error;
pub mod exec;
pub mod experiments;
pub mod lgi;
pub mod matrix;
pub mod objectives;
pub mod optimizers;
pub mod report;
pub mod rng;
pub mod vector;

pub use error::{Error, Result};
pub use vector::ParamVector;

/// Library version embedded in run summaries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
