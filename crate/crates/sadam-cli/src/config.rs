//! The declarative experiment document: schema, defaults, and hashing.
//!
//! Experiments carry around twenty parameters, so they live in TOML files
//! (diffable, hashable) rather than flag soup. Unknown keys are rejected,
//! omitted keys take the compiled-in defaults, and every output file embeds
//! the SHA-256 of the fully resolved document so stale artifacts are
//! detectable.

use crate::error::{CliError, CliResult};
use sadam_core::experiments::{ExperimentConfig, GridSpec, ObjectiveSpec, StabilityConfig};
use sadam_core::lgi::LgiConfig;
use sadam_core::optimizers::{AdamWParams, ProxSgdParams, SAdamParams, StepSchedule};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

/// Top-level config document. Each subcommand requires its section.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CliDocument {
    /// Must be 1.
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concentration: Option<ConcentrationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityConfig>,
    #[serde(default)]
    pub output: OutputSection,
}

/// Optimizer set compared on one base experiment under identical seeds and
/// data streams.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    pub optimizers: Vec<sadam_core::experiments::OptimizerSpec>,
}

/// Field-scan request: a 2-D objective, a grid, and probe parameters.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub objective: ObjectiveSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub lgi: LgiConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// Concentration-study request. The reference score may be omitted for
/// linear and diagonal-quadratic objectives, where it has a closed form.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationSection {
    pub objective: ObjectiveSpec,
    /// Probe point; zeros when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    pub k_grid: Vec<usize>,
    pub trials: usize,
    #[serde(default)]
    pub lgi: LgiConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Explicit reference score, required for objectives without one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_rho: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory; flag and environment can override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

fn default_seed() -> u64 {
    42
}

impl CliDocument {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::io(format!("cannot read config {}: {e}", path.display()))
        })?;
        let doc: CliDocument = toml::from_str(&text).map_err(|e| {
            CliError::config(format!("invalid config {}: {e}", path.display()))
        })?;
        if doc.schema_version != 1 {
            return Err(CliError::config(format!(
                "unsupported schema_version {} (this build understands 1)",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    /// SHA-256 over the canonical JSON form of the resolved document.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("serializable document");
        let digest = Sha256::digest(&bytes);
        let mut hex = String::with_capacity(64);
        for b in digest {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    }

    /// JSON echo of the resolved document for summary embedding.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable document")
    }
}

/// The compiled-in default hyperparameters, printable as TOML so they can
/// be audited straight from the binary.
#[derive(Serialize, Default)]
pub struct Defaults {
    pub sadam: SAdamParams,
    pub adamw: AdamWParams,
    pub prox_sgd: ProxSgdParams,
    pub lgi: LgiConfig,
    pub schedule: StepSchedule,
    pub stability: StabilityConfig,
}
