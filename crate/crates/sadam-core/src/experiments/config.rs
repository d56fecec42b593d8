//! Declarative experiment descriptions: which objective, which optimizer,
//! which schedule, and how to initialize. These structs are the file-facing
//! schema; unknown keys are rejected and omitted keys take the reference
//! defaults.

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::objectives::{
    make_blobs, synthetic_landscape, Constant, L1Quadratic, Linear, MlpObjective, MlpSpec,
    Objective, Quadratic, QuantizerConfig, Staircase,
};
use crate::optimizers::{
    AdamW, AdamWParams, Optimizer, ProxSgd, ProxSgdParams, SAdam, SAdamParams, StepSchedule,
    Subgrad,
};
use crate::rng::{RngStream, SeededRng};
use crate::vector::ParamVector;
use serde::{Deserialize, Serialize};

/// Objective selector plus parameters.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    /// Constant function (probe fields of it are identically zero).
    Constant { dim: usize, value: f64 },
    /// `|x-1| + |y-1| + 0.5 (x^2 + y^2)`.
    Synthetic,
    /// `c sum |x_i - a_i| + 1/2 sum q_i x_i^2`.
    L1Quadratic {
        anchor: Vec<f64>,
        l1_weight: f64,
        quad: Vec<f64>,
    },
    /// `g . x`.
    Linear { gradient: Vec<f64> },
    /// `g . x + 1/2 x^T diag(h) x`.
    QuadraticDiag {
        gradient: Vec<f64>,
        hessian_diag: Vec<f64>,
    },
    /// Separable `(dequantize(quantize(x_i)) - target)^2`.
    Staircase {
        scale: f64,
        q_min: i64,
        q_max: i64,
        target: f64,
        #[serde(default = "default_one")]
        dim: usize,
    },
    /// Two-class Gaussian blobs classified by a small ReLU network,
    /// optionally with quantized weights.
    BlobsMlp {
        n: usize,
        #[serde(default = "default_two")]
        feature_dim: usize,
        #[serde(default = "default_separation")]
        separation: f64,
        #[serde(default = "default_hidden")]
        hidden: Vec<usize>,
        #[serde(default)]
        quantizer: Option<QuantizerConfig>,
    },
}

fn default_one() -> usize {
    1
}
fn default_two() -> usize {
    2
}
fn default_separation() -> f64 {
    3.0
}
fn default_hidden() -> Vec<usize> {
    vec![16, 16]
}

impl ObjectiveSpec {
    pub fn id(&self) -> &'static str {
        match self {
            ObjectiveSpec::Constant { .. } => "constant",
            ObjectiveSpec::Synthetic => "synthetic",
            ObjectiveSpec::L1Quadratic { .. } => "l1_quadratic",
            ObjectiveSpec::Linear { .. } => "linear",
            ObjectiveSpec::QuadraticDiag { .. } => "quadratic_diag",
            ObjectiveSpec::Staircase { .. } => "staircase",
            ObjectiveSpec::BlobsMlp { .. } => "blobs_mlp",
        }
    }

    /// Build the objective; dataset-backed objectives draw their samples
    /// from the data stream of `seed`.
    pub fn build(&self, seed: u64) -> Result<Box<dyn Objective>> {
        Ok(match self {
            ObjectiveSpec::Constant { dim, value } => {
                if *dim == 0 {
                    return Err(Error::InvalidDimension);
                }
                Box::new(Constant::new(*dim, *value))
            }
            ObjectiveSpec::Synthetic => Box::new(synthetic_landscape()),
            ObjectiveSpec::L1Quadratic {
                anchor,
                l1_weight,
                quad,
            } => Box::new(L1Quadratic::new(anchor.clone(), *l1_weight, quad.clone())?),
            ObjectiveSpec::Linear { gradient } => {
                Box::new(Linear::new(ParamVector::new(gradient.clone())?))
            }
            ObjectiveSpec::QuadraticDiag {
                gradient,
                hessian_diag,
            } => Box::new(Quadratic::new(
                ParamVector::new(gradient.clone())?,
                SymMatrix::from_diag(hessian_diag)?,
            )?),
            ObjectiveSpec::Staircase {
                scale,
                q_min,
                q_max,
                target,
                dim,
            } => {
                if *dim == 0 {
                    return Err(Error::InvalidDimension);
                }
                let q = QuantizerConfig::new(*scale, *q_min, *q_max)?;
                Box::new(Staircase::with_dim(q, *target, *dim))
            }
            ObjectiveSpec::BlobsMlp {
                n,
                feature_dim,
                separation,
                hidden,
                quantizer,
            } => {
                let mut data_rng = SeededRng::new(seed, RngStream::Data);
                let data = make_blobs(&mut data_rng, *n, *feature_dim, *separation)?;
                let mut widths = Vec::with_capacity(hidden.len() + 2);
                widths.push(*feature_dim);
                widths.extend_from_slice(hidden);
                widths.push(2);
                let spec = MlpSpec::new(widths, *quantizer)?;
                Box::new(MlpObjective::new(spec, data)?)
            }
        })
    }

    /// Initial iterate for this objective under `init`, drawn from the
    /// init stream of `seed` when randomized.
    pub fn build_init(
        &self,
        seed: u64,
        init: &InitSpec,
        objective: &dyn Objective,
    ) -> Result<ParamVector> {
        let dim = objective.dim();
        match init {
            InitSpec::Point { values } => {
                let w = ParamVector::new(values.clone())?;
                if w.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: w.dim(),
                    });
                }
                Ok(w)
            }
            InitSpec::RandomNormal { scale } => {
                let mut rng = SeededRng::new(seed, RngStream::Init);
                Ok(ParamVector::new(
                    (0..dim).map(|_| rng.standard_normal() * scale).collect(),
                )?)
            }
            InitSpec::Default => match self {
                ObjectiveSpec::BlobsMlp {
                    feature_dim,
                    hidden,
                    quantizer,
                    ..
                } => {
                    // He-style init through the network's own scheme.
                    let mut widths = Vec::with_capacity(hidden.len() + 2);
                    widths.push(*feature_dim);
                    widths.extend_from_slice(hidden);
                    widths.push(2);
                    let spec = MlpSpec::new(widths, *quantizer)?;
                    let proto = MlpObjective::new(
                        spec,
                        crate::objectives::SampleSet::new(
                            vec![vec![0.0; *feature_dim]],
                            vec![0],
                        )?,
                    )?;
                    let mut rng = SeededRng::new(seed, RngStream::Init);
                    Ok(proto.init_params(&mut rng))
                }
                _ => {
                    let mut rng = SeededRng::new(seed, RngStream::Init);
                    Ok(ParamVector::new(
                        (0..dim).map(|_| rng.standard_normal()).collect(),
                    )?)
                }
            },
        }
    }
}

/// How the initial iterate is chosen.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    /// Objective-appropriate default: He-style for the network, standard
    /// normal entries otherwise.
    #[default]
    Default,
    /// A fixed starting point.
    Point { values: Vec<f64> },
    /// IID normal entries with the given standard deviation.
    RandomNormal { scale: f64 },
}

/// Optimizer selector plus hyperparameters.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OptimizerSpec {
    Sadam(SAdamParams),
    Adamw(AdamWParams),
    ProxSgd(ProxSgdParams),
    Subgrad,
}

impl Default for OptimizerSpec {
    fn default() -> Self {
        OptimizerSpec::Sadam(SAdamParams::default())
    }
}

impl OptimizerSpec {
    pub fn id(&self) -> &'static str {
        match self {
            OptimizerSpec::Sadam(_) => "sadam",
            OptimizerSpec::Adamw(_) => "adamw",
            OptimizerSpec::ProxSgd(_) => "prox_sgd",
            OptimizerSpec::Subgrad => "subgrad",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OptimizerSpec::Sadam(p) => p.validate(),
            OptimizerSpec::Adamw(p) => p.validate(),
            OptimizerSpec::ProxSgd(p) => p.validate(),
            OptimizerSpec::Subgrad => Ok(()),
        }
    }

    pub fn build(&self, dim: usize) -> Result<Box<dyn Optimizer>> {
        Ok(match self {
            OptimizerSpec::Sadam(p) => Box::new(SAdam::new(*p, dim)?),
            OptimizerSpec::Adamw(p) => Box::new(AdamW::new(*p, dim)?),
            OptimizerSpec::ProxSgd(p) => Box::new(ProxSgd::new(*p, dim)?),
            OptimizerSpec::Subgrad => Box::new(Subgrad::new()),
        })
    }
}

/// One full experiment: objective x optimizer x schedule over seeds.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub objective: ObjectiveSpec,
    #[serde(default)]
    pub optimizer: OptimizerSpec,
    #[serde(default)]
    pub schedule: StepSchedule,
    pub total_steps: u64,
    /// Mini-batch size for dataset objectives; omitted means full batch.
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Record a metric row every this many steps (the final step is always
    /// recorded).
    #[serde(default = "default_record_every")]
    pub record_every: u64,
    #[serde(default)]
    pub init: InitSpec,
    /// Window for the chattering summary; default min(1000, steps - 1).
    #[serde(default)]
    pub chatter_window: Option<usize>,
    /// Optional loss threshold; the summary reports the first step at or
    /// below it.
    #[serde(default)]
    pub loss_threshold: Option<f64>,
}

fn default_seeds() -> Vec<u64> {
    vec![42]
}

fn default_record_every() -> u64 {
    100
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.total_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "total_steps",
                reason: "must be >= 1".to_string(),
            });
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter {
                name: "seeds",
                reason: "must not be empty".to_string(),
            });
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter {
                name: "record_every",
                reason: "must be >= 1".to_string(),
            });
        }
        if let Some(b) = self.batch_size {
            if b == 0 {
                return Err(Error::InvalidParameter {
                    name: "batch_size",
                    reason: "must be >= 1 when set".to_string(),
                });
            }
        }
        self.optimizer.validate()?;
        self.schedule.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimizer_spec_roundtrips_through_toml() {
        let spec = OptimizerSpec::Sadam(SAdamParams::default());
        let text = toml::to_string(&spec).unwrap();
        let back: OptimizerSpec = toml::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn unknown_optimizer_keys_are_rejected() {
        let err = toml::from_str::<OptimizerSpec>("kind = \"adamw\"\nbogus = 1\n");
        assert!(err.is_err(), "unknown key must be rejected");
    }

    #[test]
    fn missing_optimizer_fields_take_reference_defaults() {
        let spec: OptimizerSpec = toml::from_str("kind = \"sadam\"").unwrap();
        match spec {
            OptimizerSpec::Sadam(p) => {
                assert_eq!(p.beta1, 0.9);
                assert_eq!(p.beta2, 0.999);
                assert_eq!(p.weight_decay, 0.01);
                assert_eq!(p.lgi.delta, 0.01);
                assert_eq!(p.lgi.lambda, 2.0);
                assert_eq!(p.lgi.epsilon, 1e-6);
                assert_eq!(p.lgi.k, 2);
            }
            other => panic!("wrong variant: {other:?}"),
        }
    }

    #[test]
    fn objective_specs_build() {
        let specs = [
            ObjectiveSpec::Synthetic,
            ObjectiveSpec::Constant { dim: 3, value: 1.0 },
            ObjectiveSpec::Linear {
                gradient: vec![1.0, 2.0],
            },
            ObjectiveSpec::Staircase {
                scale: 8.0,
                q_min: -16,
                q_max: 16,
                target: 0.3,
                dim: 2,
            },
            ObjectiveSpec::BlobsMlp {
                n: 8,
                feature_dim: 2,
                separation: 3.0,
                hidden: vec![4],
                quantizer: None,
            },
        ];
        for spec in specs {
            let f = spec.build(42).unwrap();
            let w = spec.build_init(42, &InitSpec::Default, f.as_ref()).unwrap();
            assert_eq!(w.dim(), f.dim(), "{}", spec.id());
        }
    }

    #[test]
    fn fixed_point_init_checks_dimension() {
        let spec = ObjectiveSpec::Synthetic;
        let f = spec.build(0).unwrap();
        let bad = InitSpec::Point {
            values: vec![1.0, 2.0, 3.0],
        };
        assert!(spec.build_init(0, &bad, f.as_ref()).is_err());
    }
}
