//! A small dense ReLU classifier trained by manual backpropagation, with
//! optional simulated quantization of the weights in the forward pass.
//!
//! The network is a flat `ParamVector` laid out layer by layer as the weight
//! matrix (row-major, `out x in`) followed by the bias. Hidden layers use
//! ReLU with derivative 0 at the kink, matching the sign(0) = 0 subgradient
//! convention used across the suite. When a quantizer is present the weights
//! (not the biases) pass through dequantize(quantize(.)) before use, and the
//! weight gradient flows back through the straight-through rule.

use crate::error::{Error, Result};
use crate::objectives::quantize::{dequantize, quantize, ste_gradient, QuantizerConfig};
use crate::objectives::{BatchIndices, Objective, SampleSet};
use crate::rng::SeededRng;
use crate::vector::ParamVector;
use serde::{Deserialize, Serialize};

/// Architecture plus optional weight quantization.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpSpec {
    /// Layer widths from input to output, e.g. `[2, 16, 16, 2]`.
    pub widths: Vec<usize>,
    /// Quantizer applied to weights in the forward pass, if any.
    pub quantizer: Option<QuantizerConfig>,
}

impl MlpSpec {
    pub fn new(widths: Vec<usize>, quantizer: Option<QuantizerConfig>) -> Result<Self> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(Error::InvalidParameter {
                name: "widths",
                reason: format!("need >= 2 nonzero layer widths, got {widths:?}"),
            });
        }
        Ok(Self { widths, quantizer })
    }

    /// Total number of parameters: sum of weight and bias sizes.
    pub fn param_count(&self) -> usize {
        self.widths
            .windows(2)
            .map(|w| w[1] * w[0] + w[1])
            .sum()
    }
}

/// Cross-entropy loss of the network over a sample set.
#[derive(Clone, Debug)]
pub struct MlpObjective {
    spec: MlpSpec,
    data: SampleSet,
}

impl MlpObjective {
    pub fn new(spec: MlpSpec, data: SampleSet) -> Result<Self> {
        if spec.widths[0] != data.feature_dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.widths[0],
                got: data.feature_dim(),
            });
        }
        let classes = *spec.widths.last().expect("validated length");
        if let Some(i) = (0..data.len()).find(|&i| data.label(i) >= classes) {
            return Err(Error::InvalidDataset(format!(
                "label {} at sample {i} exceeds {classes} classes",
                data.label(i)
            )));
        }
        Ok(Self { spec, data })
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn data(&self) -> &SampleSet {
        &self.data
    }

    /// Same architecture over a different sample set.
    pub fn with_data(&self, data: SampleSet) -> Result<Self> {
        Self::new(self.spec.clone(), data)
    }

    /// He-style normal initialization; biases start at zero.
    pub fn init_params(&self, rng: &mut SeededRng) -> ParamVector {
        let mut data = Vec::with_capacity(self.spec.param_count());
        for w in self.spec.widths.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let std = (2.0 / fan_in as f64).sqrt();
            for _ in 0..fan_out * fan_in {
                data.push(rng.standard_normal() * std);
            }
            data.extend(std::iter::repeat_n(0.0, fan_out));
        }
        ParamVector::from_raw(data)
    }

    fn resolve_batch<'a>(&self, batch: BatchIndices<'a>) -> Result<Vec<usize>> {
        match batch {
            None => Ok((0..self.data.len()).collect()),
            Some(idx) => {
                if idx.is_empty() {
                    return Err(Error::InvalidDataset("empty batch".to_string()));
                }
                if let Some(&bad) = idx.iter().find(|&&i| i >= self.data.len()) {
                    return Err(Error::InvalidDataset(format!(
                        "batch index {bad} out of range for {} samples",
                        self.data.len()
                    )));
                }
                Ok(idx.to_vec())
            }
        }
    }

    /// Effective per-layer weights: quantized view when configured.
    fn layer_views(&self, w: &[f64]) -> Vec<(Vec<f64>, Vec<f64>)> {
        let mut views = Vec::with_capacity(self.spec.widths.len() - 1);
        let mut off = 0;
        for dims in self.spec.widths.windows(2) {
            let (n_in, n_out) = (dims[0], dims[1]);
            let raw_w = &w[off..off + n_out * n_in];
            let weights = match &self.spec.quantizer {
                Some(q) => dequantize(&quantize(raw_w, q), q),
                None => raw_w.to_vec(),
            };
            off += n_out * n_in;
            let bias = w[off..off + n_out].to_vec();
            off += n_out;
            views.push((weights, bias));
        }
        views
    }

    /// Mean cross-entropy loss and its gradient over the batch.
    pub fn loss_and_grad(&self, w: &ParamVector, batch: BatchIndices<'_>) -> Result<(f64, ParamVector)> {
        self.forward(w, batch, true)
            .map(|(loss, grad)| (loss, grad.expect("gradient requested")))
    }

    /// Mean cross-entropy loss over the batch.
    pub fn loss(&self, w: &ParamVector, batch: BatchIndices<'_>) -> Result<f64> {
        self.forward(w, batch, false).map(|(loss, _)| loss)
    }

    fn forward(
        &self,
        w: &ParamVector,
        batch: BatchIndices<'_>,
        with_grad: bool,
    ) -> Result<(f64, Option<ParamVector>)> {
        if w.dim() != self.spec.param_count() {
            return Err(Error::DimensionMismatch {
                expected: self.spec.param_count(),
                got: w.dim(),
            });
        }
        let batch = self.resolve_batch(batch)?;
        let widths = &self.spec.widths;
        let n_layers = widths.len() - 1;
        let views = self.layer_views(w.as_slice());

        let mut grad = if with_grad {
            Some(vec![0.0; w.dim()])
        } else {
            None
        };
        let mut total_loss = 0.0;

        for &si in &batch {
            // Forward pass, keeping activations for backprop.
            let mut acts: Vec<Vec<f64>> = Vec::with_capacity(n_layers + 1);
            acts.push(self.data.input(si).to_vec());
            for (l, (weights, bias)) in views.iter().enumerate() {
                let (n_in, n_out) = (widths[l], widths[l + 1]);
                let prev = &acts[l];
                let mut z = vec![0.0; n_out];
                for o in 0..n_out {
                    let mut acc = bias[o];
                    let row = &weights[o * n_in..(o + 1) * n_in];
                    for (wv, av) in row.iter().zip(prev) {
                        acc += wv * av;
                    }
                    z[o] = acc;
                }
                if l + 1 < n_layers {
                    for v in &mut z {
                        if *v < 0.0 {
                            *v = 0.0;
                        }
                    }
                }
                acts.push(z);
            }

            // Stable log-sum-exp cross entropy on the output logits.
            let logits = &acts[n_layers];
            let label = self.data.label(si);
            let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let sum_exp: f64 = logits.iter().map(|v| (v - max).exp()).sum();
            let lse = max + sum_exp.ln();
            total_loss += lse - logits[label];

            let Some(grad) = grad.as_mut() else { continue };

            // d loss / d logits = softmax - onehot.
            let mut delta: Vec<f64> = logits
                .iter()
                .map(|v| (v - max).exp() / sum_exp)
                .collect();
            delta[label] -= 1.0;

            // Walk layers backwards, accumulating into the flat gradient.
            let mut offsets = Vec::with_capacity(n_layers);
            let mut off = 0;
            for dims in widths.windows(2) {
                offsets.push(off);
                off += dims[1] * dims[0] + dims[1];
            }
            for l in (0..n_layers).rev() {
                let (n_in, n_out) = (widths[l], widths[l + 1]);
                let w_off = offsets[l];
                let b_off = w_off + n_out * n_in;
                let prev = &acts[l];
                for o in 0..n_out {
                    let d = delta[o];
                    let row = &mut grad[w_off + o * n_in..w_off + (o + 1) * n_in];
                    for (g, av) in row.iter_mut().zip(prev) {
                        *g += d * av;
                    }
                    grad[b_off + o] += d;
                }
                if l > 0 {
                    let (weights, _) = &views[l];
                    let mut upstream = vec![0.0; n_in];
                    for o in 0..n_out {
                        let d = delta[o];
                        let row = &weights[o * n_in..(o + 1) * n_in];
                        for (u, wv) in upstream.iter_mut().zip(row) {
                            *u += d * wv;
                        }
                    }
                    // ReLU kink: derivative 0 at exactly 0.
                    for (u, &a) in upstream.iter_mut().zip(&acts[l]) {
                        if a <= 0.0 {
                            *u = 0.0;
                        }
                    }
                    delta = upstream;
                }
            }
        }

        let scale = 1.0 / batch.len() as f64;
        total_loss *= scale;

        let grad = grad.map(|mut g| {
            for v in &mut g {
                *v *= scale;
            }
            // Straight-through masking of the weight blocks when quantized.
            if let Some(q) = &self.spec.quantizer {
                let mut off = 0;
                for dims in widths.windows(2) {
                    let n_w = dims[1] * dims[0];
                    let masked =
                        ste_gradient(&g[off..off + n_w], &w.as_slice()[off..off + n_w], q);
                    g[off..off + n_w].copy_from_slice(&masked);
                    off += n_w + dims[1];
                }
            }
            ParamVector::from_raw(g)
        });
        Ok((total_loss, grad))
    }
}

impl Objective for MlpObjective {
    fn dim(&self) -> usize {
        self.spec.param_count()
    }

    fn value(&self, x: &ParamVector, batch: BatchIndices<'_>) -> f64 {
        self.loss(x, batch).expect("valid parameters and batch")
    }

    fn gradient(&self, x: &ParamVector, batch: BatchIndices<'_>) -> ParamVector {
        self.loss_and_grad(x, batch)
            .expect("valid parameters and batch")
            .1
    }

    fn num_samples(&self) -> Option<usize> {
        Some(self.data.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::make_blobs;
    use crate::rng::RngStream;

    fn tiny_setup(quantizer: Option<QuantizerConfig>) -> MlpObjective {
        let mut rng = SeededRng::new(11, RngStream::Data);
        let data = make_blobs(&mut rng, 8, 2, 3.0).unwrap();
        let spec = MlpSpec::new(vec![2, 16, 16, 2], quantizer).unwrap();
        MlpObjective::new(spec, data).unwrap()
    }

    #[test]
    fn param_count_matches_layout() {
        let spec = MlpSpec::new(vec![2, 16, 16, 2], None).unwrap();
        assert_eq!(spec.param_count(), 2 * 16 + 16 + 16 * 16 + 16 + 16 * 2 + 2);
    }

    #[test]
    fn zero_parameters_give_uniform_softmax_loss() {
        let f = tiny_setup(None);
        let w = ParamVector::zeros(f.dim()).unwrap();
        let loss = f.loss(&w, None).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-9, "loss = {loss}");
    }

    #[test]
    fn empty_batch_is_an_error() {
        let f = tiny_setup(None);
        let w = ParamVector::zeros(f.dim()).unwrap();
        assert!(f.loss(&w, Some(&[])).is_err());
        assert!(f.loss(&w, Some(&[99])).is_err());
    }

    #[test]
    fn quantized_forward_differs_from_dense() {
        let dense = tiny_setup(None);
        let quant = tiny_setup(Some(QuantizerConfig::new(4.0, -8, 8).unwrap()));
        let mut rng = SeededRng::new(2, RngStream::Init);
        let w = dense.init_params(&mut rng);
        let a = dense.loss(&w, None).unwrap();
        let b = quant.loss(&w, None).unwrap();
        assert_ne!(a, b);
    }
}
