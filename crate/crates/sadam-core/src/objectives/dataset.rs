//! Synthetic two-class datasets and their CSV serialization.

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use std::io::Write;

/// A fixed supervised sample set: feature vectors plus class indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    inputs: Vec<Vec<f64>>,
    labels: Vec<usize>,
    feature_dim: usize,
}

impl SampleSet {
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if inputs.is_empty() || inputs.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "need matching non-empty inputs/labels, got {} inputs and {} labels",
                inputs.len(),
                labels.len()
            )));
        }
        let feature_dim = inputs[0].len();
        if feature_dim == 0 || inputs.iter().any(|x| x.len() != feature_dim) {
            return Err(Error::InvalidDataset(
                "all feature vectors must share one nonzero dimension".to_string(),
            ));
        }
        Ok(Self {
            inputs,
            labels,
            feature_dim,
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// Replace the sample at `index`, returning the perturbed copy. The
    /// original is untouched; stability experiments train on both.
    pub fn with_replaced(&self, index: usize, input: Vec<f64>, label: usize) -> Result<Self> {
        if index >= self.len() {
            return Err(Error::InvalidDataset(format!(
                "swap index {index} out of range for {} samples",
                self.len()
            )));
        }
        if input.len() != self.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim,
                got: input.len(),
            });
        }
        let mut out = self.clone();
        out.inputs[index] = input;
        out.labels[index] = label;
        Ok(out)
    }

    /// Serialize as CSV with header `f0,...,f{d-1},label`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = (0..self.feature_dim)
            .map(|i| format!("f{i}"))
            .chain(std::iter::once("label".to_string()))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for (x, y) in self.inputs.iter().zip(&self.labels) {
            let cells: Vec<String> = x
                .iter()
                .map(|v| format!("{v}"))
                .chain(std::iter::once(format!("{y}")))
                .collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Draw one sample of class `label` for blob centers separated by
/// `separation` along the all-ones diagonal.
pub fn draw_blob_sample(
    rng: &mut SeededRng,
    feature_dim: usize,
    separation: f64,
    label: usize,
) -> Vec<f64> {
    let offset = if label == 0 { -0.5 } else { 0.5 } * separation / (feature_dim as f64).sqrt();
    (0..feature_dim)
        .map(|_| rng.standard_normal() + offset)
        .collect()
}

/// Two isotropic Gaussian blobs with alternating labels, `n >= 2` samples.
pub fn make_blobs(
    rng: &mut SeededRng,
    n: usize,
    feature_dim: usize,
    separation: f64,
) -> Result<SampleSet> {
    if n < 2 {
        return Err(Error::InvalidDataset(format!(
            "need at least 2 samples for two classes, got {n}"
        )));
    }
    if feature_dim == 0 {
        return Err(Error::InvalidDimension);
    }
    let mut inputs = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % 2;
        inputs.push(draw_blob_sample(rng, feature_dim, separation, label));
        labels.push(label);
    }
    SampleSet::new(inputs, labels)
}
