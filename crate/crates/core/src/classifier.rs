//! The feed-forward relation classifier: concatenated subject/object entity
//! vectors through three sigmoid hidden layers (200, 100, 50 by default) and
//! a softmax output over relation types. Training is plain mini-batch SGD
//! with momentum, backpropagation written out by hand.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::pairing::CandidatePair;
use crate::schema::RelationType;

pub const DEFAULT_HIDDEN: [usize; 3] = [200, 100, 50];
pub const DEFAULT_INPUT_DIM: usize = 400;

/// One affine layer; `weights[out][in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
}

impl DenseLayer {
    fn zeros_like(&self) -> DenseLayer {
        DenseLayer {
            weights: vec![vec![0.0; self.weights[0].len()]; self.weights.len()],
            biases: vec![0.0; self.biases.len()],
        }
    }

    fn affine(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(row, b)| row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + b)
            .collect()
    }
}

/// The relation classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationModel {
    labels: Vec<RelationType>,
    /// Layer sizes from input to output, e.g. `[400, 200, 100, 50, K]`.
    dims: Vec<usize>,
    layers: Vec<DenseLayer>,
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub seed: u64,
    pub confidence_threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 100,
            epochs: 50,
            learning_rate: 0.01,
            momentum: 0.9,
            seed: 1,
            confidence_threshold: 0.5,
        }
    }
}

/// A training example: subject and object entity vectors plus the gold
/// relation.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub subject_vector: Vec<f64>,
    pub object_vector: Vec<f64>,
    pub label: RelationType,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

impl RelationModel {
    /// Glorot-uniform initialization with the default 400→200→100→50→K shape.
    pub fn init(labels: &[RelationType], seed: u64) -> Result<Self> {
        let mut dims = vec![DEFAULT_INPUT_DIM];
        dims.extend_from_slice(&DEFAULT_HIDDEN);
        dims.push(labels.len());
        Self::init_with_dims(labels, &dims, seed)
    }

    /// Same initialization with explicit layer sizes, for small test builds.
    /// `dims` runs input→hidden...→output; the last entry must equal the
    /// label count.
    pub fn init_with_dims(labels: &[RelationType], dims: &[usize], seed: u64) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::validation("model needs at least one label"));
        }
        if labels.iter().collect::<std::collections::HashSet<_>>().len() != labels.len() {
            return Err(Error::validation("model labels must be duplicate-free"));
        }
        if dims.len() < 2 || *dims.last().unwrap() != labels.len() {
            return Err(Error::validation(
                "layer dims must end at the label count",
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = dims
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
                DenseLayer {
                    weights: (0..fan_out)
                        .map(|_| (0..fan_in).map(|_| rng.gen_range(-bound..bound)).collect())
                        .collect(),
                    biases: vec![0.0; fan_out],
                }
            })
            .collect();
        Ok(RelationModel {
            labels: labels.to_vec(),
            dims: dims.to_vec(),
            layers,
        })
    }

    pub fn labels(&self) -> &[RelationType] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn label_index(&self, label: &RelationType) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn check_input(&self, subj: &[f64], obj: &[f64]) -> Result<Vec<f64>> {
        if subj.len() + obj.len() != self.input_dim() {
            return Err(Error::validation(format!(
                "input vectors sum to {} components, model expects {}",
                subj.len() + obj.len(),
                self.input_dim()
            )));
        }
        if subj.iter().chain(obj).any(|v| !v.is_finite()) {
            return Err(Error::validation("non-finite classifier input"));
        }
        Ok(subj.iter().chain(obj).copied().collect())
    }

    /// Probability distribution over the label set.
    pub fn forward(&self, subj: &[f64], obj: &[f64]) -> Result<Vec<f64>> {
        let x = self.check_input(subj, obj)?;
        Ok(self.forward_trace(&x).pop().unwrap())
    }

    // Activations of every layer, input excluded; last entry is the softmax
    // output.
    fn forward_trace(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut activations = Vec::with_capacity(self.layers.len());
        let mut current = x.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let z = layer.affine(&current);
            current = if i == last {
                softmax(&z)
            } else {
                z.into_iter().map(sigmoid).collect()
            };
            activations.push(current.clone());
        }
        activations
    }

    // Per-parameter gradients of the cross-entropy loss for one example,
    // plus the loss value.
    fn backprop(&self, x: &[f64], label_index: usize, grads: &mut [DenseLayer]) -> f64 {
        let activations = self.forward_trace(x);
        let probs = activations.last().unwrap();
        let loss_value = -(probs[label_index].max(1e-300)).ln();

        // softmax + cross-entropy: delta = probs - onehot
        let mut delta: Vec<f64> = probs.clone();
        delta[label_index] -= 1.0;

        for layer_idx in (0..self.layers.len()).rev() {
            let input: &[f64] = if layer_idx == 0 {
                x
            } else {
                &activations[layer_idx - 1]
            };
            for (o, d) in delta.iter().enumerate() {
                grads[layer_idx].biases[o] += d;
                for (i, xi) in input.iter().enumerate() {
                    grads[layer_idx].weights[o][i] += d * xi;
                }
            }
            if layer_idx > 0 {
                let h = &activations[layer_idx - 1];
                let w = &self.layers[layer_idx].weights;
                delta = (0..h.len())
                    .map(|i| {
                        let upstream: f64 = delta.iter().enumerate().map(|(o, d)| d * w[o][i]).sum();
                        upstream * h[i] * (1.0 - h[i])
                    })
                    .collect();
            }
        }
        loss_value
    }

    /// Mini-batch SGD with momentum; returns per-epoch mean loss.
    pub fn train(&mut self, data: &[LabeledExample], cfg: &TrainConfig) -> Result<Vec<f64>> {
        if data.is_empty() {
            return Err(Error::validation("training data is empty"));
        }
        let mut indexed = Vec::with_capacity(data.len());
        for ex in data {
            let idx = self.label_index(&ex.label).ok_or_else(|| {
                Error::validation(format!("label '{}' is not in the model label set", ex.label))
            })?;
            let x = self.check_input(&ex.subject_vector, &ex.object_vector)?;
            indexed.push((x, idx));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut order: Vec<usize> = (0..indexed.len()).collect();
        let mut velocity: Vec<DenseLayer> = self.layers.iter().map(|l| l.zeros_like()).collect();
        let mut grads: Vec<DenseLayer> = self.layers.iter().map(|l| l.zeros_like()).collect();
        let mut history = Vec::with_capacity(cfg.epochs);

        for _epoch in 0..cfg.epochs {
            order.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            for batch in order.chunks(cfg.batch_size) {
                for g in grads.iter_mut() {
                    g.weights.iter_mut().for_each(|r| r.iter_mut().for_each(|v| *v = 0.0));
                    g.biases.iter_mut().for_each(|v| *v = 0.0);
                }
                for &i in batch {
                    let (x, label) = &indexed[i];
                    epoch_loss += self.backprop(x, *label, &mut grads);
                }
                let scale = 1.0 / batch.len() as f64;
                for ((layer, vel), grad) in
                    self.layers.iter_mut().zip(&mut velocity).zip(&grads)
                {
                    for o in 0..layer.biases.len() {
                        for i in 0..layer.weights[o].len() {
                            let v = cfg.momentum * vel.weights[o][i]
                                - cfg.learning_rate * grad.weights[o][i] * scale;
                            vel.weights[o][i] = v;
                            layer.weights[o][i] += v;
                        }
                        let v = cfg.momentum * vel.biases[o]
                            - cfg.learning_rate * grad.biases[o] * scale;
                        vel.biases[o] = v;
                        layer.biases[o] += v;
                    }
                }
            }
            history.push(epoch_loss / indexed.len() as f64);
        }
        Ok(history)
    }

    /// Compares analytic gradients against central finite differences and
    /// returns the max relative error over all parameters.
    pub fn gradient_check(&self, example: &LabeledExample, eps: f64) -> Result<f64> {
        let label_index = self.label_index(&example.label).ok_or_else(|| {
            Error::validation(format!("label '{}' is not in the model", example.label))
        })?;
        let x = self.check_input(&example.subject_vector, &example.object_vector)?;

        let mut grads: Vec<DenseLayer> = self.layers.iter().map(|l| l.zeros_like()).collect();
        self.backprop(&x, label_index, &mut grads);

        let mut perturbed = self.clone();
        let mut max_rel = 0.0f64;
        for layer_idx in 0..self.layers.len() {
            let rows = self.layers[layer_idx].weights.len();
            let cols = self.layers[layer_idx].weights[0].len();
            for o in 0..rows {
                for i in 0..=cols {
                    let analytic = if i < cols {
                        grads[layer_idx].weights[o][i]
                    } else {
                        grads[layer_idx].biases[o]
                    };
                    let read = |m: &RelationModel| {
                        if i < cols {
                            m.layers[layer_idx].weights[o][i]
                        } else {
                            m.layers[layer_idx].biases[o]
                        }
                    };
                    let write = |m: &mut RelationModel, v: f64| {
                        if i < cols {
                            m.layers[layer_idx].weights[o][i] = v;
                        } else {
                            m.layers[layer_idx].biases[o] = v;
                        }
                    };
                    let original = read(&perturbed);
                    write(&mut perturbed, original + eps);
                    let plus = loss(&perturbed.forward_trace(&x).pop().unwrap(), label_index)?;
                    write(&mut perturbed, original - eps);
                    let minus = loss(&perturbed.forward_trace(&x).pop().unwrap(), label_index)?;
                    write(&mut perturbed, original);
                    let numeric = (plus - minus) / (2.0 * eps);
                    let rel = (analytic - numeric).abs()
                        / analytic.abs().max(numeric.abs()).max(1e-8);
                    max_rel = max_rel.max(rel);
                }
            }
        }
        Ok(max_rel)
    }

    /// Classifies a candidate pair. Returns `None` when the best probability
    /// falls below the confidence threshold.
    pub fn predict(
        &self,
        pair: &CandidatePair,
        table: &EmbeddingTable,
        mask_to_schema: bool,
        threshold: f64,
    ) -> Result<Option<(RelationType, f64)>> {
        let subj = table.entity_vector(&pair.subject);
        let obj = table.entity_vector(&pair.object);
        let mut probs = self.forward(&subj, &obj)?;

        if mask_to_schema {
            let mut any = false;
            for (p, label) in probs.iter_mut().zip(&self.labels) {
                if pair.candidate_set.contains(label) {
                    any = true;
                } else {
                    *p = 0.0;
                }
            }
            if !any {
                return Err(Error::validation(format!(
                    "schema candidate set {:?} is disjoint from the model labels",
                    pair.candidate_set
                )));
            }
            let sum: f64 = probs.iter().sum();
            for p in probs.iter_mut() {
                *p /= sum;
            }
        }

        let (best, best_p) = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        if *best_p < threshold {
            return Ok(None);
        }
        Ok(Some((self.labels[best].clone(), *best_p)))
    }

    /// Writes the JSON checkpoint.
    pub fn save(&self, path: &Path, metadata: CheckpointMetadata) -> Result<()> {
        let checkpoint = Checkpoint {
            labels: self.labels.clone(),
            dims: self.dims.clone(),
            layers: self
                .layers
                .iter()
                .map(|l| CheckpointLayer {
                    weights: l.weights.iter().flatten().copied().collect(),
                    biases: l.biases.clone(),
                })
                .collect(),
            metadata,
        };
        let json = serde_json::to_vec_pretty(&checkpoint)
            .map_err(|e| Error::Internal(e.to_string()))?;
        std::fs::write(path, json).map_err(|e| Error::io(path.display().to_string(), e))
    }

    /// Loads a checkpoint, validating that layer shapes chain correctly.
    pub fn load(path: &Path) -> Result<(Self, CheckpointMetadata)> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let checkpoint: Checkpoint = serde_json::from_slice(&bytes)
            .map_err(|e| Error::parse(e.line(), format!("invalid model checkpoint: {e}")))?;
        if checkpoint.dims.len() < 2
            || *checkpoint.dims.last().unwrap() != checkpoint.labels.len()
            || checkpoint.layers.len() != checkpoint.dims.len() - 1
        {
            return Err(Error::validation("checkpoint layer shapes do not chain"));
        }
        let mut layers = Vec::with_capacity(checkpoint.layers.len());
        for (w, layer) in checkpoint.dims.windows(2).zip(&checkpoint.layers) {
            let (fan_in, fan_out) = (w[0], w[1]);
            if layer.weights.len() != fan_in * fan_out || layer.biases.len() != fan_out {
                return Err(Error::validation("checkpoint layer shapes do not chain"));
            }
            layers.push(DenseLayer {
                weights: layer.weights.chunks(fan_in).map(|c| c.to_vec()).collect(),
                biases: layer.biases.clone(),
            });
        }
        Ok((
            RelationModel {
                labels: checkpoint.labels,
                dims: checkpoint.dims,
                layers,
            },
            checkpoint.metadata,
        ))
    }

    #[doc(hidden)]
    pub fn layers_mut(&mut self) -> &mut Vec<DenseLayer> {
        &mut self.layers
    }

    #[doc(hidden)]
    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    /// Reorders the label set, permuting output weights and biases to match.
    pub fn permute_labels(&mut self, order: &[usize]) -> Result<()> {
        if order.len() != self.labels.len() {
            return Err(Error::validation("permutation length mismatch"));
        }
        let last = self.layers.len() - 1;
        self.labels = order.iter().map(|&i| self.labels[i].clone()).collect();
        self.layers[last].weights =
            order.iter().map(|&i| self.layers[last].weights[i].clone()).collect();
        self.layers[last].biases = order.iter().map(|&i| self.layers[last].biases[i]).collect();
        Ok(())
    }
}

/// Cross-entropy of a probability vector at the gold index.
pub fn loss(probs: &[f64], label_index: usize) -> Result<f64> {
    if label_index >= probs.len() {
        return Err(Error::validation(format!(
            "label index {label_index} out of range for {} classes",
            probs.len()
        )));
    }
    Ok(-(probs[label_index].max(1e-300)).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CheckpointMetadata {
    pub seed: u64,
    pub epochs: usize,
    pub final_loss: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointLayer {
    weights: Vec<f64>,
    biases: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    labels: Vec<RelationType>,
    dims: Vec<usize>,
    layers: Vec<CheckpointLayer>,
    metadata: CheckpointMetadata,
}
