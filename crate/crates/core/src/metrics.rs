//! Dataset splitting and classifier evaluation: accuracy, per-class
//! precision/recall/F1, and the confusion matrix.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classifier::LabeledExample;
use crate::error::{Error, Result};
use crate::schema::RelationType;

/// Named split presets matching the evaluation setups this tool reports.
pub const SPLIT_PRESETS: [(&str, f64); 3] = [("80-20", 0.8), ("70-30", 0.7), ("66-34", 0.66)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Evaluation results over a prediction list. `confusion[gold][predicted]`
/// counts concrete predictions; below-threshold abstentions are tracked per
/// gold class in `no_prediction` and count against accuracy and recall.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub labels: Vec<RelationType>,
    pub accuracy: f64,
    pub per_class: BTreeMap<RelationType, ClassScores>,
    pub confusion: Vec<Vec<u64>>,
    pub no_prediction: Vec<u64>,
    pub support: BTreeMap<RelationType, u64>,
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Half-up rounding to integer percent, for display only.
pub fn percent(x: f64) -> i64 {
    (x * 100.0 + 0.5).floor() as i64
}

/// Scores a list of (gold, predicted) pairs against the model label set.
pub fn evaluate(
    labels: &[RelationType],
    predictions: &[(RelationType, Option<RelationType>)],
) -> Result<EvalReport> {
    if predictions.is_empty() {
        return Err(Error::validation("evaluate requires at least one prediction"));
    }
    let index: BTreeMap<&RelationType, usize> =
        labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let k = labels.len();
    let mut confusion = vec![vec![0u64; k]; k];
    let mut no_prediction = vec![0u64; k];

    for (gold, predicted) in predictions {
        let g = *index
            .get(gold)
            .ok_or_else(|| Error::validation(format!("gold label '{gold}' not in label set")))?;
        match predicted {
            Some(p) => {
                let p = *index.get(p).ok_or_else(|| {
                    Error::validation(format!("predicted label '{p}' not in label set"))
                })?;
                confusion[g][p] += 1;
            }
            None => no_prediction[g] += 1,
        }
    }

    let total: u64 =
        confusion.iter().flatten().sum::<u64>() + no_prediction.iter().sum::<u64>();
    let correct: u64 = (0..k).map(|i| confusion[i][i]).sum();
    let accuracy = correct as f64 / total as f64;

    let mut per_class = BTreeMap::new();
    let mut support = BTreeMap::new();
    for (i, label) in labels.iter().enumerate() {
        let tp = confusion[i][i];
        let fp: u64 = (0..k).filter(|&g| g != i).map(|g| confusion[g][i]).sum();
        let fn_: u64 =
            (0..k).filter(|&p| p != i).map(|p| confusion[i][p]).sum::<u64>() + no_prediction[i];
        let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
        per_class.insert(
            label.clone(),
            ClassScores {
                precision,
                recall,
                f1: f1_score(precision, recall),
            },
        );
        support.insert(label.clone(), tp + fn_);
    }

    Ok(EvalReport {
        labels: labels.to_vec(),
        accuracy,
        per_class,
        confusion,
        no_prediction,
        support,
    })
}

impl EvalReport {
    /// Aligned plain-text table of per-class scores in integer percent.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("accuracy: {:.2}%\n", self.accuracy * 100.0));
        let width = self
            .labels
            .iter()
            .map(|l| l.name().len())
            .max()
            .unwrap_or(5)
            .max("class".len());
        out.push_str(&format!(
            "{:width$}  {:>9}  {:>6}  {:>3}  {:>7}\n",
            "class", "precision", "recall", "f1", "support"
        ));
        for label in &self.labels {
            let s = &self.per_class[label];
            out.push_str(&format!(
                "{:width$}  {:>9}  {:>6}  {:>3}  {:>7}\n",
                label.name(),
                percent(s.precision),
                percent(s.recall),
                percent(s.f1),
                self.support[label],
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

#[derive(Debug)]
pub struct SplitResult {
    pub train: Vec<LabeledExample>,
    pub test: Vec<LabeledExample>,
    pub warnings: Vec<String>,
}

/// Per-label proportional split with a seeded shuffle. Labels with fewer
/// than 2 examples go entirely to train, with a warning.
pub fn stratified_split(
    data: &[LabeledExample],
    train_fraction: f64,
    seed: u64,
) -> Result<SplitResult> {
    if data.is_empty() {
        return Err(Error::validation("cannot split an empty dataset"));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::validation("train_fraction must be in (0, 1)"));
    }

    let mut by_label: BTreeMap<&RelationType, Vec<usize>> = BTreeMap::new();
    for (i, ex) in data.iter().enumerate() {
        by_label.entry(&ex.label).or_default().push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut warnings = Vec::new();
    for (label, mut indices) in by_label {
        if indices.len() < 2 {
            warnings.push(format!(
                "label '{label}' has {} example(s); all assigned to train",
                indices.len()
            ));
            train.extend(indices.iter().map(|&i| data[i].clone()));
            continue;
        }
        indices.shuffle(&mut rng);
        let n_train = ((indices.len() as f64 * train_fraction) + 0.5).floor() as usize;
        let n_train = n_train.clamp(1, indices.len() - 1);
        for (pos, &i) in indices.iter().enumerate() {
            if pos < n_train {
                train.push(data[i].clone());
            } else {
                test.push(data[i].clone());
            }
        }
    }
    Ok(SplitResult {
        train,
        test,
        warnings,
    })
}
