//! Word vectors trained from scratch with skip-gram negative sampling, and
//! mention-to-vector composition for the classifier.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{tokenize, Document};
use crate::error::{Error, Result};
use crate::ner::EntityMention;

pub const UNK_TOKEN: &str = "<unk>";

/// Training hyperparameters. Only `dim` is fixed by the architecture the
/// classifier expects; the rest follow word2vec conventions.
#[derive(Debug, Clone)]
pub struct SgnsConfig {
    pub dim: usize,
    pub context_window: usize,
    pub negatives_per_positive: usize,
    pub min_count: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub subsample_threshold: f64,
    pub seed: u64,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 200,
            context_window: 5,
            negatives_per_positive: 5,
            min_count: 2,
            epochs: 5,
            learning_rate: 0.025,
            subsample_threshold: 1e-3,
            seed: 1,
        }
    }
}

/// Vocabulary with deterministic index order: descending frequency, ties
/// lexicographic, UNK reserved at the last index.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    counts: Vec<u64>,
    unk_index: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn unk_index(&self) -> usize {
        self.unk_index
    }

    pub fn token(&self, idx: usize) -> &str {
        &self.tokens[idx]
    }

    /// Index of a token, falling back to UNK.
    pub fn lookup(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(self.unk_index)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }
}

/// Builds the vocabulary over all document tokens.
pub fn build_vocab(docs: &[Document], min_count: usize) -> Result<Vocabulary> {
    if docs.is_empty() {
        return Err(Error::validation("build_vocab requires a non-empty corpus"));
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for doc in docs {
        for tok in &doc.tokens {
            *counts.entry(tok.surface.as_str()).or_insert(0) += 1;
        }
    }
    let mut kept: Vec<(&str, u64)> = Vec::new();
    let mut unk_count = 0u64;
    for (tok, n) in counts {
        if n >= min_count as u64 && tok != UNK_TOKEN {
            kept.push((tok, n));
        } else {
            unk_count += n;
        }
    }
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let mut tokens: Vec<String> = kept.iter().map(|(t, _)| t.to_string()).collect();
    let mut freq: Vec<u64> = kept.iter().map(|(_, n)| *n).collect();
    tokens.push(UNK_TOKEN.to_string());
    freq.push(unk_count);
    let unk_index = tokens.len() - 1;
    let index = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(Vocabulary {
        tokens,
        index,
        counts: freq,
        unk_index,
    })
}

/// Token vectors; `input_vectors` are the embeddings handed to the
/// classifier, `output_vectors` are the context-side parameters.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    pub dim: usize,
    vocab: Vocabulary,
    input_vectors: Vec<Vec<f64>>,
    output_vectors: Vec<Vec<f64>>,
}

impl EmbeddingTable {
    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn vector(&self, token: &str) -> &[f64] {
        &self.input_vectors[self.vocab.lookup(token)]
    }

    /// Context-side vector; zeros for tables restored from disk.
    pub fn output_vector(&self, token: &str) -> &[f64] {
        &self.output_vectors[self.vocab.lookup(token)]
    }

    /// Element-wise mean of the mention's token vectors; OOV tokens use the
    /// UNK row.
    pub fn entity_vector(&self, mention: &EntityMention) -> Vec<f64> {
        self.surface_vector(&mention.surface)
    }

    /// Same composition, keyed by a raw surface string.
    pub fn surface_vector(&self, surface: &str) -> Vec<f64> {
        let tokens = tokenize(surface);
        let mut acc = vec![0.0; self.dim];
        if tokens.is_empty() {
            return self.input_vectors[self.vocab.unk_index()].clone();
        }
        for tok in &tokens {
            let row = &self.input_vectors[self.vocab.lookup(&tok.surface)];
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        let n = tokens.len() as f64;
        for a in &mut acc {
            *a /= n;
        }
        acc
    }

    /// Writes the text format: `|V| dim` header, then `token v1 ... v_dim`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut w = BufWriter::new(file);
        let io_err = |e| Error::io(path.display().to_string(), e);
        writeln!(w, "{} {}", self.vocab.len(), self.dim).map_err(io_err)?;
        for (i, row) in self.input_vectors.iter().enumerate() {
            write!(w, "{}", self.vocab.token(i)).map_err(io_err)?;
            for v in row {
                write!(w, " {v}").map_err(io_err)?;
            }
            writeln!(w).map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    /// Loads the text format written by [`EmbeddingTable::save`].
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .transpose()
            .map_err(|e| Error::io(path.display().to_string(), e))?
            .ok_or_else(|| Error::parse(1, "empty embedding file"))?;
        let mut parts = header.split_whitespace();
        let (vocab_size, dim): (usize, usize) = match (parts.next(), parts.next()) {
            (Some(v), Some(d)) => (
                v.parse().map_err(|_| Error::parse(1, "bad vocab size"))?,
                d.parse().map_err(|_| Error::parse(1, "bad dimension"))?,
            ),
            _ => return Err(Error::parse(1, "header must be '|V| dim'")),
        };

        let mut tokens = Vec::with_capacity(vocab_size);
        let mut input_vectors = Vec::with_capacity(vocab_size);
        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields
                .next()
                .ok_or_else(|| Error::parse(lineno, "missing token"))?
                .to_string();
            let row: Vec<f64> = fields
                .map(|f| {
                    f.parse()
                        .map_err(|_| Error::parse(lineno, format!("bad component '{f}'")))
                })
                .collect::<Result<_>>()?;
            if row.len() != dim {
                return Err(Error::parse(
                    lineno,
                    format!("expected {dim} components, found {}", row.len()),
                ));
            }
            tokens.push(token);
            input_vectors.push(row);
        }
        if tokens.len() != vocab_size {
            return Err(Error::validation(format!(
                "header declares {vocab_size} tokens but file has {}",
                tokens.len()
            )));
        }
        let unk_index = tokens
            .iter()
            .position(|t| t == UNK_TOKEN)
            .ok_or_else(|| Error::validation("embedding file lacks the UNK token"))?;
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let counts = vec![1; tokens.len()];
        let output_vectors = vec![vec![0.0; dim]; tokens.len()];
        Ok(EmbeddingTable {
            dim,
            vocab: Vocabulary {
                tokens,
                index,
                counts,
                unk_index,
            },
            input_vectors,
            output_vectors,
        })
    }
}

// Cumulative table over counts^(3/4) for negative sampling.
struct NegativeSampler {
    cumulative: Vec<f64>,
}

impl NegativeSampler {
    fn new(counts: &[u64]) -> Self {
        let mut cumulative = Vec::with_capacity(counts.len());
        let mut acc = 0.0;
        for &c in counts {
            acc += (c.max(1) as f64).powf(0.75);
            cumulative.push(acc);
        }
        NegativeSampler { cumulative }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().unwrap();
        let x = rng.gen_range(0.0..total);
        self.cumulative.partition_point(|&c| c <= x)
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Trains SGNS embeddings. With a fixed seed the run is single-threaded and
/// bit-reproducible.
pub fn train_embeddings(docs: &[Document], cfg: &SgnsConfig) -> Result<(EmbeddingTable, Vec<f64>)> {
    let vocab = build_vocab(docs, cfg.min_count)?;
    if vocab.len() < 3 {
        // fewer than 2 real tokens plus UNK
        return Err(Error::validation(
            "corpus too small: need at least 2 vocabulary tokens",
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bound = 0.5 / cfg.dim as f64;
    let mut input: Vec<Vec<f64>> = (0..vocab.len())
        .map(|_| (0..cfg.dim).map(|_| rng.gen_range(-bound..bound)).collect())
        .collect();
    let mut output: Vec<Vec<f64>> = vec![vec![0.0; cfg.dim]; vocab.len()];

    let sampler = NegativeSampler::new(&vocab.counts);
    let total_count: u64 = vocab.counts.iter().sum();
    let token_total: usize = docs.iter().map(|d| d.tokens.len()).sum();
    let schedule_total = (cfg.epochs * token_total).max(1) as f64;
    let mut processed = 0usize;

    let mut loss_history = Vec::with_capacity(cfg.epochs);
    let mut grad_input = vec![0.0; cfg.dim];

    for _epoch in 0..cfg.epochs {
        let mut epoch_loss = 0.0;
        let mut epoch_pairs = 0u64;

        for doc in docs {
            let sequence: Vec<usize> = doc
                .tokens
                .iter()
                .map(|t| vocab.lookup(&t.surface))
                .filter(|&idx| {
                    let f = vocab.counts[idx].max(1) as f64 / total_count as f64;
                    let keep = (cfg.subsample_threshold / f).sqrt().min(1.0);
                    rng.gen::<f64>() < keep
                })
                .collect();

            for (pos, &center) in sequence.iter().enumerate() {
                processed += 1;
                let lr = cfg.learning_rate
                    * (1.0 - processed as f64 / schedule_total).max(1e-4);
                let reduced = rng.gen_range(1..=cfg.context_window);
                let lo = pos.saturating_sub(reduced);
                let hi = (pos + reduced).min(sequence.len().saturating_sub(1));
                for ctx_pos in lo..=hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    let target = sequence[ctx_pos];
                    grad_input.iter_mut().for_each(|g| *g = 0.0);
                    for k in 0..=cfg.negatives_per_positive {
                        let (out_idx, label) = if k == 0 {
                            (target, 1.0)
                        } else {
                            let neg = sampler.sample(&mut rng);
                            if neg == target {
                                continue;
                            }
                            (neg, 0.0)
                        };
                        let dot: f64 = input[center]
                            .iter()
                            .zip(&output[out_idx])
                            .map(|(a, b)| a * b)
                            .sum();
                        let pred = sigmoid(dot);
                        epoch_loss -= if label > 0.5 {
                            pred.max(1e-12).ln()
                        } else {
                            (1.0 - pred).max(1e-12).ln()
                        };
                        let g = (pred - label) * lr;
                        for d in 0..cfg.dim {
                            grad_input[d] += g * output[out_idx][d];
                            output[out_idx][d] -= g * input[center][d];
                        }
                    }
                    epoch_pairs += 1;
                    for d in 0..cfg.dim {
                        input[center][d] -= grad_input[d];
                    }
                }
            }
        }
        loss_history.push(epoch_loss / epoch_pairs.max(1) as f64);
    }

    for row in input.iter().chain(output.iter()) {
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Internal("non-finite embedding after training".into()));
        }
    }

    Ok((
        EmbeddingTable {
            dim: cfg.dim,
            vocab,
            input_vectors: input,
            output_vectors: output,
        },
        loss_history,
    ))
}

/// Cosine similarity; zero vectors compare as 0.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}
