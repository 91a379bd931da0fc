//! Skip-gram with negative sampling.
//!
//! Single-threaded and fully determined by the seed. Frequent-token subsampling
//! is not applied.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EmbeddingSpace;
use crate::corpus::Corpus;
use crate::matcher::Matcher;
use crate::{Error, Result};

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    pub dim: usize,
    /// Maximum distance between centre and context token.
    pub window: usize,
    /// Negative samples per positive pair.
    pub negatives: usize,
    /// Tokens seen fewer times are dropped from the vocabulary.
    pub min_count: u64,
    pub epochs: usize,
    pub initial_lr: f64,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            dim: 100,
            window: 5,
            negatives: 5,
            min_count: 5,
            epochs: 5,
            initial_lr: 0.025,
            seed: 1,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("train params: {what}")));
        if self.dim < 2 {
            return bad("dim must be at least 2");
        }
        if self.window == 0 || self.negatives == 0 || self.min_count == 0 || self.epochs == 0 {
            return bad("window, negatives, min_count and epochs must be positive");
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return bad("initial_lr must be positive");
        }
        Ok(())
    }
}

/// Diagnostics from a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean negative log-likelihood per positive pair, one entry per epoch.
    pub epoch_loss: Vec<f64>,
    pub pairs_per_epoch: u64,
}

/// Trains embeddings on the idiom-rewritten posts of `corpus`.
pub fn train_sgns(corpus: &Corpus, matcher: &Matcher, params: &TrainParams) -> Result<EmbeddingSpace> {
    train_sgns_with_report(corpus, matcher, params).map(|(space, _)| space)
}

pub fn train_sgns_with_report(
    corpus: &Corpus,
    matcher: &Matcher,
    params: &TrainParams,
) -> Result<(EmbeddingSpace, TrainReport)> {
    params.validate()?;
    if corpus.is_empty() {
        return Err(Error::InsufficientData("cannot train on an empty corpus".into()));
    }
    let docs: Vec<Vec<String>> = corpus
        .posts()
        .map(|p| matcher.rewrite_with_idiom_tokens(&p.tokens).into_inner())
        .collect();
    train_on_sequences(&docs, params)
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `-ln(sigmoid(x))`, stable for large |x|.
fn neg_log_sigmoid(x: f64) -> f64 {
    if x > 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

struct Vocab {
    tokens: Vec<String>,
    counts: Vec<u64>,
}

fn build_vocab(docs: &[Vec<String>], min_count: u64) -> Vocab {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for d in docs {
        for t in d {
            *counts.entry(t.as_str()).or_default() += 1;
        }
    }
    let mut kept: Vec<(&str, u64)> = counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Vocab {
        tokens: kept.iter().map(|(t, _)| t.to_string()).collect(),
        counts: kept.iter().map(|(_, c)| *c).collect(),
    }
}

/// Cumulative unigram^0.75 distribution for negative sampling.
struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        NoiseTable { cumulative }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().unwrap();
        let u = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

pub(crate) fn train_on_sequences(
    docs: &[Vec<String>],
    params: &TrainParams,
) -> Result<(EmbeddingSpace, TrainReport)> {
    params.validate()?;
    let vocab = build_vocab(docs, params.min_count);
    if vocab.tokens.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no token occurs at least {} times",
            params.min_count
        )));
    }
    let index: HashMap<&str, u32> = vocab
        .tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i as u32))
        .collect();
    let sentences: Vec<Vec<u32>> = docs
        .iter()
        .map(|d| d.iter().filter_map(|t| index.get(t.as_str()).copied()).collect())
        .collect();
    let words_per_epoch: u64 = sentences.iter().map(|s| s.len() as u64).sum();

    let dim = params.dim;
    let n = vocab.tokens.len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut input: Vec<f64> = (0..n * dim)
        .map(|_| (rng.random::<f64>() - 0.5) / dim as f64)
        .collect();
    let mut output = vec![0.0f64; n * dim];
    let noise = NoiseTable::new(&vocab.counts);

    let total_words = (words_per_epoch * params.epochs as u64).max(1);
    let min_lr = params.initial_lr * 1e-4;
    let mut processed = 0u64;
    let mut grad = vec![0.0f64; dim];
    let mut epoch_loss = Vec::with_capacity(params.epochs);
    let mut pairs_per_epoch = 0;

    for _ in 0..params.epochs {
        let mut loss = 0.0;
        let mut pairs = 0u64;
        for sent in &sentences {
            for (pos, &center) in sent.iter().enumerate() {
                let lr = (params.initial_lr * (1.0 - processed as f64 / total_words as f64))
                    .max(min_lr);
                processed += 1;
                let reach = rng.random_range(1..=params.window);
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(sent.len() - 1);
                for ctx_pos in lo..=hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    let context = sent[ctx_pos] as usize;
                    let c = center as usize;
                    let l1 = c * dim;
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    for k in 0..=params.negatives {
                        let (target, label) = if k == 0 {
                            (context, 1.0)
                        } else {
                            let t = noise.sample(&mut rng);
                            if t == context {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let l2 = target * dim;
                        let score: f64 = input[l1..l1 + dim]
                            .iter()
                            .zip(&output[l2..l2 + dim])
                            .map(|(a, b)| a * b)
                            .sum();
                        loss += if label > 0.0 {
                            neg_log_sigmoid(score)
                        } else {
                            neg_log_sigmoid(-score)
                        };
                        let g = (label - sigmoid(score)) * lr;
                        for j in 0..dim {
                            grad[j] += g * output[l2 + j];
                            output[l2 + j] += g * input[l1 + j];
                        }
                    }
                    for j in 0..dim {
                        input[l1 + j] += grad[j];
                    }
                    pairs += 1;
                }
            }
        }
        epoch_loss.push(if pairs > 0 { loss / pairs as f64 } else { 0.0 });
        pairs_per_epoch = pairs;
    }

    let space = EmbeddingSpace::from_parts(vocab.tokens, dim, input)?;
    Ok((
        space,
        TrainReport {
            epoch_loss,
            pairs_per_epoch,
        },
    ))
}
