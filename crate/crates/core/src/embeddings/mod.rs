//! Word vector spaces: storage, the plain-text vector format, cosine similarity,
//! nearest neighbours and bag-of-vectors sentence embeddings.

mod sgns;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::stopwords::Stopwords;
use crate::{Error, Result};

pub use sgns::{train_sgns, train_sgns_with_report, TrainParams, TrainReport};

/// Cosine similarity, clamped to [-1, 1].
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// A vocabulary with one dense vector per token.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpace {
    index: HashMap<String, usize>,
    tokens: Vec<String>,
    dim: usize,
    /// Row-major, `tokens.len() * dim`.
    data: Vec<f64>,
}

/// The `k` nearest tokens to an anchor, by descending cosine.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub anchor: String,
    pub neighbors: Vec<(String, f64)>,
}

impl NeighborList {
    pub fn tokens(&self) -> Vec<String> {
        self.neighbors.iter().map(|(t, _)| t.clone()).collect()
    }
}

impl EmbeddingSpace {
    pub(crate) fn from_parts(tokens: Vec<String>, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if data.len() != tokens.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: tokens.len() * dim,
                actual: data.len(),
            });
        }
        if let Some(bad) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite value in vector of `{}`",
                tokens[bad / dim]
            )));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate token `{t}`")));
            }
        }
        Ok(EmbeddingSpace {
            index,
            tokens,
            dim,
            data,
        })
    }

    /// Builds a space from `(token, vector)` rows.
    pub fn from_rows(dim: usize, rows: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let mut tokens = Vec::with_capacity(rows.len());
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (t, v) in rows {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: v.len(),
                });
            }
            tokens.push(t);
            data.extend(v);
        }
        Self::from_parts(tokens, dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens in index order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&i| self.row(i))
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Reads the plain-text format: a `<vocab_size> <dim>` header, then one line per
    /// token with `dim` space-separated floats.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = raw.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "missing header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (size, dim) = match fields.as_slice() {
            [n, d] => match (n.parse::<usize>(), d.parse::<usize>()) {
                (Ok(n), Ok(d)) if d > 0 => (n, d),
                _ => return Err(Error::parse(path, 1, format!("bad header `{header}`"))),
            },
            _ => return Err(Error::parse(path, 1, format!("bad header `{header}`"))),
        };
        let mut tokens = Vec::with_capacity(size);
        let mut data = Vec::with_capacity(size * dim);
        let mut seen = HashMap::with_capacity(size);
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let row = i + 1;
            let mut parts = line.split_whitespace();
            let token = parts.next().unwrap().to_string();
            let values: Vec<f64> = parts
                .map(|p| p.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::parse(path, row, format!("bad value: {e}")))?;
            if values.len() != dim {
                return Err(Error::parse(
                    path,
                    row,
                    format!("expected {dim} values, found {}", values.len()),
                ));
            }
            if values.iter().any(|x| !x.is_finite()) {
                return Err(Error::parse(path, row, "non-finite value"));
            }
            if seen.insert(token.clone(), row).is_some() {
                return Err(Error::parse(path, row, format!("duplicate token `{token}`")));
            }
            tokens.push(token);
            data.extend(values);
        }
        if tokens.len() != size {
            return Err(Error::parse(
                path,
                tokens.len() + 2,
                format!("header declares {size} rows, found {}", tokens.len()),
            ));
        }
        Self::from_parts(tokens, dim, data)
    }

    /// Writes the plain-text format. Values use the shortest representation that
    /// parses back to the same `f64`.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::with_capacity(self.data.len() * 12);
        writeln!(out, "{} {}", self.len(), self.dim).unwrap();
        for (i, t) in self.tokens.iter().enumerate() {
            out.push_str(t);
            for x in self.row(i) {
                write!(out, " {x}").unwrap();
            }
            out.push('\n');
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Top `k` tokens by cosine to `token`, ties broken by token order.
    pub fn nearest_neighbors(&self, token: &str, k: usize) -> Result<NeighborList> {
        let &anchor = self
            .index
            .get(token)
            .ok_or_else(|| Error::OutOfVocabulary(token.to_string()))?;
        if k > self.len().saturating_sub(1) {
            return Err(Error::InvalidArgument(format!(
                "asked for {k} neighbours in a vocabulary of {}",
                self.len()
            )));
        }
        let a = self.row(anchor);
        let na = norm(a);
        if na == 0.0 {
            return Err(Error::ZeroVector);
        }
        let mut scored: Vec<(usize, f64)> = (0..self.len())
            .filter(|&i| i != anchor)
            .map(|i| {
                let v = self.row(i);
                let nv = norm(v);
                let cos = if nv == 0.0 {
                    0.0
                } else {
                    (dot(a, v) / (na * nv)).clamp(-1.0, 1.0)
                };
                (i, cos)
            })
            .collect();
        let order = |x: &(usize, f64), y: &(usize, f64)| {
            y.1.total_cmp(&x.1)
                .then_with(|| self.tokens[x.0].cmp(&self.tokens[y.0]))
        };
        if k < scored.len() {
            scored.select_nth_unstable_by(k, order);
            scored.truncate(k);
        }
        scored.sort_by(order);
        Ok(NeighborList {
            anchor: token.to_string(),
            neighbors: scored
                .into_iter()
                .map(|(i, c)| (self.tokens[i].clone(), c))
                .collect(),
        })
    }

    /// Mean vector of the in-vocabulary, non-stopword tokens.
    pub fn sentence_embedding(&self, tokens: &[String], stopwords: &Stopwords) -> Result<Vec<f64>> {
        let mut sum = vec![0.0; self.dim];
        let mut n = 0usize;
        for t in tokens {
            if stopwords.contains(t) {
                continue;
            }
            if let Some(v) = self.vector(t) {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
                n += 1;
            }
        }
        if n == 0 {
            return Err(Error::Unembeddable(format!(
                "no in-vocabulary content word in `{}`",
                tokens.join(" ")
            )));
        }
        sum.iter_mut().for_each(|s| *s /= n as f64);
        Ok(sum)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Produces fixed-size vectors for token sequences (definitions, posts).
pub trait SentenceEmbedder: Sync {
    fn dim(&self) -> usize;
    fn embed(&self, tokens: &[String]) -> Result<Vec<f64>>;
}

/// Mean-of-word-vectors embedder over a space, skipping stopwords.
#[derive(Debug, Clone, Copy)]
pub struct BagOfVectors<'a> {
    pub space: &'a EmbeddingSpace,
    pub stopwords: &'a Stopwords,
}

impl SentenceEmbedder for BagOfVectors<'_> {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn embed(&self, tokens: &[String]) -> Result<Vec<f64>> {
        self.space.sentence_embedding(tokens, self.stopwords)
    }
}

/// Externally computed sentence vectors, stored in the vector-file format with the
/// sentence's tokens joined by `_` as the key.
#[derive(Debug, Clone)]
pub struct PrecomputedEmbeddings {
    space: EmbeddingSpace,
}

impl PrecomputedEmbeddings {
    pub fn new(space: EmbeddingSpace) -> Self {
        PrecomputedEmbeddings { space }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        EmbeddingSpace::load(path).map(Self::new)
    }

    pub fn key(tokens: &[String]) -> String {
        tokens.join("_")
    }
}

impl SentenceEmbedder for PrecomputedEmbeddings {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn embed(&self, tokens: &[String]) -> Result<Vec<f64>> {
        let key = Self::key(tokens);
        self.space
            .vector(&key)
            .map(<[f64]>::to_vec)
            .ok_or(Error::Unembeddable(key))
    }
}
