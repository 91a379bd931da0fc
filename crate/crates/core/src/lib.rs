#![warn(missing_debug_implementations, rust_2018_idioms)]
//! Contrastive statistics for idiomatic-language usage across two author groups.
//!
//! The crate covers the whole quantitative pipeline:
//!
//! - [`corpus`]: group-labelled posts, tokenization, balancing and random halves
//! - [`lexicon`]: idiom entries, variant expansion, frequency pruning, literality filtering
//! - [`matcher`]: leftmost-longest idiom matching, group counts, idiom-token rewriting
//! - [`embeddings`]: skip-gram negative-sampling training, vector files, neighbour lists
//! - [`stats`]: log-odds with a Dirichlet prior, JSD and its split baseline, rank tests,
//!   Cohen's d, rank-biased overlap, kernel density estimates
//! - [`affect`]: beta-regression valence/arousal/dominance induction and group comparison
//! - [`cli`]: the `prepare` / `analyze` / `report` pipeline behind the `figlex` binary

pub mod affect;
pub mod cli;
pub mod corpus;
pub mod embeddings;
mod error;
pub mod lexicon;
pub mod matcher;
pub mod stats;
pub mod stopwords;
pub mod synth;

pub use error::{Error, Result};
