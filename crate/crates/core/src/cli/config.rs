//! Line-oriented `key = value` run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::Args;
use serde::Serialize;

use crate::corpus::GroupLabels;
use crate::embeddings::TrainParams;

/// Command-line overrides; each flag shadows the config key of the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Config file of `key = value` lines
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Corpus file, one JSON post per line
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Idiom lexicon, one JSON entry per line
    #[arg(long, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,
    /// Word-level VAD ratings (CSV: word,valence,arousal,dominance)
    #[arg(long, value_name = "FILE")]
    pub vad_lexicon: Option<PathBuf>,
    /// Precomputed sentence vectors used instead of bag-of-vectors embeddings
    #[arg(long, value_name = "FILE")]
    pub definition_vectors: Option<PathBuf>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// The two group labels, comma separated; scores are positive for the first
    #[arg(long, value_name = "A,B")]
    pub groups: Option<String>,
    /// Variants seen at most this often are pruned
    #[arg(long)]
    pub min_count: Option<u64>,
    /// Idioms scoring above this literality are dropped
    #[arg(long)]
    pub literality_threshold: Option<f64>,
    /// Neighbour-list depth for the cross-space comparison
    #[arg(long)]
    pub rbo_depth: Option<usize>,
    /// Random splits per group in the divergence baseline
    #[arg(long)]
    pub n_splits: Option<usize>,
    /// Embedding dimensionality
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub negatives: Option<usize>,
    /// Minimum token frequency for the embedding vocabulary
    #[arg(long)]
    pub embed_min_count: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub initial_lr: Option<f64>,
    /// Idiom-free posts sampled per group for the literal baseline
    #[arg(long)]
    pub baseline_n: Option<usize>,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub vad_lexicon: Option<PathBuf>,
    pub definition_vectors: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    #[serde(serialize_with = "ser_labels")]
    pub groups: GroupLabels,
    pub min_count: u64,
    pub literality_threshold: f64,
    pub rbo_depth: usize,
    pub n_splits: usize,
    #[serde(serialize_with = "ser_train")]
    pub train: TrainParams,
    pub baseline_n: usize,
}

fn ser_labels<S: serde::Serializer>(g: &GroupLabels, s: S) -> Result<S::Ok, S::Error> {
    g.as_array().serialize(s)
}

fn ser_train<S: serde::Serializer>(t: &TrainParams, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct T {
        dim: usize,
        window: usize,
        negatives: usize,
        min_count: u64,
        epochs: usize,
        initial_lr: f64,
    }
    T {
        dim: t.dim,
        window: t.window,
        negatives: t.negatives,
        min_count: t.min_count,
        epochs: t.epochs,
        initial_lr: t.initial_lr,
    }
    .serialize(s)
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: None,
            lexicon: None,
            vad_lexicon: None,
            definition_vectors: None,
            out: PathBuf::from("figlex-out"),
            seed: 1,
            groups: GroupLabels::default(),
            min_count: 50,
            literality_threshold: 0.25,
            rbo_depth: 100,
            n_splits: 500,
            train: TrainParams::default(),
            baseline_n: 1000,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> anyhow::Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("bad value `{value}` for `{key}`: {e}"))
}

impl RunConfig {
    /// Applies one `key = value` setting. Keys may use `-` or `_`.
    fn set(&mut self, key: &str, value: &str, base: &Path) -> anyhow::Result<()> {
        let path = || base.join(value);
        match key.replace('-', "_").as_str() {
            "corpus" => self.corpus = Some(path()),
            "lexicon" => self.lexicon = Some(path()),
            "vad_lexicon" => self.vad_lexicon = Some(path()),
            "definition_vectors" => self.definition_vectors = Some(path()),
            "out" => self.out = path(),
            "seed" => self.seed = parse_value(key, value)?,
            "groups" => self.groups = GroupLabels::parse(value)?,
            "min_count" => self.min_count = parse_value(key, value)?,
            "literality_threshold" => self.literality_threshold = parse_value(key, value)?,
            "rbo_depth" => self.rbo_depth = parse_value(key, value)?,
            "n_splits" => self.n_splits = parse_value(key, value)?,
            "dim" => self.train.dim = parse_value(key, value)?,
            "window" => self.train.window = parse_value(key, value)?,
            "negatives" => self.train.negatives = parse_value(key, value)?,
            "embed_min_count" => self.train.min_count = parse_value(key, value)?,
            "epochs" => self.train.epochs = parse_value(key, value)?,
            "initial_lr" => self.train.initial_lr = parse_value(key, value)?,
            "baseline_n" => self.baseline_n = parse_value(key, value)?,
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    /// Parses config text. Blank lines and `#` comments are skipped; relative paths
    /// are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> anyhow::Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", i + 1))?;
            cfg.set(key.trim(), value.trim(), base)
                .with_context(|| format!("line {}", i + 1))?;
        }
        Ok(cfg)
    }

    /// Reads `--config` if given, then applies the flags on top.
    pub fn resolve(args: &RunArgs) -> anyhow::Result<Self> {
        let mut cfg = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                let base = path.parent().unwrap_or(Path::new(""));
                RunConfig::parse(&text, base)
                    .with_context(|| format!("in config {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        macro_rules! over {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = &args.$field { $target = v.clone().into(); })*
            };
        }
        over! {
            corpus => cfg.corpus,
            lexicon => cfg.lexicon,
            vad_lexicon => cfg.vad_lexicon,
            definition_vectors => cfg.definition_vectors,
            out => cfg.out,
            seed => cfg.seed,
            min_count => cfg.min_count,
            literality_threshold => cfg.literality_threshold,
            rbo_depth => cfg.rbo_depth,
            n_splits => cfg.n_splits,
            dim => cfg.train.dim,
            window => cfg.train.window,
            negatives => cfg.train.negatives,
            embed_min_count => cfg.train.min_count,
            epochs => cfg.train.epochs,
            initial_lr => cfg.train.initial_lr,
            baseline_n => cfg.baseline_n,
        }
        if let Some(g) = &args.groups {
            cfg.groups = GroupLabels::parse(g)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.literality_threshold > 0.0 && self.literality_threshold.is_finite()) {
            bail!("literality_threshold must be positive");
        }
        if self.rbo_depth == 0 {
            bail!("rbo_depth must be positive");
        }
        if self.n_splits < 2 {
            bail!("n_splits must be at least 2");
        }
        self.train.validate()?;
        Ok(())
    }

    /// Training parameters with the seed replaced.
    pub fn train_params(&self, seed: u64) -> TrainParams {
        TrainParams {
            seed,
            ..self.train.clone()
        }
    }

    pub fn require<'a>(&self, path: &'a Option<PathBuf>, key: &str) -> anyhow::Result<&'a Path> {
        let p = path
            .as_deref()
            .ok_or_else(|| anyhow!("no `{key}` given (config key or --{})", key.replace('_', "-")))?;
        if !p.is_file() {
            bail!("{key} file {} does not exist", p.display());
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_resolves_paths() {
        let text = "# comment\ncorpus = data/c.jsonl\n\nmin-count = 7\nseed=3\ngroups = M,F\ndim = 8\n";
        let cfg = RunConfig::parse(text, Path::new("/base")).unwrap();
        assert_eq!(cfg.corpus.as_deref(), Some(Path::new("/base/data/c.jsonl")));
        assert_eq!(cfg.min_count, 7);
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.groups.label(0), "M");
        assert_eq!(cfg.train.dim, 8);
        assert_eq!(cfg.literality_threshold, 0.25);
        assert_eq!(cfg.rbo_depth, 100);
        assert_eq!(cfg.n_splits, 500);
    }

    #[test]
    fn rejects_bad_lines() {
        let base = Path::new(".");
        assert!(RunConfig::parse("nonsense", base).is_err());
        assert!(RunConfig::parse("colour = red", base).is_err());
        assert!(RunConfig::parse("seed = x", base).is_err());
        let err = RunConfig::parse("seed = 1\nn_splits = -3", base).unwrap_err();
        assert!(format!("{err:#}").contains("line 2"));
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "seed = 3\nrbo_depth = 40\nout = o\n").unwrap();
        let args = RunArgs {
            config: Some(path),
            seed: Some(9),
            ..RunArgs::default()
        };
        let cfg = RunConfig::resolve(&args).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.rbo_depth, 40);
        assert_eq!(cfg.out, dir.path().join("o"));
        let bad = RunArgs { n_splits: Some(1), ..RunArgs::default() };
        assert!(RunConfig::resolve(&bad).is_err());
    }
}
