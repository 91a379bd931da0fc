//! The `figlex` command line: `prepare`, `analyze` and `report` over a run config.
//!
//! Every output is a pure function of the inputs, the config and the seed. Seeds for
//! the individual randomized steps are derived from the master seed, one stream per
//! step.

mod analyze;
mod config;
mod prepare;
mod report;

use std::fmt::Display;
use std::fs;
use std::path::Path;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use crate::corpus::Corpus;
use crate::lexicon::Lexicon;
use crate::matcher::Matcher;
use crate::stats::derive_seed;

pub use analyze::cmd_analyze;
pub use config::{RunArgs, RunConfig};
pub use prepare::cmd_prepare;
pub use report::{cmd_report, flatten_json, REPORT_SCHEMA};

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "FIGLEX_THREADS";

/// Output of `prepare`, input of `analyze`.
pub const FILTERED_LEXICON: &str = "lexicon.filtered.jsonl";
pub const COMBINED_SPACE: &str = "combined.vec";

const STREAM_BALANCE: u64 = 1;
const STREAM_COMBINED: u64 = 2;
const STREAM_GROUP_SPACE: u64 = 3;
const STREAM_DIVERGENCE: u64 = 4;
const STREAM_BASELINE: u64 = 5;

#[derive(Debug, Parser)]
#[command(name = "figlex", version, about = "Contrast idiom usage between two author groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand, count, prune and literality-filter the lexicon; train the combined space
    Prepare(RunArgs),
    /// Divergence, group scores, VAD comparison and cross-space neighbourhoods
    Analyze(RunArgs),
    /// Consolidate the analysis outputs into one document
    Report {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Runs one subcommand.
pub fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Prepare(args) => cmd_prepare(&RunConfig::resolve(args).context("stage `config`")?),
        Command::Analyze(args) => cmd_analyze(&RunConfig::resolve(args).context("stage `config`")?),
        Command::Report { run, format } => {
            cmd_report(&RunConfig::resolve(run).context("stage `config`")?, *format)
        }
    }
}

/// Sizes the global thread pool from [`THREADS_ENV`], if set.
pub fn init_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_ENV} must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}

/// Tags an error with the pipeline stage it came from.
fn stage<T, E: Display + Send + Sync + 'static>(
    name: &'static str,
    r: Result<T, E>,
) -> anyhow::Result<T> {
    r.map_err(|e| anyhow::anyhow!("{e:#}")).with_context(|| format!("stage `{name}`"))
}

/// Loads the corpus named in the config and balances it.
fn balanced_corpus(cfg: &RunConfig) -> anyhow::Result<Corpus> {
    let path = cfg.require(&cfg.corpus, "corpus")?;
    let corpus = Corpus::load(path, &cfg.groups)?;
    Ok(corpus.balance_groups(derive_seed(cfg.seed, STREAM_BALANCE, 0))?)
}

fn matcher_for(lexicon: &Lexicon) -> anyhow::Result<Matcher> {
    Ok(Matcher::build(lexicon)?)
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(path, &s)
}

/// File name of a path, for metadata that must not depend on where a run lives.
fn file_name(path: &Option<std::path::PathBuf>) -> Option<String> {
    path.as_ref()
        .and_then(|p| p.file_name())
        .map(|n| n.to_string_lossy().into_owned())
}
