use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::Serialize;
use serde_json::json;

use super::{
    balanced_corpus, file_name, matcher_for, stage, write_json, write_text, RunConfig,
    COMBINED_SPACE, FILTERED_LEXICON, STREAM_BASELINE, STREAM_DIVERGENCE, STREAM_GROUP_SPACE,
};
use crate::affect::{
    compare_vad, fit_vad_models, literal_baseline, literal_candidate_counts, score_definitions,
    usage_vad_series, VadLexicon,
};
use crate::corpus::Corpus;
use crate::embeddings::{
    train_sgns, BagOfVectors, EmbeddingSpace, PrecomputedEmbeddings, SentenceEmbedder,
};
use crate::lexicon::Lexicon;
use crate::matcher::{write_csv, GroupCounts, Matcher};
use crate::stats::{
    derive_seed, divergence_gap_test, gscore_definition, gscore_surface, kde, log_odds_dirichlet,
    sim_rbo, spearman, GScoreTable, TestResult,
};
use crate::stopwords::Stopwords;
use crate::Error;

struct Inputs {
    corpus: Corpus,
    lexicon: Lexicon,
    matcher: Matcher,
    counts: GroupCounts,
    space: EmbeddingSpace,
}

type Stage<'a> = dyn Fn(&mut Notes) -> anyhow::Result<()> + 'a;

/// What the stages add to `metadata.json`.
#[derive(Default)]
struct Notes {
    baseline_n_used: Option<usize>,
    rbo_skipped: Vec<String>,
}

/// Runs every analysis stage over the `prepare` outputs in the output directory.
///
/// A failing stage leaves a `<stage>.FAILED` file holding its error; the other
/// stages still run and their outputs are kept. The command fails if any stage did.
pub fn cmd_analyze(cfg: &RunConfig) -> anyhow::Result<()> {
    let out = &cfg.out;
    let inputs = match load(cfg) {
        Ok(i) => i,
        Err(e) => {
            if out.is_dir() {
                let _ = fs::write(out.join("load.FAILED"), format!("{e:#}\n"));
            }
            return Err(e).context("stage `load`");
        }
    };
    for entry in fs::read_dir(out).with_context(|| format!("reading {}", out.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "FAILED") {
            fs::remove_file(&path)?;
        }
    }

    let mut notes = Notes::default();
    let mut failed: Vec<(&str, anyhow::Error)> = Vec::new();
    let stages: [(&str, &Stage<'_>); 4] = [
        ("divergence", &|_| divergence(cfg, &inputs)),
        ("gscore", &|_| gscores(cfg, &inputs)),
        ("vad", &|n| vad(cfg, &inputs, n)),
        ("spaces", &|n| spaces(cfg, &inputs, n)),
    ];
    let mut status = BTreeMap::new();
    for (name, f) in stages {
        match f(&mut notes) {
            Ok(()) => {
                status.insert(name, "ok");
            }
            Err(e) => {
                write_text(&out.join(format!("{name}.FAILED")), &format!("{e:#}\n"))?;
                status.insert(name, "failed");
                failed.push((name, e));
            }
        }
    }

    let totals = inputs.corpus.totals();
    write_json(
        &out.join("metadata.json"),
        &json!({
            "version": env!("CARGO_PKG_VERSION"),
            "inputs": {
                "corpus": file_name(&cfg.corpus),
                "vad_lexicon": file_name(&cfg.vad_lexicon),
                "definition_vectors": file_name(&cfg.definition_vectors),
            },
            "groups": cfg.groups.as_array(),
            "seed": cfg.seed,
            "seeds": {
                "divergence": derive_seed(cfg.seed, STREAM_DIVERGENCE, 0),
                "literal_baseline": derive_seed(cfg.seed, STREAM_BASELINE, 0),
                "group_spaces": ([0u64, 1].map(|g| derive_seed(cfg.seed, STREAM_GROUP_SPACE, g))),
            },
            "thresholds": {
                "min_count": cfg.min_count,
                "literality_threshold": cfg.literality_threshold,
                "rbo_depth": cfg.rbo_depth,
                "n_splits": cfg.n_splits,
            },
            "train": {
                "dim": cfg.train.dim,
                "window": cfg.train.window,
                "negatives": cfg.train.negatives,
                "min_count": cfg.train.min_count,
                "epochs": cfg.train.epochs,
                "initial_lr": cfg.train.initial_lr,
            },
            "jsd_log_base": 2,
            "log_odds_log": "natural",
            "divergence_p": "empirical (r + 1) / (n_splits + 1), larger of the two groups; z and p_normal from a normal fit to the pooled baseline",
            "sentence_embedder": if cfg.definition_vectors.is_some() { "precomputed" } else { "bag-of-vectors" },
            "vad_regularization": "none",
            "balanced_posts": totals.posts,
            "balanced_tokens": totals.tokens,
            "idioms": inputs.lexicon.len(),
            "idiom_instances": inputs.counts.idiom_totals(),
            "baseline_n_requested": cfg.baseline_n,
            "baseline_n_used": notes.baseline_n_used,
            "rbo_skipped": notes.rbo_skipped,
            "stages": status,
        }),
    )?;

    if failed.is_empty() {
        return Ok(());
    }
    let summary: Vec<String> = failed
        .iter()
        .map(|(name, e)| format!("stage `{name}`: {e:#}"))
        .collect();
    Err(anyhow!(summary.join("; ")))
}

fn load(cfg: &RunConfig) -> anyhow::Result<Inputs> {
    let out = &cfg.out;
    let lexicon_path = out.join(FILTERED_LEXICON);
    let space_path = out.join(COMBINED_SPACE);
    for p in [&lexicon_path, &space_path] {
        if !p.is_file() {
            bail!("{} is missing; run `figlex prepare` first", p.display());
        }
    }
    let corpus = balanced_corpus(cfg)?;
    let lexicon = Lexicon::load(&lexicon_path)?;
    let matcher = matcher_for(&lexicon)?;
    let counts = matcher.count_usages(&corpus);
    let space = EmbeddingSpace::load(&space_path)?;
    Ok(Inputs {
        corpus,
        lexicon,
        matcher,
        counts,
        space,
    })
}

fn divergence(cfg: &RunConfig, inputs: &Inputs) -> anyhow::Result<()> {
    let report = divergence_gap_test(
        &inputs.corpus,
        &inputs.matcher,
        cfg.n_splits,
        derive_seed(cfg.seed, STREAM_DIVERGENCE, 0),
    )?;
    write_json(&cfg.out.join("divergence.json"), &report)
}

fn as_f64(counts: HashMap<String, u64>) -> HashMap<String, f64> {
    counts.into_iter().map(|(t, c)| (t, c as f64)).collect()
}

/// Idiom- and word-level group scores with the combined corpus as the prior.
fn gscore_table(counts: &GroupCounts) -> anyhow::Result<GScoreTable> {
    Ok(log_odds_dirichlet(
        &as_f64(counts.group_token_counts(0)),
        &as_f64(counts.group_token_counts(1)),
        &as_f64(counts.combined_token_counts()),
    )?)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn gscores(cfg: &RunConfig, inputs: &Inputs) -> anyhow::Result<()> {
    let table = gscore_table(&inputs.counts)?;
    table.write_csv(cfg.out.join("gscore.tokens.csv"))?;

    let [a, b] = cfg.groups.as_array();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "canonical".to_string(),
        "gscore".into(),
        "gscore_surface".into(),
        "gscore_definition".into(),
        format!("count_{a}"),
        format!("count_{b}"),
    ])?;
    let mut triples = Vec::new();
    for e in inputs.lexicon.entries() {
        let key = e.key();
        let g = table.score(&e.idiom_token());
        let s = gscore_surface(e, &table).ok();
        let d = gscore_definition(e, &table).ok();
        let n = inputs.counts.idiom_count(&key).unwrap_or([0, 0]);
        w.write_record([key, opt(g), opt(s), opt(d), n[0].to_string(), n[1].to_string()])?;
        if let (Some(g), Some(s), Some(d)) = (g, s, d) {
            triples.push((g, s, d));
        }
    }
    write_csv(&cfg.out.join("idioms.csv"), w)?;

    /// A correlation is null when undefined, e.g. when every score is equal.
    #[derive(Serialize)]
    struct Correlations {
        n_idioms: usize,
        gscore_vs_surface: Option<TestResult>,
        gscore_vs_definition: Option<TestResult>,
        notes: Vec<String>,
    }
    let col = |f: fn(&(f64, f64, f64)) -> f64| triples.iter().map(f).collect::<Vec<_>>();
    let (g, s, d) = (col(|t| t.0), col(|t| t.1), col(|t| t.2));
    let mut notes = Vec::new();
    let mut correlate = |other: &[f64], what: &str| match spearman(&g, other) {
        Ok(r) => Ok(Some(r)),
        Err(e @ (Error::InvalidArgument(_) | Error::InsufficientData(_))) => {
            notes.push(format!("gScore vs {what}: {e}"));
            Ok(None)
        }
        Err(e) => Err(e),
    };
    let gscore_vs_surface = correlate(&s, "surface")?;
    let gscore_vs_definition = correlate(&d, "definition")?;
    let corr = Correlations {
        n_idioms: triples.len(),
        gscore_vs_surface,
        gscore_vs_definition,
        notes,
    };
    write_json(&cfg.out.join("spearman.json"), &corr)
}

fn vad(cfg: &RunConfig, inputs: &Inputs, notes: &mut Notes) -> anyhow::Result<()> {
    let out = &cfg.out;
    let vad_path = cfg.require(&cfg.vad_lexicon, "vad_lexicon")?;
    let vad_lexicon = VadLexicon::load(vad_path)?;
    let precomputed = match &cfg.definition_vectors {
        Some(p) => Some(PrecomputedEmbeddings::load(p)?),
        None => None,
    };
    let bag = BagOfVectors {
        space: &inputs.space,
        stopwords: Stopwords::builtin(),
    };
    let embedder: &dyn SentenceEmbedder = match &precomputed {
        Some(p) => p,
        None => &bag,
    };

    let models = fit_vad_models(&vad_lexicon, embedder)?;
    models.save(out.join("vad_models.json"))?;
    let scores = score_definitions(&inputs.lexicon, embedder, &models)?;
    scores.write_csv(out.join("vad_scores.csv"))?;

    let [a, b] = cfg.groups.as_array();
    let series_a = usage_vad_series(&inputs.counts, &scores, a)?;
    let series_b = usage_vad_series(&inputs.counts, &scores, b)?;
    compare_vad(&series_a, &series_b)?.write_csv(out.join("vad_comparison.csv"))?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["group", "x", "density"])?;
    for s in [&series_a[2], &series_b[2]] {
        let curve = kde(&s.values, None).with_context(|| format!("dominance KDE of {}", s.group))?;
        for (x, y) in curve.points {
            w.write_record([s.group.clone(), x.to_string(), y.to_string()])?;
        }
    }
    write_csv(&out.join("kde_dominance.csv"), w)?;

    let available = literal_candidate_counts(&inputs.corpus, &inputs.matcher, embedder);
    let n = cfg.baseline_n.min(available[0]).min(available[1]);
    notes.baseline_n_used = Some(n);
    let baseline = literal_baseline(
        &inputs.corpus,
        &inputs.matcher,
        embedder,
        &models,
        n,
        derive_seed(cfg.seed, STREAM_BASELINE, 0),
    )?;
    baseline.write_csv(out.join("literal_baseline.csv"))?;
    let [la, lb] = &baseline.series;
    compare_vad(la, lb)?.write_csv(out.join("literal_comparison.csv"))?;
    Ok(())
}

fn spaces(cfg: &RunConfig, inputs: &Inputs, notes: &mut Notes) -> anyhow::Result<()> {
    let out = &cfg.out;
    let mut spaces = Vec::with_capacity(2);
    for g in 0..2 {
        let label = cfg.groups.label(g);
        let params = cfg.train_params(derive_seed(cfg.seed, STREAM_GROUP_SPACE, g as u64));
        let sub = inputs.corpus.restrict_to(g);
        let space = stage("spaces", train_sgns(&sub, &inputs.matcher, &params))
            .with_context(|| format!("training the {label} space"))?;
        space.save(out.join(format!("space.{label}.vec")))?;
        spaces.push(space);
    }

    let depth = cfg.rbo_depth;
    let mut neighbors = csv::Writer::from_writer(Vec::new());
    neighbors.write_record(["canonical", "group", "rank", "neighbor", "cosine"])?;
    let mut scores = Vec::new();
    for e in inputs.lexicon.entries() {
        let token = e.idiom_token();
        let usable = spaces
            .iter()
            .all(|s| s.contains(&token) && s.len() > depth);
        if !usable {
            notes.rbo_skipped.push(e.key());
            continue;
        }
        let lists = spaces
            .iter()
            .map(|s| s.nearest_neighbors(&token, depth))
            .collect::<crate::Result<Vec<_>>>()?;
        for (g, list) in lists.iter().enumerate() {
            for (rank, (t, c)) in list.neighbors.iter().enumerate() {
                neighbors.write_record([
                    e.key(),
                    cfg.groups.label(g).to_string(),
                    (rank + 1).to_string(),
                    t.clone(),
                    c.to_string(),
                ])?;
            }
        }
        scores.push((e.key(), sim_rbo(&lists[0].tokens(), &lists[1].tokens(), depth)?));
    }
    write_csv(&out.join("neighbors.csv"), neighbors)?;

    scores.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["canonical", "sim_rbo"])?;
    for (c, s) in &scores {
        w.write_record([c.clone(), s.to_string()])?;
    }
    write_csv(&out.join("rbo.csv"), w)?;
    if scores.is_empty() {
        bail!("no idiom is in both group spaces with {depth} neighbours");
    }
    Ok(())
}

/// True when `dir` holds every file `analyze` writes on success.
pub(crate) fn analysis_complete(dir: &Path, labels: &[String; 2]) -> bool {
    let mut files = vec![
        "divergence.json".to_string(),
        "gscore.tokens.csv".into(),
        "idioms.csv".into(),
        "spearman.json".into(),
        "vad_models.json".into(),
        "vad_scores.csv".into(),
        "vad_comparison.csv".into(),
        "kde_dominance.csv".into(),
        "literal_baseline.csv".into(),
        "literal_comparison.csv".into(),
        "neighbors.csv".into(),
        "rbo.csv".into(),
        "metadata.json".into(),
    ];
    files.extend(labels.iter().map(|l| format!("space.{l}.vec")));
    files.iter().all(|f| dir.join(f).is_file())
}
