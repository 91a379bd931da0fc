use std::fs;

use anyhow::Context;

use super::{
    balanced_corpus, file_name, matcher_for, stage, write_json, RunConfig, COMBINED_SPACE,
    FILTERED_LEXICON, STREAM_COMBINED,
};
use crate::embeddings::train_sgns;
use crate::lexicon::Lexicon;
use crate::matcher::write_csv;
use crate::stats::derive_seed;
use crate::stopwords::Stopwords;

/// load, balance, expand, count, prune, train the combined space, filter by
/// literality; then write everything at once.
///
/// Inputs are checked before any file is written, and nothing is written unless
/// every stage succeeds.
pub fn cmd_prepare(cfg: &RunConfig) -> anyhow::Result<()> {
    let (corpus, lexicon) = stage("load", (|| {
        let lexicon_path = cfg.require(&cfg.lexicon, "lexicon")?;
        let corpus = balanced_corpus(cfg)?;
        let lexicon = Lexicon::load(lexicon_path)?;
        anyhow::Ok((corpus, lexicon))
    })())?;

    let expanded = stage("expand", lexicon.expanded())?;
    let matcher = stage("match", matcher_for(&expanded))?;
    let counts = matcher.count_usages(&corpus);

    let pruned = expanded.prune_variants(&counts, cfg.min_count);
    let matcher = stage("prune", matcher_for(&pruned))?;

    let params = cfg.train_params(derive_seed(cfg.seed, STREAM_COMBINED, 0));
    let space = stage("embed", train_sgns(&corpus, &matcher, &params))?;

    let (filtered, literality) = stage(
        "literality",
        pruned.filter_literal(&space, Stopwords::builtin(), cfg.literality_threshold),
    )?;
    let final_counts = stage("match", matcher_for(&filtered))?.count_usages(&corpus);

    stage("write", (|| {
        let out = &cfg.out;
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        filtered.save(out.join(FILTERED_LEXICON))?;
        final_counts.write_idiom_csv(out.join("counts.idioms.csv"))?;
        final_counts.write_token_csv(out.join("counts.tokens.csv"))?;
        space.save(out.join(COMBINED_SPACE))?;

        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["canonical", "literality", "kept", "note"])?;
        for row in &literality {
            w.write_record([
                row.canonical.clone(),
                row.literality.map(|x| x.to_string()).unwrap_or_default(),
                row.kept.to_string(),
                row.note.unwrap_or_default().to_string(),
            ])?;
        }
        write_csv(&out.join("literality.csv"), w)?;

        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["canonical", "surface", "count", "kept"])?;
        for e in expanded.entries() {
            let kept = pruned.get(&e.key()).expect("pruning keeps entries");
            for sf in e.variants.values() {
                let n = counts.surface_total(&sf.tokens);
                w.write_record([
                    e.key(),
                    sf.text(),
                    n.to_string(),
                    kept.variants.contains_key(&sf.tokens).to_string(),
                ])?;
            }
        }
        write_csv(&out.join("variants.csv"), w)?;

        let totals = corpus.totals();
        write_json(
            &out.join("prepare.json"),
            &serde_json::json!({
                "corpus": file_name(&cfg.corpus),
                "lexicon": file_name(&cfg.lexicon),
                "groups": cfg.groups.as_array(),
                "seed": cfg.seed,
                "embedding_seed": params.seed,
                "balanced_posts": totals.posts,
                "balanced_tokens": totals.tokens,
                "entries": lexicon.len(),
                "variants_expanded": expanded.variant_count(),
                "variants_kept": pruned.variant_count(),
                "entries_kept": filtered.len(),
                "min_count": cfg.min_count,
                "literality_threshold": cfg.literality_threshold,
                "vocabulary": space.len(),
                "dim": space.dim(),
            }),
        )?;
        anyhow::Ok(())
    })())
}
