//! Valence/arousal/dominance induction and group comparison.
//!
//! Three beta-regression models map sentence embeddings to VAD ratings. They are
//! fitted on a word-level VAD lexicon, applied to idiom definitions, and the
//! resulting scores are repeated by usage count to build per-group series.

mod beta;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Post};
use crate::embeddings::SentenceEmbedder;
use crate::lexicon::Lexicon;
use crate::matcher::{write_csv, GroupCounts, Matcher};
use crate::stats::{cohens_d, derive_seed, mean, wilcoxon_ranksum};
use crate::{Error, Result};

pub use beta::{
    fit_beta_regression, sigmoid, BetaData, BetaFit, GRADIENT_TOLERANCE, MAX_ITERATIONS,
    MAX_PRECISION, TARGET_EPS,
};

/// One of the three affect dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VadDimension {
    Valence,
    Arousal,
    Dominance,
}

impl VadDimension {
    pub const ALL: [VadDimension; 3] = [Self::Valence, Self::Arousal, Self::Dominance];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Single-letter label: V, A or D.
    pub fn short(self) -> &'static str {
        ["V", "A", "D"][self.index()]
    }
}

impl fmt::Display for VadDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Valence => "valence",
            Self::Arousal => "arousal",
            Self::Dominance => "dominance",
        })
    }
}

/// Word-level VAD ratings on a 0-1 scale.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VadLexicon {
    entries: BTreeMap<String, [f64; 3]>,
}

#[derive(Deserialize)]
struct VadRow {
    word: String,
    valence: f64,
    arousal: f64,
    dominance: f64,
}

impl VadLexicon {
    pub fn from_entries(entries: impl IntoIterator<Item = (String, [f64; 3])>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (word, vad) in entries {
            if let Some(bad) = vad.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::InvalidArgument(format!(
                    "rating {bad} for `{word}` is outside [0, 1]"
                )));
            }
            if map.insert(word.clone(), vad).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate word `{word}`")));
            }
        }
        Ok(VadLexicon { entries: map })
    }

    /// Reads a CSV with a `word,valence,arousal,dominance` header.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::io(path, io),
                other => Error::parse(path, 1, format!("{other:?}")),
            })?;
        let mut entries = BTreeMap::new();
        for (i, row) in reader.deserialize::<VadRow>().enumerate() {
            // header is line 1
            let line = i + 2;
            let row = row.map_err(|e| Error::parse(path, line, e.to_string()))?;
            let vad = [row.valence, row.arousal, row.dominance];
            if vad.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::parse(path, line, "ratings must lie in [0, 1]"));
            }
            let word = row.word.to_lowercase();
            if entries.insert(word.clone(), vad).is_some() {
                return Err(Error::parse(path, line, format!("duplicate word `{word}`")));
            }
        }
        Ok(VadLexicon { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<[f64; 3]> {
        self.entries.get(word).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, [f64; 3])> + '_ {
        self.entries.iter().map(|(w, v)| (w.as_str(), *v))
    }
}

/// Fitting details kept alongside a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub feature_dim: usize,
    pub training_rows: usize,
    pub regularization: String,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub log_likelihood: f64,
}

/// A fitted beta regression for one dimension, logit mean link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VadModel {
    pub dimension: VadDimension,
    /// Intercept first.
    pub coefficients: Vec<f64>,
    pub precision: f64,
    pub link: String,
    pub metadata: ModelMetadata,
}

/// Smallest distance kept between a prediction and 0 or 1.
const PREDICTION_EPS: f64 = 1e-15;

impl VadModel {
    pub fn from_fit(dimension: VadDimension, fit: &BetaFit, training_rows: usize) -> Self {
        VadModel {
            dimension,
            coefficients: fit.coefficients.clone(),
            precision: fit.precision,
            link: "logit".into(),
            metadata: ModelMetadata {
                feature_dim: fit.coefficients.len() - 1,
                training_rows,
                regularization: "none".into(),
                iterations: fit.iterations,
                gradient_norm: fit.gradient_norm,
                log_likelihood: fit.log_likelihood,
            },
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Linear predictor `b_0 + x . b`.
    pub fn linear_predictor(&self, feature: &[f64]) -> Result<f64> {
        if feature.len() != self.feature_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim(),
                actual: feature.len(),
            });
        }
        Ok(self.coefficients[0]
            + self.coefficients[1..]
                .iter()
                .zip(feature)
                .map(|(b, x)| b * x)
                .sum::<f64>())
    }
}

/// Predicted mean for one feature vector, strictly inside (0, 1).
pub fn predict_beta(model: &VadModel, feature: &[f64]) -> Result<f64> {
    let eta = model.linear_predictor(feature)?;
    Ok(sigmoid(eta).clamp(PREDICTION_EPS, 1.0 - PREDICTION_EPS))
}

/// Valence, arousal and dominance models, in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VadModels {
    pub models: [VadModel; 3],
}

impl VadModels {
    pub fn predict(&self, feature: &[f64]) -> Result<[f64; 3]> {
        Ok([
            predict_beta(&self.models[0], feature)?,
            predict_beta(&self.models[1], feature)?,
            predict_beta(&self.models[2], feature)?,
        ])
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let models: VadModels = serde_json::from_str(&raw)?;
        for (m, d) in models.models.iter().zip(VadDimension::ALL) {
            if m.dimension != d {
                return Err(Error::InvalidArgument(format!(
                    "expected the {d} model, found {}",
                    m.dimension
                )));
            }
            if !(m.precision > 0.0) || m.coefficients.iter().any(|b| !b.is_finite()) {
                return Err(Error::InvalidArgument(format!("malformed {d} model")));
            }
        }
        Ok(models)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = serde_json::to_string_pretty(self)?;
        out.push('\n');
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Fits the three models on the embeddings of the lexicon's words. Words the
/// embedder cannot represent are skipped.
pub fn fit_vad_models(vad: &VadLexicon, embedder: &dyn SentenceEmbedder) -> Result<VadModels> {
    let mut features = Vec::new();
    let mut targets: [Vec<f64>; 3] = Default::default();
    for (word, ratings) in vad.iter() {
        match embedder.embed(&[word.to_string()]) {
            Ok(x) => {
                features.push(x);
                for (t, r) in targets.iter_mut().zip(ratings) {
                    t.push(r);
                }
            }
            Err(Error::Unembeddable(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let rows = features.len();
    let fits: Vec<Result<VadModel>> = VadDimension::ALL
        .par_iter()
        .map(|&d| {
            fit_beta_regression(&features, &targets[d.index()])
                .map(|fit| VadModel::from_fit(d, &fit, rows))
        })
        .collect();
    let mut it = fits.into_iter();
    let mut next = || it.next().expect("three fits");
    Ok(VadModels {
        models: [next()?, next()?, next()?],
    })
}

/// Predicted (v, a, d) per canonical form.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VadScores {
    scores: BTreeMap<String, [f64; 3]>,
}

impl VadScores {
    pub fn from_map(scores: BTreeMap<String, [f64; 3]>) -> Self {
        VadScores { scores }
    }

    pub fn get(&self, canonical: &str) -> Option<[f64; 3]> {
        self.scores.get(canonical).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, [f64; 3])> + '_ {
        self.scores.iter().map(|(c, v)| (c.as_str(), *v))
    }

    /// Writes `canonical,valence,arousal,dominance` rows.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["canonical", "valence", "arousal", "dominance"])?;
        for (c, v) in &self.scores {
            w.write_record([c.clone(), v[0].to_string(), v[1].to_string(), v[2].to_string()])?;
        }
        write_csv(path.as_ref(), w)
    }
}

/// Scores every definition in the lexicon with the three models.
pub fn score_definitions(
    lexicon: &Lexicon,
    embedder: &dyn SentenceEmbedder,
    models: &VadModels,
) -> Result<VadScores> {
    let entries: Vec<_> = lexicon.entries().collect();
    let results: Vec<(String, Result<Vec<f64>>)> = entries
        .par_iter()
        .map(|e| (e.key(), embedder.embed(&e.definition)))
        .collect();
    let mut scores = BTreeMap::new();
    let mut missing = Vec::new();
    for (canonical, feature) in results {
        match feature {
            Ok(x) => {
                scores.insert(canonical, models.predict(&x)?);
            }
            Err(Error::Unembeddable(_)) => missing.push(canonical),
            Err(e) => return Err(e),
        }
    }
    if !missing.is_empty() {
        return Err(Error::Unembeddable(format!(
            "definitions of {}",
            missing.join(", ")
        )));
    }
    Ok(VadScores { scores })
}

/// Per-instance values for one dimension and group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UsageSeries {
    pub dimension: VadDimension,
    pub group: String,
    pub values: Vec<f64>,
}

/// Each idiom's score repeated once per usage by `group`, for all three dimensions.
pub fn usage_vad_series(
    counts: &GroupCounts,
    scores: &VadScores,
    group: &str,
) -> Result<[UsageSeries; 3]> {
    let g = counts.labels().require(group)?;
    let mut values: [Vec<f64>; 3] = Default::default();
    for (canonical, n) in counts.idiom_counts() {
        let n = n[g] as usize;
        if n == 0 {
            continue;
        }
        let vad = scores.get(canonical).ok_or_else(|| {
            Error::InvalidArgument(format!("no VAD scores for `{canonical}`"))
        })?;
        for (series, v) in values.iter_mut().zip(vad) {
            series.extend(std::iter::repeat_n(v, n));
        }
    }
    let [v, a, d] = values;
    let series = |dimension, values| UsageSeries {
        dimension,
        group: group.to_string(),
        values,
    };
    Ok([
        series(VadDimension::Valence, v),
        series(VadDimension::Arousal, a),
        series(VadDimension::Dominance, d),
    ])
}

/// One row of the group comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VadComparisonRow {
    pub dimension: VadDimension,
    pub mean_a: f64,
    pub mean_b: f64,
    /// `None` when both series are constant.
    pub cohens_d: Option<f64>,
    pub p_value: f64,
    pub statistic: f64,
    pub n_a: usize,
    pub n_b: usize,
}

impl VadComparisonRow {
    /// `**` below 0.001, `*` below 0.01.
    pub fn stars(&self) -> &'static str {
        if self.p_value < 0.001 {
            "**"
        } else if self.p_value < 0.01 {
            "*"
        } else {
            ""
        }
    }
}

/// Group comparison per dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VadComparison {
    pub groups: [String; 2],
    pub rows: Vec<VadComparisonRow>,
}

impl VadComparison {
    /// Columns: dimension, mean per group, Cohen's d, rank-sum statistic, p, stars,
    /// sample sizes.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let [a, b] = &self.groups;
        w.write_record([
            "dimension".to_string(),
            format!("mean_{a}"),
            format!("mean_{b}"),
            "cohens_d".into(),
            "ranksum_w".into(),
            "p_value".into(),
            "significance".into(),
            format!("n_{a}"),
            format!("n_{b}"),
        ])?;
        for r in &self.rows {
            w.write_record([
                r.dimension.short().to_string(),
                r.mean_a.to_string(),
                r.mean_b.to_string(),
                r.cohens_d.map(|d| d.to_string()).unwrap_or_default(),
                r.statistic.to_string(),
                r.p_value.to_string(),
                r.stars().to_string(),
                r.n_a.to_string(),
                r.n_b.to_string(),
            ])?;
        }
        write_csv(path.as_ref(), w)
    }
}

/// Means, rank-sum p and Cohen's d for each dimension; `d > 0` when `a` is higher.
pub fn compare_vad(a: &[UsageSeries; 3], b: &[UsageSeries; 3]) -> Result<VadComparison> {
    let mut rows = Vec::with_capacity(3);
    for (sa, sb) in a.iter().zip(b) {
        if sa.dimension != sb.dimension {
            return Err(Error::InvalidArgument(format!(
                "comparing {} with {}",
                sa.dimension, sb.dimension
            )));
        }
        let test = wilcoxon_ranksum(&sa.values, &sb.values)?;
        let d = match cohens_d(&sa.values, &sb.values) {
            Ok(d) => Some(d),
            Err(Error::InvalidArgument(_)) => None,
            Err(e) => return Err(e),
        };
        rows.push(VadComparisonRow {
            dimension: sa.dimension,
            mean_a: mean(&sa.values),
            mean_b: mean(&sb.values),
            cohens_d: d,
            p_value: test.p_value,
            statistic: test.statistic,
            n_a: sa.values.len(),
            n_b: sb.values.len(),
        });
    }
    Ok(VadComparison {
        groups: [a[0].group.clone(), b[0].group.clone()],
        rows,
    })
}

/// VAD predictions for sampled idiom-free posts.
#[derive(Debug, Clone, PartialEq)]
pub struct LiteralBaseline {
    /// Per group, the three dimension series.
    pub series: [[UsageSeries; 3]; 2],
    /// Per group, sorted corpus indices of the sampled posts.
    pub sampled: [Vec<usize>; 2],
}

impl LiteralBaseline {
    /// Writes `group,post_index,valence,arousal,dominance` rows.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["group", "post_index", "valence", "arousal", "dominance"])?;
        for (series, idx) in self.series.iter().zip(&self.sampled) {
            for (k, i) in idx.iter().enumerate() {
                w.write_record([
                    series[0].group.clone(),
                    i.to_string(),
                    series[0].values[k].to_string(),
                    series[1].values[k].to_string(),
                    series[2].values[k].to_string(),
                ])?;
            }
        }
        write_csv(path.as_ref(), w)
    }
}

const BASELINE_STREAM: u64 = 0x11;

/// Idiom-free posts of group `g` that the embedder can represent, with their
/// embeddings.
fn candidates(
    posts: &[&Post],
    g: usize,
    matcher: &Matcher,
    embedder: &dyn SentenceEmbedder,
) -> Vec<(usize, Vec<f64>)> {
    posts
        .par_iter()
        .enumerate()
        .filter(|(_, p)| p.group == g && !matcher.has_match(&p.tokens))
        .filter_map(|(i, p)| embedder.embed(&p.tokens).ok().map(|x| (i, x)))
        .collect()
}

/// Per group, how many posts [`literal_baseline`] could sample from.
pub fn literal_candidate_counts(
    corpus: &Corpus,
    matcher: &Matcher,
    embedder: &dyn SentenceEmbedder,
) -> [usize; 2] {
    let posts: Vec<_> = corpus.posts().collect();
    [0, 1].map(|g| candidates(&posts, g, matcher, embedder).len())
}

/// Samples `n` idiom-free posts per group and scores their embeddings.
///
/// Candidates are posts with no idiom match that the embedder can represent.
pub fn literal_baseline(
    corpus: &Corpus,
    matcher: &Matcher,
    embedder: &dyn SentenceEmbedder,
    models: &VadModels,
    n: usize,
    seed: u64,
) -> Result<LiteralBaseline> {
    let posts: Vec<_> = corpus.posts().collect();
    let mut series: [[UsageSeries; 3]; 2] = Default::default();
    let mut sampled: [Vec<usize>; 2] = Default::default();
    for g in 0..2 {
        let label = corpus.labels().label(g).to_string();
        let candidates = candidates(&posts, g, matcher, embedder);
        if candidates.len() < n {
            return Err(Error::InsufficientData(format!(
                "group {label} has {} idiom-free posts, {n} requested",
                candidates.len()
            )));
        }
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, BASELINE_STREAM, g as u64));
        order.shuffle(&mut rng);
        let mut chosen: Vec<usize> = order[..n].to_vec();
        chosen.sort_unstable();
        let mut values: [Vec<f64>; 3] = Default::default();
        for &c in &chosen {
            let vad = models.predict(&candidates[c].1)?;
            for (s, v) in values.iter_mut().zip(vad) {
                s.push(v);
            }
        }
        sampled[g] = chosen.iter().map(|&c| candidates[c].0).collect();
        let [v, a, d] = values;
        series[g] = [
            UsageSeries { dimension: VadDimension::Valence, group: label.clone(), values: v },
            UsageSeries { dimension: VadDimension::Arousal, group: label.clone(), values: a },
            UsageSeries { dimension: VadDimension::Dominance, group: label, values: d },
        ];
    }
    Ok(LiteralBaseline { series, sampled })
}

impl Default for UsageSeries {
    fn default() -> Self {
        UsageSeries {
            dimension: VadDimension::Valence,
            group: String::new(),
            values: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::GroupLabels;
    use crate::embeddings::{BagOfVectors, EmbeddingSpace};
    use crate::lexicon::IdiomEntry;
    use crate::stats::pearson;
    use crate::stopwords::Stopwords;
    use crate::synth;
    use proptest::prelude::*;

    fn constant_model(d: VadDimension, coefficients: Vec<f64>) -> VadModel {
        VadModel {
            dimension: d,
            precision: 10.0,
            link: "logit".into(),
            metadata: ModelMetadata {
                feature_dim: coefficients.len() - 1,
                training_rows: 0,
                regularization: "none".into(),
                iterations: 0,
                gradient_norm: 0.0,
                log_likelihood: 0.0,
            },
            coefficients,
        }
    }

    #[test]
    fn prediction_examples() {
        let zero = constant_model(VadDimension::Valence, vec![0.0, 0.0]);
        assert_eq!(predict_beta(&zero, &[3.0]).unwrap(), 0.5);
        let m = constant_model(VadDimension::Valence, vec![3f64.ln(), 0.0]);
        assert!((predict_beta(&m, &[1.0]).unwrap() - 0.75).abs() < 1e-12);
        let m = constant_model(VadDimension::Valence, vec![0.0, 1.0]);
        let p = predict_beta(&m, &[20.0]).unwrap();
        assert!(p > 0.999999 && p < 1.0);
        let p = predict_beta(&m, &[800.0]).unwrap();
        assert!(p < 1.0);
        assert!(predict_beta(&m, &[-800.0]).unwrap() > 0.0);
        assert!(matches!(
            predict_beta(&m, &[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 1, actual: 2 })
        ));
    }

    fn space() -> EmbeddingSpace {
        EmbeddingSpace::from_rows(
            2,
            vec![
                ("joy".into(), vec![1.0, 0.0]),
                ("grief".into(), vec![-1.0, 0.2]),
                ("calm".into(), vec![0.1, -1.0]),
                ("rage".into(), vec![-0.3, 1.0]),
                ("fight".into(), vec![-0.5, 0.8]),
                ("happy".into(), vec![0.9, 0.1]),
            ],
        )
        .unwrap()
    }

    fn vad_lexicon() -> VadLexicon {
        VadLexicon::from_entries([
            ("joy".to_string(), [0.95, 0.6, 0.7]),
            ("grief".to_string(), [0.05, 0.4, 0.2]),
            ("calm".to_string(), [0.7, 0.1, 0.5]),
            ("rage".to_string(), [0.1, 0.95, 0.6]),
            ("happy".to_string(), [0.9, 0.5, 0.6]),
            ("unknownword".to_string(), [0.5, 0.5, 0.5]),
        ])
        .unwrap()
    }

    #[test]
    fn fit_and_score_definitions() {
        let space = space();
        let stop = Stopwords::builtin();
        let emb = BagOfVectors { space: &space, stopwords: stop };
        let models = fit_vad_models(&vad_lexicon(), &emb).unwrap();
        assert_eq!(models.models[2].dimension, VadDimension::Dominance);
        assert_eq!(models.models[0].metadata.training_rows, 5);
        assert_eq!(models.models[0].coefficients.len(), 3);

        let lex = Lexicon::from_entries([
            IdiomEntry::new("on cloud nine", "joy").unwrap(),
            IdiomEntry::new("walk on air", "joy").unwrap(),
            IdiomEntry::new("see red", "the rage").unwrap(),
        ])
        .unwrap();
        let scores = score_definitions(&lex, &emb, &models).unwrap();
        assert_eq!(scores.get("on cloud nine"), scores.get("walk on air"));
        // a one-word definition uses the same feature as that training word
        let direct = models.predict(space.vector("joy").unwrap()).unwrap();
        assert_eq!(scores.get("on cloud nine").unwrap(), direct);
        assert!(scores.get("on cloud nine").unwrap()[0] > scores.get("see red").unwrap()[0]);
        assert!(scores.iter().all(|(_, v)| v.iter().all(|&x| x > 0.0 && x < 1.0)));

        let bad = Lexicon::from_entries([IdiomEntry::new("odd one", "zzz qqq").unwrap()]).unwrap();
        match score_definitions(&bad, &emb, &models) {
            Err(Error::Unembeddable(msg)) => assert!(msg.contains("odd one")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn models_round_trip_json() {
        let space = space();
        let emb = BagOfVectors { space: &space, stopwords: Stopwords::builtin() };
        let models = fit_vad_models(&vad_lexicon(), &emb).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        models.save(&path).unwrap();
        let back = VadModels::load(&path).unwrap();
        assert_eq!(back, models);
        let raw = fs::read_to_string(&path).unwrap();
        assert!(raw.contains("\"link\": \"logit\""));
        assert!(raw.contains("\"regularization\": \"none\""));
    }

    #[test]
    fn vad_lexicon_load_validates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vad.csv");
        fs::write(&path, "word,valence,arousal,dominance\nJoy,0.9,0.5,0.6\ngrief,0.1,0.3,0.2\n").unwrap();
        let lex = VadLexicon::load(&path).unwrap();
        assert_eq!(lex.get("joy"), Some([0.9, 0.5, 0.6]));
        assert_eq!(lex.len(), 2);
        fs::write(&path, "word,valence,arousal,dominance\njoy,0.9,0.5,0.6\nbad,1.2,0.3,0.2\n").unwrap();
        match VadLexicon::load(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        fs::write(&path, "word,valence,arousal,dominance\njoy,x,0.5,0.6\n").unwrap();
        assert!(matches!(VadLexicon::load(&path), Err(Error::Parse { line: 2, .. })));
    }

    fn counts(pairs: &[(&str, [u64; 2])]) -> GroupCounts {
        let canon: Vec<String> = pairs.iter().map(|(c, _)| c.to_string()).collect();
        let mut gc = GroupCounts::empty(GroupLabels::default(), &canon);
        for (c, n) in pairs {
            gc.set_idiom_count(c, *n);
        }
        gc
    }

    fn scores(pairs: &[(&str, [f64; 3])]) -> VadScores {
        VadScores::from_map(pairs.iter().map(|(c, v)| (c.to_string(), *v)).collect())
    }

    #[test]
    fn usage_series_examples() {
        let s = usage_vad_series(&counts(&[("x", [3, 0])]), &scores(&[("x", [0.9, 0.1, 0.2])]), "F")
            .unwrap();
        assert_eq!(s[0].values, [0.9, 0.9, 0.9]);
        assert_eq!(s[2].values, [0.2, 0.2, 0.2]);

        let empty = usage_vad_series(&counts(&[]), &scores(&[]), "M").unwrap();
        assert!(empty.iter().all(|s| s.values.is_empty()));

        let s = usage_vad_series(
            &counts(&[("a", [2, 0]), ("b", [1, 4])]),
            &scores(&[("a", [0.2, 0.0, 0.0]), ("b", [0.8, 0.0, 0.0])]),
            "F",
        )
        .unwrap();
        let mut v = s[0].values.clone();
        v.sort_by(f64::total_cmp);
        assert_eq!(v, [0.2, 0.2, 0.8]);

        assert!(usage_vad_series(&counts(&[("a", [1, 0])]), &scores(&[]), "F").is_err());
        assert!(usage_vad_series(&counts(&[("a", [1, 0])]), &scores(&[]), "X").is_err());
    }

    fn triple(group: &str, v: &[f64]) -> [UsageSeries; 3] {
        VadDimension::ALL.map(|d| UsageSeries {
            dimension: d,
            group: group.into(),
            values: v.iter().map(|x| x + d.index() as f64 * 0.01).collect(),
        })
    }

    #[test]
    fn compare_examples() {
        let a = triple("F", &[0.1, 0.4, 0.35, 0.8]);
        let same = compare_vad(&a, &triple("M", &[0.1, 0.4, 0.35, 0.8])).unwrap();
        for r in &same.rows {
            assert_eq!(r.cohens_d, Some(0.0));
            assert_eq!(r.p_value, 1.0);
        }
        let shifted = triple("M", &[0.2, 0.5, 0.45, 0.9]);
        let c = compare_vad(&a, &shifted).unwrap();
        assert!(c.rows.iter().all(|r| r.cohens_d.unwrap() < 0.0));
        let r = compare_vad(&shifted, &a).unwrap();
        for (x, y) in c.rows.iter().zip(&r.rows) {
            assert!((x.cohens_d.unwrap() + y.cohens_d.unwrap()).abs() < 1e-12);
            assert_eq!(x.p_value, y.p_value);
        }
    }

    #[test]
    fn significance_stars() {
        let row = |p| VadComparisonRow {
            dimension: VadDimension::Dominance,
            mean_a: 0.0,
            mean_b: 0.0,
            cohens_d: None,
            p_value: p,
            statistic: 0.0,
            n_a: 1,
            n_b: 1,
        };
        assert_eq!(row(0.0005).stars(), "**");
        assert_eq!(row(0.001).stars(), "*");
        assert_eq!(row(0.005).stars(), "*");
        assert_eq!(row(0.01).stars(), "");
    }

    #[test]
    fn literal_baseline_samples_idiom_free_posts() {
        let space = space();
        let stop = Stopwords::builtin();
        let emb = BagOfVectors { space: &space, stopwords: stop };
        let models = fit_vad_models(&vad_lexicon(), &emb).unwrap();
        let entry = IdiomEntry::with_annotations("pick a fight", "to start an argument", Some(0), None);
        let lex = Lexicon::from_entries([entry.unwrap()])
            .unwrap()
            .expanded()
            .unwrap();
        let matcher = Matcher::build(&lex).unwrap();
        let mut posts = Vec::new();
        for g in 0..2 {
            for i in 0..6 {
                posts.push(Post::new(format!("a{i}"), g, "so much joy and calm"));
                posts.push(Post::new(format!("b{i}"), g, "they picked a fight with rage"));
                posts.push(Post::new(format!("c{i}"), g, "the of and"));
            }
        }
        let corpus = Corpus::new(GroupLabels::default(), posts).unwrap();
        let base = literal_baseline(&corpus, &matcher, &emb, &models, 4, 9).unwrap();
        let all: Vec<_> = corpus.posts().collect();
        for g in 0..2 {
            assert_eq!(base.sampled[g].len(), 4);
            assert_eq!(base.series[g][1].values.len(), 4);
            for &i in &base.sampled[g] {
                assert_eq!(all[i].group, g);
                assert!(matcher.find_matches(&all[i].tokens).is_empty());
            }
        }
        assert_eq!(base, literal_baseline(&corpus, &matcher, &emb, &models, 4, 9).unwrap());
        assert_eq!(literal_candidate_counts(&corpus, &matcher, &emb), [6, 6]);
        let none = literal_baseline(&corpus, &matcher, &emb, &models, 0, 9).unwrap();
        assert!(none.series.iter().flatten().all(|s| s.values.is_empty()));
        match literal_baseline(&corpus, &matcher, &emb, &models, 7, 9) {
            Err(Error::InsufficientData(msg)) => assert!(msg.contains("has 6")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn every_post_idiomatic_is_an_error() {
        let space = space();
        let emb = BagOfVectors { space: &space, stopwords: Stopwords::builtin() };
        let models = fit_vad_models(&vad_lexicon(), &emb).unwrap();
        let lex = Lexicon::from_entries([IdiomEntry::new("see red", "rage").unwrap()]).unwrap();
        let matcher = Matcher::build(&lex.expanded().unwrap()).unwrap();
        let posts = (0..4).map(|i| Post::new("a", i % 2, "i see red joy")).collect();
        let corpus = Corpus::new(GroupLabels::default(), posts).unwrap();
        assert!(literal_baseline(&corpus, &matcher, &emb, &models, 1, 0).is_err());
    }

    #[test]
    fn held_out_quality_gate() {
        let beta = [0.3, 0.8, -0.6, 0.4, 0.5, -0.3];
        let (x, y) = synth::beta_regression_data(6000, &beta, 50.0, 17);
        let fit = fit_beta_regression(&x[..5000], &y[..5000]).unwrap();
        let model = VadModel::from_fit(VadDimension::Valence, &fit, 5000);
        let pred: Vec<f64> = x[5000..].iter().map(|f| predict_beta(&model, f).unwrap()).collect();
        let r = pearson(&pred, &y[5000..]).unwrap();
        assert!(r >= 0.7, "held-out pearson {r}");
    }

    proptest! {
        #[test]
        fn predictions_stay_inside_unit_interval(
            b in prop::collection::vec(-50.0f64..50.0, 3),
            x in prop::collection::vec(-50.0f64..50.0, 2),
        ) {
            let m = constant_model(VadDimension::Arousal, b);
            let p = predict_beta(&m, &x).unwrap();
            prop_assert!(p > 0.0 && p < 1.0);
        }

        #[test]
        fn series_length_is_total_count(c in prop::collection::vec((0u64..20, 0u64..20), 0..6)) {
            let names: Vec<String> = (0..c.len()).map(|i| format!("i{i}")).collect();
            let pairs: Vec<(&str, [u64; 2])> =
                names.iter().zip(&c).map(|(n, (a, b))| (n.as_str(), [*a, *b])).collect();
            let sc: Vec<(&str, [f64; 3])> = names.iter().map(|n| (n.as_str(), [0.5; 3])).collect();
            let s = usage_vad_series(&counts(&pairs), &scores(&sc), "M").unwrap();
            let total: u64 = c.iter().map(|p| p.1).sum();
            prop_assert!(s.iter().all(|x| x.values.len() as u64 == total));
        }
    }
}
