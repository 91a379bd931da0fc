//! Idiom lexicon: entries with definitions, surface-variant expansion, frequency
//! pruning and literality filtering.

mod inflect;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, TokenSeq};
use crate::embeddings::{cosine, EmbeddingSpace};
use crate::matcher::GroupCounts;
use crate::stopwords::Stopwords;
use crate::{Error, Result};

pub use inflect::inflect_verb;

/// Prefix of the single-token representation of an idiom.
pub const IDIOM_TOKEN_PREFIX: &str = "__idiom__";

pub const POSSESSIVE_PRONOUNS: [&str; 7] = ["my", "your", "his", "her", "its", "our", "their"];
pub const OBJECTIVE_PRONOUNS: [&str; 7] = ["me", "you", "him", "her", "it", "us", "them"];

/// Grammatical role of an indefinite-pronoun slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlotKind {
    /// `one's` / `someone's`, filled with my/your/his/...
    Possessive,
    /// `someone`, filled with me/you/him/...
    Objective,
}

impl SlotKind {
    fn infer(token: &str) -> Option<SlotKind> {
        match token {
            "one's" | "someone's" => Some(SlotKind::Possessive),
            "someone" => Some(SlotKind::Objective),
            _ => None,
        }
    }

    pub fn pronouns(self) -> &'static [&'static str; 7] {
        match self {
            SlotKind::Possessive => &POSSESSIVE_PRONOUNS,
            SlotKind::Objective => &OBJECTIVE_PRONOUNS,
        }
    }
}

/// One realization of an idiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceForm {
    pub tokens: Vec<String>,
    /// Key of the canonical form this variant realizes.
    pub parent: String,
    /// Combined-corpus occurrences, filled in by [`Lexicon::prune_variants`].
    pub corpus_count: Option<u64>,
}

impl SurfaceForm {
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

/// A dictionary idiom with its literal definition and surface variants.
#[derive(Debug, Clone, PartialEq)]
pub struct IdiomEntry {
    pub canonical: TokenSeq,
    pub definition: TokenSeq,
    pub verb_index: Option<usize>,
    pub slot_index: Option<usize>,
    pub slot_kind: Option<SlotKind>,
    /// Variants keyed by their token sequence; always contains the canonical form.
    pub variants: BTreeMap<Vec<String>, SurfaceForm>,
    pub literality: Option<f64>,
}

impl IdiomEntry {
    /// Builds an entry whose only variant is the canonical form.
    pub fn new(canonical: &str, definition: &str) -> Result<Self> {
        Self::build(canonical, definition, None, None, None)
    }

    pub fn with_annotations(
        canonical: &str,
        definition: &str,
        verb_index: Option<usize>,
        slot_index: Option<usize>,
    ) -> Result<Self> {
        Self::build(canonical, definition, verb_index, slot_index, None)
    }

    fn build(
        canonical: &str,
        definition: &str,
        verb_index: Option<usize>,
        slot_index: Option<usize>,
        slot_kind: Option<SlotKind>,
    ) -> Result<Self> {
        let canonical = tokenize(canonical);
        if canonical.is_empty() {
            return Err(Error::InvalidArgument("empty canonical form".into()));
        }
        let key = canonical.join(" ");
        let n = canonical.len();
        if let Some(v) = verb_index {
            if v >= n {
                return Err(Error::InvalidArgument(format!(
                    "verb_index {v} out of range for `{key}` ({n} tokens)"
                )));
            }
        }
        let slot_kind = match slot_index {
            Some(s) if s >= n => {
                return Err(Error::InvalidArgument(format!(
                    "slot_index {s} out of range for `{key}` ({n} tokens)"
                )))
            }
            Some(s) if Some(s) == verb_index => {
                return Err(Error::InvalidArgument(format!(
                    "verb_index and slot_index coincide in `{key}`"
                )))
            }
            Some(s) => match slot_kind.or_else(|| SlotKind::infer(&canonical[s])) {
                Some(kind) => Some(kind),
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "slot token `{}` in `{key}` is not one's/someone/someone's and no slot_kind is given",
                        canonical[s]
                    )))
                }
            },
            None => None,
        };
        let mut entry = IdiomEntry {
            definition: tokenize(definition),
            canonical,
            verb_index,
            slot_index,
            slot_kind,
            variants: BTreeMap::new(),
            literality: None,
        };
        entry.insert_variant(entry.canonical.to_vec());
        Ok(entry)
    }

    /// The canonical form as a space-joined string; this is the entry's identity.
    pub fn key(&self) -> String {
        self.canonical.join(" ")
    }

    /// The single token standing for every variant in rewritten text.
    pub fn idiom_token(&self) -> String {
        idiom_token(&self.canonical)
    }

    fn insert_variant(&mut self, tokens: Vec<String>) {
        let parent = self.key();
        self.variants.entry(tokens.clone()).or_insert(SurfaceForm {
            tokens,
            parent,
            corpus_count: None,
        });
    }

    /// All surface forms generated by verb inflection and pronoun substitution.
    ///
    /// The result is the full product of the verb-form axis and the slot axis, where
    /// the slot axis contains the seven personal pronouns plus the original slot
    /// word. The canonical form is therefore always included.
    pub fn expand(&self) -> Vec<SurfaceForm> {
        let verb_forms: Vec<Option<String>> = match self.verb_index {
            Some(v) => inflect_verb(&self.canonical[v]).into_iter().map(Some).collect(),
            None => vec![None],
        };
        let slot_fills: Vec<Option<String>> = match (self.slot_index, self.slot_kind) {
            (Some(s), Some(kind)) => std::iter::once(Some(self.canonical[s].clone()))
                .chain(kind.pronouns().iter().map(|p| Some(p.to_string())))
                .collect(),
            _ => vec![None],
        };
        let key = self.key();
        let mut out = BTreeSet::new();
        for verb in &verb_forms {
            for fill in &slot_fills {
                let mut tokens = self.canonical.to_vec();
                if let (Some(v), Some(form)) = (self.verb_index, verb) {
                    tokens[v] = form.clone();
                }
                if let (Some(s), Some(word)) = (self.slot_index, fill) {
                    tokens[s] = word.clone();
                }
                out.insert(tokens);
            }
        }
        out.into_iter()
            .map(|tokens| SurfaceForm {
                tokens,
                parent: key.clone(),
                corpus_count: None,
            })
            .collect()
    }

    /// Mean cosine between the idiom token's vector and each in-vocabulary,
    /// non-stopword constituent of the canonical form.
    pub fn literality_score(&self, space: &EmbeddingSpace, stopwords: &Stopwords) -> Result<f64> {
        let token = self.idiom_token();
        let idiom_vec = space
            .vector(&token)
            .ok_or_else(|| Error::OutOfVocabulary(token.clone()))?;
        let mut sum = 0.0;
        let mut n = 0usize;
        for word in self.canonical.iter() {
            if stopwords.contains(word) {
                continue;
            }
            if let Some(v) = space.vector(word) {
                sum += cosine(idiom_vec, v)?;
                n += 1;
            }
        }
        if n == 0 {
            return Err(Error::Unembeddable(format!(
                "no in-vocabulary content word in `{}`",
                self.key()
            )));
        }
        Ok(sum / n as f64)
    }
}

/// `__idiom__` followed by the canonical tokens joined with underscores.
pub fn idiom_token(canonical: &[String]) -> String {
    format!("{IDIOM_TOKEN_PREFIX}{}", canonical.join("_"))
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryRecord {
    canonical: String,
    definition: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    verb_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slot_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slot_kind: Option<SlotKind>,
    /// Explicit surface forms; present in lexicons written after pruning.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    variants: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    literality: Option<f64>,
}

/// One row of the literality report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiteralityRow {
    pub canonical: String,
    /// Absent when the entry could not be scored.
    pub literality: Option<f64>,
    pub kept: bool,
    /// Why an entry went unscored.
    pub note: Option<&'static str>,
}

/// Idiom entries keyed by canonical form.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, IdiomEntry>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = IdiomEntry>) -> Result<Self> {
        let mut lex = Lexicon::new();
        for e in entries {
            lex.insert(e)?;
        }
        Ok(lex)
    }

    pub fn insert(&mut self, entry: IdiomEntry) -> Result<()> {
        let key = entry.key();
        if self.entries.contains_key(&key) {
            return Err(Error::DuplicateCanonical(key));
        }
        self.entries.insert(key, entry);
        Ok(())
    }

    /// Reads one JSON object per line (`canonical`, `definition`, optional
    /// `verb_index`, `slot_index`, `slot_kind`, `variants`, `literality`).
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lex = Lexicon::new();
        for (i, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = |msg: String| Error::parse(path, i + 1, msg);
            let rec: EntryRecord = serde_json::from_str(line).map_err(|e| at(e.to_string()))?;
            let mut entry = IdiomEntry::build(
                &rec.canonical,
                &rec.definition,
                rec.verb_index,
                rec.slot_index,
                rec.slot_kind,
            )
            .map_err(|e| at(e.to_string()))?;
            if let Some(variants) = rec.variants {
                let n = entry.canonical.len();
                for v in variants {
                    let tokens = tokenize(&v).into_inner();
                    if tokens.is_empty() || tokens.len().abs_diff(n) > 1 {
                        return Err(at(format!(
                            "variant `{v}` has {} tokens; canonical has {n}",
                            tokens.len()
                        )));
                    }
                    entry.insert_variant(tokens);
                }
            }
            entry.literality = rec.literality;
            match lex.insert(entry) {
                Err(Error::DuplicateCanonical(c)) => {
                    return Err(at(format!("duplicate canonical form `{c}`")))
                }
                other => other?,
            }
        }
        lex.check_collisions()?;
        Ok(lex)
    }

    /// Writes the lexicon in its load format, including explicit variants and
    /// literality scores.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = Vec::new();
        for e in self.entries.values() {
            let rec = EntryRecord {
                canonical: e.key(),
                definition: e.definition.join(" "),
                verb_index: e.verb_index,
                slot_index: e.slot_index,
                slot_kind: e.slot_kind,
                variants: Some(e.variants.values().map(SurfaceForm::text).collect()),
                literality: e.literality,
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.push(b'\n');
        }
        fs::File::create(path)
            .and_then(|mut f| f.write_all(&out))
            .map_err(|e| Error::io(path, e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, canonical: &str) -> Option<&IdiomEntry> {
        self.entries.get(canonical)
    }

    /// Entries in canonical-key order.
    pub fn entries(&self) -> impl ExactSizeIterator<Item = &IdiomEntry> + '_ {
        self.entries.values()
    }

    /// Canonical keys in order; the support of usage distributions.
    pub fn canonicals(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }

    pub fn variant_count(&self) -> usize {
        self.entries.values().map(|e| e.variants.len()).sum()
    }

    fn check_collisions(&self) -> Result<()> {
        let mut owner: BTreeMap<&[String], &str> = BTreeMap::new();
        for (key, e) in &self.entries {
            for tokens in e.variants.keys() {
                if let Some(first) = owner.insert(tokens, key) {
                    return Err(Error::SurfaceCollision {
                        surface: tokens.join(" "),
                        first: first.to_string(),
                        second: key.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Replaces every entry's variants with its full expansion.
    pub fn expanded(&self) -> Result<Lexicon> {
        let mut out = self.clone();
        for e in out.entries.values_mut() {
            e.variants = e
                .expand()
                .into_iter()
                .map(|sf| (sf.tokens.clone(), sf))
                .collect();
        }
        out.check_collisions()?;
        Ok(out)
    }

    /// Drops surface forms seen at most `min_count` times in the combined corpus
    /// (kept iff count exceeds the threshold). Canonical forms are always kept and a
    /// threshold of 0 disables pruning. Surviving forms get their counts filled.
    pub fn prune_variants(&self, counts: &GroupCounts, min_count: u64) -> Lexicon {
        let mut out = self.clone();
        for e in out.entries.values_mut() {
            let canonical = e.canonical.to_vec();
            e.variants.retain(|tokens, sf| {
                let n = counts.surface_total(tokens);
                sf.corpus_count = Some(n);
                min_count == 0 || n > min_count || *tokens == canonical
            });
        }
        out
    }

    /// Scores every entry's literality and drops those scoring above `threshold`.
    ///
    /// An entry whose idiom token has no vector was never (or too rarely) used and is
    /// dropped. An entry none of whose content words has a vector is kept unscored:
    /// its words never occur on their own, so there is no literal reading to find.
    pub fn filter_literal(
        &self,
        space: &EmbeddingSpace,
        stopwords: &Stopwords,
        threshold: f64,
    ) -> Result<(Lexicon, Vec<LiteralityRow>)> {
        let mut kept = Lexicon::new();
        let mut report = Vec::with_capacity(self.len());
        for e in self.entries.values() {
            let (score, keep, note) = match e.literality_score(space, stopwords) {
                Ok(score) => (Some(score), score <= threshold, None),
                Err(Error::OutOfVocabulary(_)) => (None, false, Some("idiom not in vocabulary")),
                Err(Error::Unembeddable(_)) => (None, true, Some("no content word in vocabulary")),
                Err(err) => {
                    return Err(Error::InvalidArgument(format!(
                        "literality of `{}`: {err}",
                        e.key()
                    )))
                }
            };
            report.push(LiteralityRow {
                canonical: e.key(),
                literality: score,
                kept: keep,
                note,
            });
            if keep {
                let mut e = e.clone();
                e.literality = score;
                kept.entries.insert(e.key(), e);
            }
        }
        Ok((kept, report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::Matcher;
    use crate::corpus::{Corpus, GroupLabels, Post};

    fn lexicon_file(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        f
    }

    fn texts(forms: &[SurfaceForm]) -> BTreeSet<String> {
        forms.iter().map(SurfaceForm::text).collect()
    }

    #[test]
    fn load_entry() {
        let f = lexicon_file(&[
            r#"{"canonical":"sit on the fence","definition":"to avoid taking sides","verb_index":0}"#,
        ]);
        let lex = Lexicon::load(f.path()).unwrap();
        let e = lex.get("sit on the fence").unwrap();
        assert_eq!(e.canonical.len(), 4);
        assert_eq!(e.definition.tokens(), ["to", "avoid", "taking", "sides"]);
        assert_eq!(e.idiom_token(), "__idiom__sit_on_the_fence");
    }

    #[test]
    fn load_empty_and_errors() {
        assert!(Lexicon::load(lexicon_file(&[]).path()).unwrap().is_empty());

        let dup = lexicon_file(&[
            r#"{"canonical":"at odds","definition":"in conflict"}"#,
            r#"{"canonical":"at odds","definition":"at variance"}"#,
        ]);
        let err = Lexicon::load(dup.path()).unwrap_err();
        assert!(err.to_string().contains("duplicate canonical"), "{err}");
        assert!(matches!(err, Error::Parse { line: 2, .. }));

        let bad = lexicon_file(&[r#"{"canonical":"at odds","definition":"x","verb_index":2}"#]);
        assert!(Lexicon::load(bad.path())
            .unwrap_err()
            .to_string()
            .contains("verb_index 2 out of range"));

        let slot = lexicon_file(&[r#"{"canonical":"at odds","definition":"x","slot_index":1}"#]);
        assert!(Lexicon::load(slot.path()).is_err());
    }

    #[test]
    fn expand_without_axes_is_canonical_only() {
        let e = IdiomEntry::new("at odds", "in conflict").unwrap();
        assert_eq!(texts(&e.expand()), BTreeSet::from(["at odds".to_string()]));
    }

    #[test]
    fn expand_verb_and_possessive() {
        let e = IdiomEntry::with_annotations("swallow one's pride", "x", Some(0), Some(1)).unwrap();
        let forms = texts(&e.expand());
        assert!(forms.contains("swallow her pride"));
        assert!(forms.contains("swallowed my pride"));
        assert!(forms.contains("swallow one's pride"));
        assert_eq!(forms.len(), 4 * 8);
    }

    #[test]
    fn expand_objective_slot() {
        let e = IdiomEntry::with_annotations("mean the world to someone", "x", Some(0), Some(4))
            .unwrap();
        let forms = texts(&e.expand());
        assert!(forms.contains("means the world to me"));
        assert!(forms.contains("meant the world to them"));
        assert_eq!(forms.len(), 4 * 8);
    }

    #[test]
    fn expanded_detects_collisions() {
        let lex = Lexicon::from_entries([
            IdiomEntry::new("on the fence", "undecided").unwrap(),
            IdiomEntry::with_annotations("sit on the fence", "x", Some(0), None).unwrap(),
        ])
        .unwrap();
        assert!(lex.expanded().is_ok());

        let mut a = IdiomEntry::new("on the fence", "x").unwrap();
        a.insert_variant(vec!["sat".into(), "on".into()]);
        let mut b = IdiomEntry::new("sat on it", "y").unwrap();
        b.insert_variant(vec!["sat".into(), "on".into()]);
        let lex = Lexicon::from_entries([a, b]).unwrap();
        assert!(matches!(lex.check_collisions(), Err(Error::SurfaceCollision { .. })));
    }

    fn counts_for(lex: &Lexicon, texts: &[(&str, usize)]) -> GroupCounts {
        let labels = GroupLabels::new("M", "F").unwrap();
        let posts = texts
            .iter()
            .flat_map(|(t, n)| (0..*n).map(move |i| Post::new(format!("a{i}"), 0, *t)))
            .collect();
        let corpus = Corpus::new(labels, posts).unwrap();
        Matcher::build(lex).unwrap().count_usages(&corpus)
    }

    #[test]
    fn prune_boundary() {
        let lex = Lexicon::from_entries([
            IdiomEntry::with_annotations("pick a fight", "x", Some(0), None).unwrap(),
        ])
        .unwrap()
        .expanded()
        .unwrap();
        let counts = counts_for(
            &lex,
            &[("picked a fight", 51), ("picks a fight", 50), ("picking a fight", 49)],
        );
        let pruned = lex.prune_variants(&counts, 50);
        let e = pruned.get("pick a fight").unwrap();
        let kept: BTreeSet<String> = e.variants.values().map(SurfaceForm::text).collect();
        assert_eq!(
            kept,
            BTreeSet::from(["pick a fight".to_string(), "picked a fight".to_string()])
        );
        assert_eq!(
            e.variants[&vec!["picked".to_string(), "a".into(), "fight".into()]].corpus_count,
            Some(51)
        );

        let all = lex.prune_variants(&counts, 0);
        assert_eq!(all.variant_count(), lex.variant_count());
        assert!(all.entries().all(|e| e.variants.values().all(|v| v.corpus_count.is_some())));
    }

    #[test]
    fn save_load_round_trip() {
        let lex = Lexicon::from_entries([
            IdiomEntry::with_annotations("swallow one's pride", "to humble oneself", Some(0), Some(1))
                .unwrap(),
            IdiomEntry::new("at odds", "in conflict").unwrap(),
        ])
        .unwrap()
        .expanded()
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        lex.save(f.path()).unwrap();
        let back = Lexicon::load(f.path()).unwrap();
        assert_eq!(back, lex);
    }

    #[test]
    fn literality_extremes() {
        let idiom = IdiomEntry::new("wooden spoon", "last place").unwrap();
        let same = EmbeddingSpace::from_rows(
            2,
            vec![
                ("__idiom__wooden_spoon".into(), vec![1.0, 2.0]),
                ("wooden".into(), vec![2.0, 4.0]),
                ("spoon".into(), vec![0.5, 1.0]),
            ],
        )
        .unwrap();
        let sw = Stopwords::builtin();
        assert!((idiom.literality_score(&same, sw).unwrap() - 1.0).abs() < 1e-12);

        let ortho = EmbeddingSpace::from_rows(
            2,
            vec![
                ("__idiom__wooden_spoon".into(), vec![1.0, 0.0]),
                ("wooden".into(), vec![0.0, 3.0]),
                ("spoon".into(), vec![0.0, -1.0]),
            ],
        )
        .unwrap();
        assert!(idiom.literality_score(&ortho, sw).unwrap().abs() < 1e-12);

        let missing = EmbeddingSpace::from_rows(2, vec![("wooden".into(), vec![1.0, 0.0])]).unwrap();
        assert!(matches!(
            idiom.literality_score(&missing, sw),
            Err(Error::OutOfVocabulary(_))
        ));
        let no_words =
            EmbeddingSpace::from_rows(2, vec![("__idiom__wooden_spoon".into(), vec![1.0, 0.0])])
                .unwrap();
        assert!(idiom.literality_score(&no_words, sw).is_err());
    }

    /// One idiom per word, its vector at cosine `score` from the word's vector.
    fn scored_space(entries: &[(&str, f64)]) -> (Lexicon, EmbeddingSpace) {
        let mut rows = Vec::new();
        let mut idioms = Vec::new();
        for (word, score) in entries {
            let e = IdiomEntry::new(&format!("the {word}"), "x").unwrap();
            // (1,1,1,2,3) has norm exactly 4, so its cosine with e1 is exactly 1/4
            let v = if *score == 0.25 {
                vec![1.0, 1.0, 1.0, 2.0, 3.0]
            } else {
                vec![*score, (1.0 - score * score).sqrt(), 0.0, 0.0, 0.0]
            };
            rows.push((e.idiom_token(), v));
            rows.push((word.to_string(), vec![1.0, 0.0, 0.0, 0.0, 0.0]));
            idioms.push(e);
        }
        (
            Lexicon::from_entries(idioms).unwrap(),
            EmbeddingSpace::from_rows(5, rows).unwrap(),
        )
    }

    #[test]
    fn filter_literal_threshold_is_strict() {
        let (lex, space) = scored_space(&[("alpha", 0.26), ("beta", 0.25), ("gamma", 0.1)]);
        let sw = Stopwords::builtin();
        let (kept, report) = lex.filter_literal(&space, sw, 0.25).unwrap();
        let names: Vec<String> = kept.canonicals();
        assert_eq!(names, ["the beta", "the gamma"]);
        assert_eq!(report.len(), 3);
        assert!(!report.iter().find(|r| r.canonical == "the alpha").unwrap().kept);
        assert!((kept.get("the beta").unwrap().literality.unwrap() - 0.25).abs() < 1e-12);

        let (all, _) = lex.filter_literal(&space, sw, 1.0).unwrap();
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn filter_literal_handles_unscorable_entries() {
        let (mut lex, mut rows) = (Lexicon::new(), Vec::new());
        let unused = IdiomEntry::new("wooden spoon", "last place").unwrap();
        let figurative = IdiomEntry::new("kick the bucket", "to die").unwrap();
        rows.push(("wooden".to_string(), vec![1.0, 0.0]));
        rows.push((figurative.idiom_token(), vec![0.0, 1.0]));
        lex.insert(unused).unwrap();
        lex.insert(figurative).unwrap();
        let space = EmbeddingSpace::from_rows(2, rows).unwrap();
        let (kept, report) = lex.filter_literal(&space, Stopwords::builtin(), 0.25).unwrap();
        assert_eq!(kept.canonicals(), ["kick the bucket"]);
        assert_eq!(kept.get("kick the bucket").unwrap().literality, None);
        let spoon = report.iter().find(|r| r.canonical == "wooden spoon").unwrap();
        assert_eq!((spoon.literality, spoon.kept), (None, false));
        assert!(spoon.note.is_some());
    }
}
