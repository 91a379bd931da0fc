//! Idiom occurrence matching over token streams.
//!
//! The matcher is a token-level trie over every surface variant in a lexicon.
//! Scanning is leftmost-longest and non-overlapping: at each position the longest
//! variant starting there wins, and the scan resumes after it.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{Corpus, GroupLabels, TokenSeq};
use crate::lexicon::{idiom_token, Lexicon};
use crate::{Error, Result};

#[derive(Debug, Default, Clone)]
struct Node {
    next: HashMap<u32, usize>,
    /// Pattern index terminating here.
    terminal: Option<usize>,
}

#[derive(Debug, Clone)]
struct Pattern {
    tokens: Vec<String>,
    canonical: usize,
}

/// Multi-pattern index over all surface forms of a lexicon.
#[derive(Debug, Clone)]
pub struct Matcher {
    vocab: HashMap<String, u32>,
    nodes: Vec<Node>,
    patterns: Vec<Pattern>,
    /// Canonical keys, parallel to `idiom_tokens`.
    canonicals: Vec<String>,
    idiom_tokens: Vec<String>,
}

/// One idiom occurrence; `span` is a half-open token range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pub canonical: String,
    pub span: (usize, usize),
    pub surface: Vec<String>,
}

impl Matcher {
    /// Indexes every variant of every entry. Fails if two entries share a variant.
    pub fn build(lexicon: &Lexicon) -> Result<Self> {
        let mut m = Matcher {
            vocab: HashMap::new(),
            nodes: vec![Node::default()],
            patterns: Vec::new(),
            canonicals: Vec::new(),
            idiom_tokens: Vec::new(),
        };
        for entry in lexicon.entries() {
            let c = m.canonicals.len();
            m.canonicals.push(entry.key());
            m.idiom_tokens.push(entry.idiom_token());
            for tokens in entry.variants.keys() {
                m.insert(tokens, c)?;
            }
        }
        Ok(m)
    }

    fn insert(&mut self, tokens: &[String], canonical: usize) -> Result<()> {
        if tokens.is_empty() {
            return Err(Error::InvalidArgument("empty surface form".into()));
        }
        let mut node = 0;
        for t in tokens {
            let next_id = self.vocab.len() as u32;
            let id = *self.vocab.entry(t.clone()).or_insert(next_id);
            node = match self.nodes[node].next.get(&id) {
                Some(&n) => n,
                None => {
                    self.nodes.push(Node::default());
                    let n = self.nodes.len() - 1;
                    self.nodes[node].next.insert(id, n);
                    n
                }
            };
        }
        if let Some(existing) = self.nodes[node].terminal {
            let first = self.patterns[existing].canonical;
            return Err(Error::SurfaceCollision {
                surface: tokens.join(" "),
                first: self.canonicals[first].clone(),
                second: self.canonicals[canonical].clone(),
            });
        }
        self.nodes[node].terminal = Some(self.patterns.len());
        self.patterns.push(Pattern {
            tokens: tokens.to_vec(),
            canonical,
        });
        Ok(())
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    /// Canonical keys in lexicon order.
    pub fn canonicals(&self) -> &[String] {
        &self.canonicals
    }

    /// Longest pattern starting at `start`, as (pattern index, end).
    fn longest_at(&self, tokens: &[String], start: usize) -> Option<(usize, usize)> {
        let mut node = 0;
        let mut best = None;
        for (i, t) in tokens.iter().enumerate().skip(start) {
            let Some(id) = self.vocab.get(t) else { break };
            let Some(&n) = self.nodes[node].next.get(id) else { break };
            node = n;
            if let Some(p) = self.nodes[node].terminal {
                best = Some((p, i + 1));
            }
        }
        best
    }

    /// (pattern index, start, end) for every leftmost-longest match.
    fn scan<'a>(&'a self, tokens: &'a [String]) -> impl Iterator<Item = (usize, usize, usize)> + 'a {
        let mut pos = 0;
        std::iter::from_fn(move || {
            while pos < tokens.len() {
                if let Some((p, end)) = self.longest_at(tokens, pos) {
                    let start = pos;
                    pos = end;
                    return Some((p, start, end));
                }
                pos += 1;
            }
            None
        })
    }

    /// Leftmost-longest, non-overlapping matches in token order.
    pub fn find_matches(&self, tokens: &[String]) -> Vec<Match> {
        self.scan(tokens)
            .map(|(p, start, end)| Match {
                canonical: self.canonicals[self.patterns[p].canonical].clone(),
                span: (start, end),
                surface: self.patterns[p].tokens.clone(),
            })
            .collect()
    }

    pub fn has_match(&self, tokens: &[String]) -> bool {
        self.scan(tokens).next().is_some()
    }

    /// Replaces each matched span with its idiom token.
    pub fn rewrite_with_idiom_tokens(&self, tokens: &[String]) -> TokenSeq {
        let mut out = Vec::with_capacity(tokens.len());
        let mut last = 0;
        for (p, start, end) in self.scan(tokens) {
            out.extend_from_slice(&tokens[last..start]);
            out.push(self.idiom_tokens[self.patterns[p].canonical].clone());
            last = end;
        }
        out.extend_from_slice(&tokens[last..]);
        TokenSeq::new(out)
    }

    /// Idiom token for a canonical key.
    pub fn idiom_token_of(&self, canonical: &str) -> String {
        match self.canonicals.iter().position(|c| c == canonical) {
            Some(i) => self.idiom_tokens[i].clone(),
            None => idiom_token(&canonical.split(' ').map(str::to_string).collect::<Vec<_>>()),
        }
    }

    fn count_tokens(&self, tokens: &[String], group: usize, counts: &mut GroupCounts) {
        let mut last = 0;
        for (p, start, end) in self.scan(tokens) {
            for t in &tokens[last..start] {
                counts.add_token(t, group, 1);
            }
            let pattern = &self.patterns[p];
            counts.idiom_counts[pattern.canonical].1[group] += 1;
            *counts
                .surface_counts
                .entry(pattern.tokens.join(" "))
                .or_default()
                .get_mut(group)
                .unwrap() += 1;
            counts.add_token(&self.idiom_tokens[pattern.canonical], group, 1);
            last = end;
        }
        for t in &tokens[last..] {
            counts.add_token(t, group, 1);
        }
    }

    /// Per-group idiom, surface-form and token counts over the whole corpus.
    pub fn count_usages(&self, corpus: &Corpus) -> GroupCounts {
        let empty = || GroupCounts::empty(corpus.labels().clone(), &self.canonicals);
        let posts: Vec<_> = corpus.posts().collect();
        posts
            .par_chunks(256)
            .map(|chunk| {
                let mut counts = empty();
                for post in chunk {
                    self.count_tokens(&post.tokens, post.group, &mut counts);
                }
                counts
            })
            .reduce(empty, |mut a, b| {
                a.merge(&b);
                a
            })
    }
}

/// Occurrence counts split by group.
///
/// Token counts are taken over idiom-rewritten streams: a matched span contributes
/// one occurrence of its idiom token and none of its constituent words.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupCounts {
    labels: GroupLabels,
    /// Canonical key with per-group count, in lexicon order; cumulative over variants.
    idiom_counts: Vec<(String, [u64; 2])>,
    /// Keyed by space-joined surface form.
    surface_counts: BTreeMap<String, [u64; 2]>,
    token_counts: HashMap<String, [u64; 2]>,
    group_totals: [u64; 2],
}

impl GroupCounts {
    pub fn empty(labels: GroupLabels, canonicals: &[String]) -> Self {
        GroupCounts {
            labels,
            idiom_counts: canonicals.iter().map(|c| (c.clone(), [0, 0])).collect(),
            surface_counts: BTreeMap::new(),
            token_counts: HashMap::new(),
            group_totals: [0, 0],
        }
    }

    fn add_token(&mut self, token: &str, group: usize, n: u64) {
        match self.token_counts.get_mut(token) {
            Some(c) => c[group] += n,
            None => {
                let mut c = [0, 0];
                c[group] = n;
                self.token_counts.insert(token.to_string(), c);
            }
        }
        self.group_totals[group] += n;
    }

    /// Adds another shard's counts; both must share labels and canonical list.
    pub fn merge(&mut self, other: &GroupCounts) {
        debug_assert_eq!(self.idiom_counts.len(), other.idiom_counts.len());
        for ((_, a), (_, b)) in self.idiom_counts.iter_mut().zip(&other.idiom_counts) {
            a[0] += b[0];
            a[1] += b[1];
        }
        for (k, v) in &other.surface_counts {
            let e = self.surface_counts.entry(k.clone()).or_default();
            e[0] += v[0];
            e[1] += v[1];
        }
        for (k, v) in &other.token_counts {
            let e = self.token_counts.entry(k.clone()).or_default();
            e[0] += v[0];
            e[1] += v[1];
        }
        self.group_totals[0] += other.group_totals[0];
        self.group_totals[1] += other.group_totals[1];
    }

    pub fn labels(&self) -> &GroupLabels {
        &self.labels
    }

    /// (canonical, per-group count) in lexicon order.
    pub fn idiom_counts(&self) -> &[(String, [u64; 2])] {
        &self.idiom_counts
    }

    pub fn idiom_count(&self, canonical: &str) -> Option<[u64; 2]> {
        self.idiom_counts
            .iter()
            .find(|(c, _)| c == canonical)
            .map(|(_, n)| *n)
    }

    /// Total idiom instances per group.
    pub fn idiom_totals(&self) -> [u64; 2] {
        self.idiom_counts.iter().fold([0, 0], |acc, (_, n)| {
            [acc[0] + n[0], acc[1] + n[1]]
        })
    }

    /// Combined-group occurrences of a surface form.
    pub fn surface_total(&self, tokens: &[String]) -> u64 {
        self.surface_counts
            .get(&tokens.join(" "))
            .map_or(0, |c| c[0] + c[1])
    }

    pub fn token_count(&self, token: &str) -> [u64; 2] {
        self.token_counts.get(token).copied().unwrap_or([0, 0])
    }

    /// One group's token counts.
    pub fn group_token_counts(&self, group: usize) -> HashMap<String, u64> {
        self.token_counts
            .iter()
            .filter(|(_, c)| c[group] > 0)
            .map(|(t, c)| (t.clone(), c[group]))
            .collect()
    }

    /// Token counts summed over both groups.
    pub fn combined_token_counts(&self) -> HashMap<String, u64> {
        self.token_counts
            .iter()
            .map(|(t, c)| (t.clone(), c[0] + c[1]))
            .collect()
    }

    pub fn group_totals(&self) -> [u64; 2] {
        self.group_totals
    }

    /// Overwrites one idiom's counts, for hand-built fixtures.
    #[cfg(test)]
    pub(crate) fn set_idiom_count(&mut self, canonical: &str, n: [u64; 2]) {
        let slot = self.idiom_counts.iter_mut().find(|(c, _)| c == canonical).expect("known canonical");
        slot.1 = n;
    }

    /// Writes `canonical,group,count` rows in lexicon order.
    pub fn write_idiom_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["canonical", "group", "count"])?;
        for (c, n) in &self.idiom_counts {
            for g in 0..2 {
                w.write_record([c.as_str(), self.labels.label(g), &n[g].to_string()])?;
            }
        }
        write_csv(path.as_ref(), w)
    }

    /// Writes `token,group,count` rows sorted by token.
    pub fn write_token_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut rows: Vec<_> = self.token_counts.iter().collect();
        rows.sort_by(|a, b| a.0.cmp(b.0));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["token", "group", "count"])?;
        for (t, n) in rows {
            for g in 0..2 {
                if n[g] > 0 {
                    w.write_record([t.as_str(), self.labels.label(g), &n[g].to_string()])?;
                }
            }
        }
        write_csv(path.as_ref(), w)
    }
}

pub(crate) fn write_csv(path: &Path, w: csv::Writer<Vec<u8>>) -> Result<()> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
