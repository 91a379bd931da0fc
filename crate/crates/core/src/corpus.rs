//! Group-labelled posts: loading, tokenization, balancing and random halves.

use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use regex::Regex;
use serde::Deserialize;

use crate::{Error, Result};

/// Ordered sequence of lowercase, non-empty tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn new(tokens: Vec<String>) -> Self {
        debug_assert!(tokens.iter().all(|t| !t.is_empty()));
        TokenSeq(tokens)
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn join(&self, sep: &str) -> String {
        self.0.join(sep)
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenSeq(iter.into_iter().map(Into::into).collect())
    }
}

impl std::ops::Deref for TokenSeq {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

fn url_pattern() -> &'static Regex {
    static URL: OnceLock<Regex> = OnceLock::new();
    URL.get_or_init(|| Regex::new(r"(?i)\b(?:https?://|ftp://|www\.)\S*").unwrap())
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}')
}

/// Lowercases `text`, drops URLs and splits on anything that is not alphanumeric.
///
/// Apostrophes survive only between two alphanumeric characters, so `one's` and
/// `don't` stay single tokens while quoting apostrophes are stripped.
pub fn tokenize(text: &str) -> TokenSeq {
    let text = url_pattern().replace_all(text, " ");
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase().filter(|l| l.is_alphanumeric()));
        } else if is_apostrophe(c)
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
        {
            current.push('\'');
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    TokenSeq(tokens)
}

/// The two group labels declared for a run, in order.
///
/// Index 0 is the "first" group throughout the crate; signed scores favour it when
/// positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupLabels([String; 2]);

impl GroupLabels {
    pub fn new(first: impl Into<String>, second: impl Into<String>) -> Result<Self> {
        let (first, second) = (first.into(), second.into());
        if first.is_empty() || second.is_empty() {
            return Err(Error::InvalidArgument("group labels must be non-empty".into()));
        }
        if first == second {
            return Err(Error::InvalidArgument(format!(
                "group labels must be distinct, got `{first}` twice"
            )));
        }
        Ok(GroupLabels([first, second]))
    }

    /// Parses `"F,M"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [a, b] => GroupLabels::new(*a, *b),
            _ => Err(Error::InvalidArgument(format!(
                "expected two comma-separated group labels, got `{spec}`"
            ))),
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.iter().position(|l| l == label)
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownGroup(label.to_string()))
    }

    pub fn label(&self, index: usize) -> &str {
        &self.0[index]
    }

    pub fn as_array(&self) -> &[String; 2] {
        &self.0
    }
}

impl Default for GroupLabels {
    fn default() -> Self {
        GroupLabels(["F".to_string(), "M".to_string()])
    }
}

impl fmt::Display for GroupLabels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0[0], self.0[1])
    }
}

/// A single document.
#[derive(Debug, Clone, PartialEq)]
pub struct Post {
    pub author_id: String,
    /// Index into the corpus' [`GroupLabels`].
    pub group: usize,
    pub subreddit: Option<String>,
    pub text: String,
    pub tokens: TokenSeq,
}

impl Post {
    pub fn new(author_id: impl Into<String>, group: usize, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Post {
            author_id: author_id.into(),
            group,
            subreddit: None,
            text,
            tokens,
        }
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }
}

/// Per-group post and token totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Totals {
    pub posts: [usize; 2],
    pub tokens: [usize; 2],
}

/// An immutable, ordered collection of posts from two groups.
#[derive(Debug, Clone)]
pub struct Corpus {
    posts: Vec<Arc<Post>>,
    labels: GroupLabels,
    totals: Totals,
}

#[derive(Deserialize)]
struct PostRecord {
    author_id: String,
    group: String,
    text: String,
    #[serde(default)]
    subreddit: Option<String>,
}

impl Corpus {
    pub fn new(labels: GroupLabels, posts: Vec<Post>) -> Result<Self> {
        Self::from_shared(labels, posts.into_iter().map(Arc::new).collect())
    }

    fn from_shared(labels: GroupLabels, posts: Vec<Arc<Post>>) -> Result<Self> {
        let mut totals = Totals::default();
        for p in &posts {
            if p.group > 1 {
                return Err(Error::InvalidArgument(format!(
                    "post group index {} out of range",
                    p.group
                )));
            }
            totals.posts[p.group] += 1;
            totals.tokens[p.group] += p.token_count();
        }
        Ok(Corpus {
            posts,
            labels,
            totals,
        })
    }

    /// Reads the JSON-lines corpus format. Blank lines and lines starting with `#`
    /// are skipped; every other line must be an object with `author_id`, `group`
    /// and `text`.
    pub fn load(path: impl AsRef<Path>, labels: &GroupLabels) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let lines: Vec<(usize, &str)> = raw
            .lines()
            .enumerate()
            .filter(|(_, l)| {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            })
            .collect();
        let posts = lines
            .par_iter()
            .map(|&(i, line)| {
                let rec: PostRecord = serde_json::from_str(line)
                    .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
                let group = labels.require(&rec.group)?;
                let mut post = Post::new(rec.author_id, group, rec.text);
                post.subreddit = rec.subreddit;
                Ok(Arc::new(post))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_shared(labels.clone(), posts)
    }

    pub fn posts(&self) -> impl ExactSizeIterator<Item = &Post> + '_ {
        self.posts.iter().map(|p| p.as_ref())
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    pub fn labels(&self) -> &GroupLabels {
        &self.labels
    }

    pub fn totals(&self) -> Totals {
        self.totals
    }

    /// Posts of one group, in corpus order.
    pub fn group_posts(&self, group: usize) -> impl Iterator<Item = &Post> + '_ {
        self.posts().filter(move |p| p.group == group)
    }

    /// A corpus holding only `group`'s posts.
    pub fn restrict_to(&self, group: usize) -> Corpus {
        let posts = self
            .posts
            .iter()
            .filter(|p| p.group == group)
            .cloned()
            .collect();
        Self::from_shared(self.labels.clone(), posts).expect("group indices already validated")
    }

    fn select(&self, keep: impl Fn(usize) -> bool) -> Corpus {
        let posts = self
            .posts
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, p)| Arc::clone(p))
            .collect();
        Self::from_shared(self.labels.clone(), posts).expect("group indices already validated")
    }

    /// Randomly drops whole posts from the group with more tokens.
    ///
    /// Candidates are visited in a seeded random order and dropped whenever doing so
    /// keeps the larger group at or above the smaller group's token total. The
    /// residual gap is therefore smaller than any kept post of the larger group.
    pub fn balance_groups(&self, seed: u64) -> Result<Corpus> {
        let [t0, t1] = self.totals.tokens;
        if self.totals.posts[0] == 0 || self.totals.posts[1] == 0 {
            return Err(Error::InsufficientData(
                "balancing needs posts from both groups".into(),
            ));
        }
        if t0 == t1 {
            return Ok(self.clone());
        }
        let (large, target) = if t0 > t1 { (0, t1) } else { (1, t0) };
        let mut candidates: Vec<usize> = self
            .posts
            .iter()
            .enumerate()
            .filter(|(_, p)| p.group == large && p.token_count() > 0)
            .map(|(i, _)| i)
            .collect();
        candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

        let mut removed = vec![false; self.posts.len()];
        let mut total = self.totals.tokens[large];
        for i in candidates {
            let len = self.posts[i].token_count();
            if total - len >= target {
                removed[i] = true;
                total -= len;
                if total == target {
                    break;
                }
            }
        }
        Ok(self.select(|i| !removed[i]))
    }

    /// Seeded partition of `group`'s posts (as corpus indices) into two halves with
    /// near-equal token totals: posts are shuffled, then each goes to the half with
    /// fewer tokens so far.
    pub fn split_indices(&self, group: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
        let mut members: Vec<usize> = self
            .posts
            .iter()
            .enumerate()
            .filter(|(_, p)| p.group == group)
            .map(|(i, _)| i)
            .collect();
        if members.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "group {} has {} post(s); splitting needs at least 2",
                self.labels.label(group),
                members.len()
            )));
        }
        members.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut halves: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        let mut sums = [0usize; 2];
        for i in members {
            // an empty half takes the next post so both halves end up non-empty
            let side = if halves[0].is_empty() {
                0
            } else if halves[1].is_empty() {
                1
            } else {
                usize::from(sums[1] < sums[0])
            };
            sums[side] += self.posts[i].token_count();
            halves[side].push(i);
        }
        let [mut a, mut b] = halves;
        a.sort_unstable();
        b.sort_unstable();
        Ok((a, b))
    }

    /// Splits one group's posts into two disjoint halves of near-equal token totals.
    pub fn random_halves(&self, group: &str, seed: u64) -> Result<(Corpus, Corpus)> {
        let g = self.labels.require(group)?;
        let (a, b) = self.split_indices(g, seed)?;
        let mut side = vec![None; self.posts.len()];
        for &i in &a {
            side[i] = Some(0);
        }
        for &i in &b {
            side[i] = Some(1);
        }
        Ok((
            self.select(|i| side[i] == Some(0)),
            self.select(|i| side[i] == Some(1)),
        ))
    }
}
