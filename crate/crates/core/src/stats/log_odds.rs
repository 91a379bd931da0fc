use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::Serialize;

use crate::lexicon::IdiomEntry;
use crate::matcher::write_csv;
use crate::{Error, Result};

/// Log-odds score of one token.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GScore {
    /// Log-odds ratio, positive when the token leans towards the first corpus.
    pub delta: f64,
    pub sigma: f64,
    /// `delta / sigma`.
    pub z: f64,
}

/// Per-token log-odds scores.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GScoreTable {
    records: BTreeMap<String, GScore>,
    /// Total prior mass (alpha_0).
    pub prior_total: f64,
}

impl GScoreTable {
    pub fn get(&self, token: &str) -> Option<&GScore> {
        self.records.get(token)
    }

    /// The token's association score (its z).
    pub fn score(&self, token: &str) -> Option<f64> {
        self.records.get(token).map(|r| r.z)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in token order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &GScore)> + '_ {
        self.records.iter().map(|(t, r)| (t.as_str(), r))
    }

    /// Writes `token,delta,sigma,z` rows in token order.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["token", "delta", "sigma", "z"])?;
        for (t, r) in &self.records {
            w.write_record([
                t.clone(),
                r.delta.to_string(),
                r.sigma.to_string(),
                r.z.to_string(),
            ])?;
        }
        write_csv(path.as_ref(), w)
    }
}

/// Log-odds ratio with an informative Dirichlet prior.
///
/// For every token seen in either corpus:
///
/// ```text
/// delta = ln((ya + aw) / (na + a0 - ya - aw)) - ln((yb + aw) / (nb + a0 - yb - aw))
/// sigma^2 = 1 / (ya + aw) + 1 / (yb + aw)
/// ```
///
/// with `aw` the token's prior count and `a0` the total prior mass. Every scored
/// token needs a strictly positive prior.
pub fn log_odds_dirichlet(
    counts_a: &HashMap<String, f64>,
    counts_b: &HashMap<String, f64>,
    prior: &HashMap<String, f64>,
) -> Result<GScoreTable> {
    let prior_total: f64 = prior.values().sum();
    if !(prior_total > 0.0 && prior_total.is_finite()) {
        return Err(Error::InvalidArgument("prior mass must be positive".into()));
    }
    let n_a: f64 = counts_a.values().sum();
    let n_b: f64 = counts_b.values().sum();
    let tokens: BTreeSet<&String> = counts_a.keys().chain(counts_b.keys()).collect();
    let mut records = BTreeMap::new();
    for t in tokens {
        let alpha = match prior.get(t) {
            Some(&a) if a > 0.0 => a,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "prior for `{t}` must be positive"
                )))
            }
        };
        let y_a = counts_a.get(t).copied().unwrap_or(0.0);
        let y_b = counts_b.get(t).copied().unwrap_or(0.0);
        let rest_a = n_a + prior_total - y_a - alpha;
        let rest_b = n_b + prior_total - y_b - alpha;
        if rest_a <= 0.0 || rest_b <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "`{t}` takes all prior and corpus mass; log-odds undefined"
            )));
        }
        let delta = ((y_a + alpha) / rest_a).ln() - ((y_b + alpha) / rest_b).ln();
        let sigma = (1.0 / (y_a + alpha) + 1.0 / (y_b + alpha)).sqrt();
        records.insert(
            t.clone(),
            GScore {
                delta,
                sigma,
                z: delta / sigma,
            },
        );
    }
    Ok(GScoreTable {
        records,
        prior_total,
    })
}

fn mean_word_score<'a>(words: impl Iterator<Item = &'a String>, table: &GScoreTable) -> Option<f64> {
    let mut seen = BTreeSet::new();
    let (mut sum, mut n) = (0.0, 0usize);
    for w in words {
        if !seen.insert(w) {
            continue;
        }
        if let Some(s) = table.score(w) {
            sum += s;
            n += 1;
        }
    }
    (n > 0).then(|| sum / n as f64)
}

/// Mean word score over the distinct words of the canonical form that the table
/// knows.
pub fn gscore_surface(entry: &IdiomEntry, table: &GScoreTable) -> Result<f64> {
    mean_word_score(entry.canonical.iter(), table).ok_or_else(|| {
        Error::InsufficientData(format!("no surface word of `{}` is scored", entry.key()))
    })
}

/// Mean word score over the distinct words of the definition.
pub fn gscore_definition(entry: &IdiomEntry, table: &GScoreTable) -> Result<f64> {
    mean_word_score(entry.definition.iter(), table).ok_or_else(|| {
        Error::InsufficientData(format!("no definition word of `{}` is scored", entry.key()))
    })
}
