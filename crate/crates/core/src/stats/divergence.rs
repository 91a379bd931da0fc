use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{mean, variance, TestResult};
use crate::corpus::Corpus;
use crate::matcher::{GroupCounts, Matcher};
use crate::{Error, Result};

/// A probability distribution over an ordered idiom list.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub support: Vec<String>,
    pub probs: Vec<f64>,
}

impl Distribution {
    /// Normalizes nonnegative weights over `support`.
    pub fn from_counts(support: Vec<String>, counts: &[f64]) -> Result<Self> {
        if support.len() != counts.len() {
            return Err(Error::SupportMismatch);
        }
        if counts.iter().any(|c| !(*c >= 0.0 && c.is_finite())) {
            return Err(Error::InvalidArgument("counts must be finite and nonnegative".into()));
        }
        let total: f64 = counts.iter().sum();
        if total <= 0.0 {
            return Err(Error::InsufficientData("zero total count".into()));
        }
        Ok(Distribution {
            support,
            probs: counts.iter().map(|c| c / total).collect(),
        })
    }
}

/// One group's idiom usage as a distribution over the lexicon's canonical list.
pub fn usage_distribution(counts: &GroupCounts, group: &str) -> Result<Distribution> {
    let g = counts.labels().require(group)?;
    let (support, weights): (Vec<String>, Vec<f64>) = counts
        .idiom_counts()
        .iter()
        .map(|(c, n)| (c.clone(), n[g] as f64))
        .unzip();
    Distribution::from_counts(support, &weights).map_err(|e| match e {
        Error::InsufficientData(_) => {
            Error::InsufficientData(format!("group {group} has no idiom usages"))
        }
        e => e,
    })
}

fn kl_to_mixture(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| pi * (2.0 * pi / (pi + qi)).log2())
        .sum()
}

fn jsd_probs(p: &[f64], q: &[f64]) -> f64 {
    (0.5 * kl_to_mixture(p, q) + 0.5 * kl_to_mixture(q, p)).clamp(0.0, 1.0)
}

/// Jensen-Shannon divergence in bits, so it lies in [0, 1].
pub fn jsd(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.support != q.support {
        return Err(Error::SupportMismatch);
    }
    Ok(jsd_probs(&p.probs, &q.probs))
}

/// Mixes a master seed with a stream and an index (splitmix64 finalizer), so each
/// split gets an independent, reproducible seed.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut z = master
        ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03)
        ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Cross-group JSD against within-group random-split baselines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub groups: [String; 2],
    pub cross_jsd: f64,
    pub baseline_mean: [f64; 2],
    pub baseline_sd: [f64; 2],
    pub baseline_max: [f64; 2],
    /// Per group, `(r + 1) / (n_splits + 1)` with `r` baseline values at or above
    /// the cross-group JSD.
    pub p_empirical: [f64; 2],
    /// The larger of the two empirical p-values.
    pub p_value: f64,
    /// Standardized cross-group JSD under a normal fit to the pooled baseline;
    /// absent when the baseline has no spread.
    pub z: Option<f64>,
    /// Upper-tail normal p-value for `z`.
    pub p_normal: Option<f64>,
    pub n_splits: usize,
    pub seed: u64,
    pub log_base: u32,
    #[serde(skip)]
    pub baselines: [Vec<f64>; 2],
}

impl DivergenceReport {
    pub fn test_result(&self) -> TestResult {
        TestResult {
            statistic: self.cross_jsd,
            p_value: self.p_value,
            effect_size: self.z,
            n_a: self.n_splits,
            n_b: self.n_splits,
        }
    }
}

/// Compares the JSD between the two groups' idiom distributions with the JSDs of
/// `n_splits` random halvings of each group.
///
/// Split `s` of group `g` uses `derive_seed(seed, g, s)`; splits run in parallel.
pub fn divergence_gap_test(
    corpus: &Corpus,
    matcher: &Matcher,
    n_splits: usize,
    seed: u64,
) -> Result<DivergenceReport> {
    if n_splits < 2 {
        return Err(Error::InvalidArgument(format!(
            "n_splits must be at least 2, got {n_splits}"
        )));
    }
    let support: Vec<String> = matcher.canonicals().to_vec();
    let index: std::collections::HashMap<&str, usize> = support
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let per_post: Vec<Vec<usize>> = corpus
        .posts()
        .map(|p| {
            matcher
                .find_matches(&p.tokens)
                .iter()
                .map(|m| index[m.canonical.as_str()])
                .collect()
        })
        .collect();
    let tally = |posts: &mut dyn Iterator<Item = usize>| {
        let mut c = vec![0.0; support.len()];
        for i in posts {
            for &k in &per_post[i] {
                c[k] += 1.0;
            }
        }
        c
    };
    let labels = corpus.labels();
    let group_members = |g: usize| {
        corpus
            .posts()
            .enumerate()
            .filter(move |(_, p)| p.group == g)
            .map(|(i, _)| i)
    };
    let dist = |c: &[f64], what: &str| {
        Distribution::from_counts(support.clone(), c)
            .map_err(|_| Error::InsufficientData(format!("{what} has no idiom usages")))
    };
    let full: Vec<Distribution> = (0..2)
        .map(|g| dist(&tally(&mut group_members(g)), &format!("group {}", labels.label(g))))
        .collect::<Result<_>>()?;
    let cross_jsd = jsd(&full[0], &full[1])?;

    let mut baselines: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (g, slot) in baselines.iter_mut().enumerate() {
        *slot = (0..n_splits)
            .into_par_iter()
            .map(|s| {
                let (a, b) = corpus.split_indices(g, derive_seed(seed, g as u64, s as u64))?;
                let what = format!("a half of group {}", labels.label(g));
                let pa = dist(&tally(&mut a.into_iter()), &what)?;
                let pb = dist(&tally(&mut b.into_iter()), &what)?;
                jsd(&pa, &pb)
            })
            .collect::<Result<Vec<f64>>>()?;
    }

    let stat = |f: &dyn Fn(&[f64]) -> f64| [f(&baselines[0]), f(&baselines[1])];
    let baseline_mean = stat(&mean);
    let baseline_sd = stat(&|x| variance(x).sqrt());
    let baseline_max = stat(&|x| x.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let p_empirical = stat(&|x| {
        let r = x.iter().filter(|&&b| b >= cross_jsd).count();
        (r + 1) as f64 / (x.len() + 1) as f64
    });
    let pooled: Vec<f64> = baselines.iter().flatten().copied().collect();
    let pooled_sd = variance(&pooled).sqrt();
    let z = (pooled_sd > 0.0).then(|| (cross_jsd - mean(&pooled)) / pooled_sd);
    let p_normal = z.map(|z| Normal::standard().sf(z));

    Ok(DivergenceReport {
        groups: labels.as_array().clone(),
        cross_jsd,
        baseline_mean,
        baseline_sd,
        baseline_max,
        p_value: p_empirical[0].max(p_empirical[1]),
        p_empirical,
        z,
        p_normal,
        n_splits,
        seed,
        log_base: 2,
        baselines,
    })
}
