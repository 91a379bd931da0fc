use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use super::{mean, variance, TestResult};
use crate::{Error, Result};

/// Pooled sample size up to which [`wilcoxon_ranksum`] enumerates exactly.
pub const EXACT_RANKSUM_LIMIT: usize = 12;

/// 1-based ranks, ties sharing the average of the ranks they span.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData("correlation needs two points".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InvalidArgument("correlation of a constant series".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation with a two-sided p-value from the t approximation
/// on n - 2 degrees of freedom.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<TestResult> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "spearman needs at least 3 pairs, got {n}"
        )));
    }
    let rho = pearson(&average_ranks(x), &average_ranks(y))?;
    let p_value = if rho.abs() >= 1.0 {
        0.0
    } else {
        let df = (n - 2) as f64;
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("df is positive");
        (2.0 * dist.sf(t.abs())).min(1.0)
    };
    Ok(TestResult {
        statistic: rho,
        p_value,
        effect_size: None,
        n_a: n,
        n_b: n,
    })
}

fn check_samples(x: &[f64], y: &[f64]) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InsufficientData("rank-sum test needs two non-empty samples".into()));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("NaN in rank-sum sample".into()));
    }
    Ok(())
}

/// Rank sum of `x` within the pooled sample, plus the pooled ranks.
fn rank_sum(x: &[f64], y: &[f64]) -> (f64, Vec<f64>) {
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let ranks = average_ranks(&pooled);
    (ranks[..x.len()].iter().sum(), ranks)
}

/// Two-sided Wilcoxon rank-sum test; exact when the pooled sample has at most
/// [`EXACT_RANKSUM_LIMIT`] values, normal approximation otherwise.
pub fn wilcoxon_ranksum(x: &[f64], y: &[f64]) -> Result<TestResult> {
    if x.len() + y.len() <= EXACT_RANKSUM_LIMIT {
        ranksum_exact(x, y)
    } else {
        ranksum_normal(x, y)
    }
}

/// Exact two-sided rank-sum p-value: the share of all ways to assign the pooled
/// ranks to `x` whose rank sum lies at least as far from its mean as observed.
pub fn ranksum_exact(x: &[f64], y: &[f64]) -> Result<TestResult> {
    check_samples(x, y)?;
    let (nx, n) = (x.len(), x.len() + y.len());
    if n > 2 * EXACT_RANKSUM_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "exact enumeration over {n} values is too large"
        )));
    }
    let (w, ranks) = rank_sum(x, y);
    let expected = nx as f64 * (n + 1) as f64 / 2.0;
    let observed = (w - expected).abs() - 1e-9;

    let (mut extreme, mut total) = (0u64, 0u64);
    let mut chosen: Vec<usize> = (0..nx).collect();
    loop {
        let s: f64 = chosen.iter().map(|&i| ranks[i]).sum();
        total += 1;
        if (s - expected).abs() >= observed {
            extreme += 1;
        }
        // next combination in lexicographic order
        let Some(i) = (0..nx).rev().find(|&i| chosen[i] < n - nx + i) else {
            break;
        };
        chosen[i] += 1;
        for j in i + 1..nx {
            chosen[j] = chosen[j - 1] + 1;
        }
    }
    Ok(TestResult {
        statistic: w,
        p_value: extreme as f64 / total as f64,
        effect_size: None,
        n_a: nx,
        n_b: y.len(),
    })
}

/// Normal approximation to the rank-sum test with tie and continuity corrections.
pub fn ranksum_normal(x: &[f64], y: &[f64]) -> Result<TestResult> {
    check_samples(x, y)?;
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let n = nx + ny;
    let (w, ranks) = rank_sum(x, y);
    let mut sorted = ranks.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let expected = nx * (n + 1.0) / 2.0;
    let var = if n > 1.0 {
        nx * ny / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)))
    } else {
        0.0
    };
    let p_value = if var <= 0.0 {
        1.0
    } else {
        let z = ((w - expected).abs() - 0.5).max(0.0) / var.sqrt();
        (2.0 * Normal::standard().sf(z)).min(1.0)
    };
    Ok(TestResult {
        statistic: w,
        p_value,
        effect_size: None,
        n_a: x.len(),
        n_b: y.len(),
    })
}

/// Standardized mean difference `(mean(x) - mean(y)) / s_pooled`.
pub fn cohens_d(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::InsufficientData(
            "Cohen's d needs at least two values per sample".into(),
        ));
    }
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let pooled =
        (((nx - 1.0) * variance(x) + (ny - 1.0) * variance(y)) / (nx + ny - 2.0)).sqrt();
    if pooled == 0.0 || !pooled.is_finite() {
        return Err(Error::InvalidArgument("zero pooled standard deviation".into()));
    }
    Ok((mean(x) - mean(y)) / pooled)
}
