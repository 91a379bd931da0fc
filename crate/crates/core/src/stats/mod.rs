//! Closed-form statistics: usage distributions and Jensen-Shannon divergence with a
//! random-split baseline, log-odds with an informative Dirichlet prior, rank tests,
//! Cohen's d, rank-biased overlap and kernel density estimates.

mod divergence;
mod kde;
mod log_odds;
mod rank;
mod rbo;

use serde::Serialize;

pub use divergence::{
    derive_seed, jsd, usage_distribution, divergence_gap_test, DivergenceReport, Distribution,
};
pub use kde::{kde, silverman_bandwidth, KdeCurve, KDE_GRID_POINTS};
pub use log_odds::{gscore_definition, gscore_surface, log_odds_dirichlet, GScore, GScoreTable};
pub use rank::{
    average_ranks, cohens_d, pearson, ranksum_exact, ranksum_normal, spearman, wilcoxon_ranksum,
    EXACT_RANKSUM_LIMIT,
};
pub use rbo::sim_rbo;

/// Outcome of a hypothesis test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub effect_size: Option<f64>,
    pub n_a: usize,
    pub n_b: usize,
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with an n-1 denominator.
pub(crate) fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}
