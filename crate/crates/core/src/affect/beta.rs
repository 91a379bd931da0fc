//! Maximum-likelihood beta regression with a logit mean link.
//!
//! Parameters are `(b_0, b_1, ..., b_p, ln phi)`. The objective is the mean
//! per-row log-likelihood; ascent steps follow the gradient preconditioned by the
//! expected information matrix, with Armijo backtracking so every accepted step
//! increases the likelihood.

use statrs::function::gamma::{digamma, ln_gamma};

use crate::{Error, Result};

/// Targets are clamped into `[TARGET_EPS, 1 - TARGET_EPS]` before fitting.
pub const TARGET_EPS: f64 = 1e-4;
pub const MAX_ITERATIONS: usize = 500;
pub const GRADIENT_TOLERANCE: f64 = 1e-6;
/// Upper bound on the precision; reached only when targets have (almost) no
/// spread around the fitted mean.
pub const MAX_PRECISION: f64 = 1e8;
const MIN_PRECISION: f64 = 1e-3;
const ARMIJO: f64 = 1e-4;

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Polygamma of order one.
pub(crate) fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let f = 1.0 / (x * x);
    acc + 1.0 / x
        + f / 2.0
        + f / x * (1.0 / 6.0 - f * (1.0 / 30.0 - f * (1.0 / 42.0 - f / 30.0)))
}

fn clamp_target(y: f64) -> f64 {
    y.clamp(TARGET_EPS, 1.0 - TARGET_EPS)
}

fn clamp_mean(mu: f64) -> f64 {
    mu.clamp(1e-12, 1.0 - 1e-12)
}

fn linear_predictor(params: &[f64], x: &[f64]) -> f64 {
    params[0] + params[1..=x.len()].iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
}

/// Training data with targets already clamped.
#[derive(Debug, Clone)]
pub struct BetaData<'a> {
    features: &'a [Vec<f64>],
    targets: Vec<f64>,
    dim: usize,
}

impl<'a> BetaData<'a> {
    pub fn new(features: &'a [Vec<f64>], targets: &[f64]) -> Result<Self> {
        if features.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: features.len(),
                actual: targets.len(),
            });
        }
        let dim = features.first().map_or(0, Vec::len);
        for row in features {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("non-finite feature value".into()));
            }
        }
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("non-finite target".into()));
        }
        Ok(BetaData {
            features,
            targets: targets.iter().map(|&y| clamp_target(y)).collect(),
            dim,
        })
    }

    /// Number of parameters: intercept, one slope per feature, log precision.
    pub fn n_params(&self) -> usize {
        self.dim + 2
    }

    /// Mean log-likelihood at `params`.
    pub fn log_likelihood(&self, params: &[f64]) -> f64 {
        let phi = params[self.dim + 1].exp();
        let lg_phi = ln_gamma(phi);
        let total: f64 = self
            .features
            .iter()
            .zip(&self.targets)
            .map(|(x, &y)| {
                let mu = clamp_mean(sigmoid(linear_predictor(params, x)));
                let (a, b) = (mu * phi, (1.0 - mu) * phi);
                lg_phi - ln_gamma(a) - ln_gamma(b) + (a - 1.0) * y.ln() + (b - 1.0) * (1.0 - y).ln()
            })
            .sum();
        total / self.targets.len() as f64
    }

    /// Analytic gradient of [`Self::log_likelihood`].
    pub fn gradient(&self, params: &[f64]) -> Vec<f64> {
        let p = self.dim;
        let phi = params[p + 1].exp();
        let dg_phi = digamma(phi);
        let mut g = vec![0.0; p + 2];
        for (x, &y) in self.features.iter().zip(&self.targets) {
            let mu = clamp_mean(sigmoid(linear_predictor(params, x)));
            let (a, b) = (mu * phi, (1.0 - mu) * phi);
            let (dg_a, dg_b) = (digamma(a), digamma(b));
            let y_star = y.ln() - (1.0 - y).ln();
            let mu_star = dg_a - dg_b;
            let d_eta = phi * (y_star - mu_star) * mu * (1.0 - mu);
            g[0] += d_eta;
            for (gj, xj) in g[1..=p].iter_mut().zip(x) {
                *gj += d_eta * xj;
            }
            let d_phi = mu * (y_star - mu_star) + (1.0 - y).ln() - dg_b + dg_phi;
            g[p + 1] += d_phi * phi;
        }
        let n = self.targets.len() as f64;
        g.iter_mut().for_each(|v| *v /= n);
        g
    }

    /// Expected information (mean per row), row-major `n_params x n_params`.
    fn information(&self, params: &[f64]) -> Vec<f64> {
        let p = self.dim;
        let k = p + 2;
        let phi = params[p + 1].exp();
        let tg_phi = trigamma(phi);
        let mut info = vec![0.0; k * k];
        let mut xs = vec![0.0; p + 1];
        for x in self.features {
            xs[0] = 1.0;
            xs[1..].copy_from_slice(x);
            let mu = clamp_mean(sigmoid(linear_predictor(params, x)));
            let m = mu * (1.0 - mu);
            let (ta, tb) = (trigamma(mu * phi), trigamma((1.0 - mu) * phi));
            let w_bb = phi * phi * (ta + tb) * m * m;
            let w_bt = phi * phi * (ta * mu - tb * (1.0 - mu)) * m;
            let w_tt = phi * phi * (ta * mu * mu + tb * (1.0 - mu) * (1.0 - mu) - tg_phi);
            for i in 0..=p {
                for j in 0..=i {
                    info[i * k + j] += w_bb * xs[i] * xs[j];
                }
                info[(p + 1) * k + i] += w_bt * xs[i];
            }
            info[(p + 1) * k + p + 1] += w_tt;
        }
        let n = self.targets.len() as f64;
        for i in 0..k {
            for j in 0..=i {
                let v = info[i * k + j] / n;
                info[i * k + j] = v;
                info[j * k + i] = v;
            }
        }
        info
    }
}

/// Solves `a x = b` for symmetric positive-definite `a` by Cholesky factorization.
fn cholesky_solve(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            if i == j {
                let d = a[i * n + i] - s;
                if !(d > 0.0) || !d.is_finite() {
                    return None;
                }
                l[i * n + i] = d.sqrt();
            } else {
                l[i * n + j] = (a[i * n + j] - s) / l[j * n + j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
        y[i] = (b[i] - s) / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i * n + i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Result of a beta-regression fit.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaFit {
    /// Intercept first.
    pub coefficients: Vec<f64>,
    pub precision: f64,
    pub iterations: usize,
    /// Max-norm of the (bound-projected) gradient at the solution.
    pub gradient_norm: f64,
    /// Mean log-likelihood at the solution.
    pub log_likelihood: f64,
    /// Mean log-likelihood at the start and after every accepted step.
    pub trace: Vec<f64>,
}

/// Gradient with the log-precision component zeroed when it pushes against a bound.
fn projected(mut g: Vec<f64>, params: &[f64]) -> Vec<f64> {
    let t = params.len() - 1;
    let (lo, hi) = (MIN_PRECISION.ln(), MAX_PRECISION.ln());
    if (params[t] >= hi && g[t] > 0.0) || (params[t] <= lo && g[t] < 0.0) {
        g[t] = 0.0;
    }
    g
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Fits `y ~ Beta(mu * phi, (1 - mu) * phi)` with `logit(mu) = b_0 + x . b`.
pub fn fit_beta_regression(features: &[Vec<f64>], targets: &[f64]) -> Result<BetaFit> {
    let data = BetaData::new(features, targets)?;
    let k = data.n_params();
    if targets.len() < k {
        return Err(Error::InsufficientData(format!(
            "beta regression with {} features needs at least {k} rows, got {}",
            data.dim,
            targets.len()
        )));
    }
    let (lo, hi) = (MIN_PRECISION.ln(), MAX_PRECISION.ln());

    let n = data.targets.len() as f64;
    let ybar = data.targets.iter().sum::<f64>() / n;
    let yvar = data.targets.iter().map(|y| (y - ybar).powi(2)).sum::<f64>() / n;
    let phi0 = if yvar > 0.0 {
        ybar * (1.0 - ybar) / yvar - 1.0
    } else {
        MAX_PRECISION
    };
    let mut params = vec![0.0; k];
    params[0] = logit(ybar);
    params[k - 1] = phi0.clamp(MIN_PRECISION, MAX_PRECISION).ln();

    let mut ll = data.log_likelihood(&params);
    let mut trace = vec![ll];
    let mut iterations = 0;
    loop {
        let grad = projected(data.gradient(&params), &params);
        let gnorm = max_norm(&grad);
        if gnorm < GRADIENT_TOLERANCE {
            return Ok(BetaFit {
                coefficients: params[..k - 1].to_vec(),
                precision: params[k - 1].exp().clamp(MIN_PRECISION, MAX_PRECISION),
                iterations,
                gradient_norm: gnorm,
                log_likelihood: ll,
                trace,
            });
        }
        if iterations == MAX_ITERATIONS {
            return Err(Error::NoConvergence {
                iterations,
                gradient_norm: gnorm,
            });
        }
        iterations += 1;

        let direction = cholesky_solve(&data.information(&params), &grad)
            .filter(|d| d.iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>() > 0.0)
            .unwrap_or_else(|| grad.clone());
        let slope: f64 = direction.iter().zip(&grad).map(|(a, b)| a * b).sum();

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial: Vec<f64> = params
                .iter()
                .zip(&direction)
                .map(|(p, d)| p + step * d)
                .collect();
            trial[k - 1] = trial[k - 1].clamp(lo, hi);
            let trial_ll = data.log_likelihood(&trial);
            if trial_ll.is_finite() && trial_ll >= ll + ARMIJO * step * slope {
                accepted = Some((trial, trial_ll));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((p, l)) => {
                params = p;
                ll = l;
                trace.push(ll);
            }
            None => {
                return Err(Error::NoConvergence {
                    iterations,
                    gradient_norm: gnorm,
                })
            }
        }
    }
}
