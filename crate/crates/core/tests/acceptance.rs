//! Acceptance checks. Each test prints one `PASS`/`FAIL` line to stderr (uncaptured)
//! and fails when any of its checks does.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::Write as _;
use std::time::Instant;

use figlex::affect::{fit_beta_regression, predict_beta, BetaData, VadDimension, VadModel};
use figlex::corpus::{Corpus, GroupLabels, Post};
use figlex::embeddings::{train_sgns, train_sgns_with_report, TrainParams};
use figlex::lexicon::{IdiomEntry, Lexicon};
use figlex::matcher::Matcher;
use figlex::stats::{
    cohens_d, divergence_gap_test, jsd, log_odds_dirichlet, ranksum_exact, ranksum_normal,
    sim_rbo, spearman, Distribution,
};
use figlex::synth::{self, beta_regression_data, generate_corpus, SynthSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Collects named checks for one criterion.
struct Criterion {
    id: u32,
    name: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new(id: u32, name: &'static str) -> Self {
        Criterion { id, name, failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn finish(self) {
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        let detail = if self.failures.is_empty() { &self.notes } else { &self.failures };
        let line = format!(
            "{status} criterion {:>2} {}: {}",
            self.id,
            self.name,
            detail.join("; ")
        );
        // straight to the stream so the line shows even for passing tests
        let _ = writeln!(std::io::stderr(), "{line}");
        assert!(self.failures.is_empty(), "{line}");
    }
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn kl2(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a / b).log2())
        .sum()
}

#[test]
fn criterion_01_jsd_oracle() {
    let mut c = Criterion::new(1, "JSD oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=20);
        let (p, q) = (random_distribution(&mut rng, n), random_distribution(&mut rng, n));
        let support: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        let dp = Distribution::from_counts(support.clone(), &p).unwrap();
        let dq = Distribution::from_counts(support, &q).unwrap();
        let m: Vec<f64> = p.iter().zip(&q).map(|(a, b)| (a + b) / 2.0).collect();
        let oracle = 0.5 * kl2(&p, &m) + 0.5 * kl2(&q, &m);
        let (pq, qp) = (jsd(&dp, &dq).unwrap(), jsd(&dq, &dp).unwrap());
        worst = worst.max((pq - oracle).abs());
        c.check((0.0..=1.0).contains(&pq), format!("jsd {pq} outside [0,1]"));
        c.check(pq == qp, format!("asymmetric: {pq} vs {qp}"));
    }
    c.check(worst <= 1e-12, format!("max oracle deviation {worst:e} > 1e-12"));
    c.note(format!("200 pairs, max deviation {worst:.1e}"));
    c.finish();
}

fn counts(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn criterion_02_log_odds_oracle() {
    let mut c = Criterion::new(2, "log-odds oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let v = rng.random_range(2..=8);
        let words: Vec<String> = (0..v).map(|i| format!("w{i}")).collect();
        let draw = |rng: &mut ChaCha8Rng| -> HashMap<String, f64> {
            words.iter().map(|w| (w.clone(), rng.random_range(0..20) as f64)).collect()
        };
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let prior: HashMap<String, f64> =
            words.iter().map(|w| (w.clone(), rng.random_range(0.05..5.0))).collect();
        let (na, nb): (f64, f64) = (a.values().sum(), b.values().sum());
        let a0: f64 = prior.values().sum();
        let ab = log_odds_dirichlet(&a, &b, &prior).unwrap();
        let ba = log_odds_dirichlet(&b, &a, &prior).unwrap();
        for w in &words {
            let (ya, yb, aw) = (a[w], b[w], prior[w]);
            let delta = ((ya + aw) / (na + a0 - ya - aw)).ln() - ((yb + aw) / (nb + a0 - yb - aw)).ln();
            let sigma = (1.0 / (ya + aw) + 1.0 / (yb + aw)).sqrt();
            let g = ab.get(w).unwrap();
            worst = worst
                .max((g.delta - delta).abs())
                .max((g.sigma - sigma).abs())
                .max((g.z - delta / sigma).abs());
            let s = ba.get(w).unwrap();
            c.check(s.delta == -g.delta && s.z == -g.z, format!("swap not antisymmetric for {w}"));
        }
    }
    c.check(worst <= 1e-10, format!("max oracle deviation {worst:e} > 1e-10"));

    // y_a = 5 of 10, y_b = 1 of 10, prior 0.1 of 1.0
    let t = log_odds_dirichlet(
        &counts(&[("w", 5.0), ("x", 5.0)]),
        &counts(&[("w", 1.0), ("x", 9.0)]),
        &counts(&[("w", 0.1), ("x", 0.9)]),
    )
    .unwrap();
    let g = t.get("w").unwrap();
    let close = |x: f64, want: f64| (x - want).abs() < 5e-7;
    c.check(close(g.sigma, 1.051270), format!("worked example sigma {:.6} != 1.051270", g.sigma));
    c.check(
        close(g.delta, 2.051523) && close(g.z, 1.951470),
        format!(
            "worked example gives delta {:.6}, z {:.6}; expected delta 2.051523, z 1.951470 \
             (ln(5.1/5.9) - ln(1.1/9.9) = {:.7})",
            g.delta,
            g.z,
            (5.1f64 / 5.9).ln() - (1.1f64 / 9.9).ln()
        ),
    );
    c.note(format!(
        "100 fixtures, max deviation {worst:.1e}; worked example delta {:.6} z {:.6}",
        g.delta, g.z
    ));
    c.finish();
}

fn brute_rbo(a: &[u32], b: &[u32], depth: usize) -> f64 {
    (1..=depth)
        .map(|k| {
            let pa: BTreeSet<_> = a[..k].iter().collect();
            let pb: BTreeSet<_> = b[..k].iter().collect();
            pa.intersection(&pb).count() as f64 / k as f64
        })
        .sum::<f64>()
        / depth as f64
}

#[test]
fn criterion_03_sim_rbo() {
    let mut c = Criterion::new(3, "simRBO");
    let abc = ["a", "b", "c"];
    c.check(sim_rbo(&abc, &abc, 3).unwrap() == 1.0, "identical lists != 1");
    c.check(sim_rbo(&abc, &["x", "y", "z"], 3).unwrap() == 0.0, "disjoint lists != 0");
    let acb = sim_rbo(&abc, &["a", "c", "b"], 3).unwrap();
    c.check((acb - 0.833333).abs() <= 1e-6 && (acb - 2.5 / 3.0).abs() <= 1e-9, format!("[a,b,c]/[a,c,b] = {acb}"));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let depth = rng.random_range(1..=20);
        let mut a: Vec<u32> = (0..depth as u32 + 5).collect();
        let mut b = a.clone();
        a.shuffle(&mut rng);
        b.shuffle(&mut rng);
        worst = worst.max((sim_rbo(&a, &b, depth).unwrap() - brute_rbo(&a, &b, depth)).abs());
    }
    c.check(worst <= 1e-12, format!("max oracle deviation {worst:e} > 1e-12"));
    c.note(format!("[a,b,c]/[a,c,b] = {acb:.9}; 100 permutation pairs, max deviation {worst:.1e}"));
    c.finish();
}

#[test]
fn criterion_04_ranksum_normal_vs_exact() {
    let mut c = Criterion::new(4, "Wilcoxon rank-sum");
    let p = ranksum_exact(&[1.0, 2.0], &[3.0, 4.0]).unwrap().p_value;
    c.check((p - 1.0 / 3.0).abs() < 1e-12, format!("exact p for [1,2] vs [3,4] = {p}"));

    // every split of 1..=n into x and y, for all n <= 12
    let (mut worst, mut at) = (0.0f64, (0, 0));
    let mut pairs = 0usize;
    for n in 2..=12usize {
        for mask in 1..(1u32 << n) - 1 {
            let (x, y): (Vec<usize>, Vec<usize>) = (1..=n).partition(|&i| mask & (1 << (i - 1)) != 0);
            let x: Vec<f64> = x.into_iter().map(|v| v as f64).collect();
            let y: Vec<f64> = y.into_iter().map(|v| v as f64).collect();
            let gap = (ranksum_normal(&x, &y).unwrap().p_value - ranksum_exact(&x, &y).unwrap().p_value).abs();
            pairs += 1;
            if gap > worst {
                worst = gap;
                at = (x.len(), y.len());
            }
        }
    }
    c.check(
        worst <= 0.02,
        format!("normal approximation off by up to {worst:.4} (n_x={}, n_y={}) over {pairs} samples", at.0, at.1),
    );
    c.note(format!("{pairs} samples, max gap {worst:.4}"));
    c.finish();
}

#[test]
fn criterion_05_beta_regression() {
    let mut c = Criterion::new(5, "beta regression");
    let beta = [0.4, -0.8, 0.5, 0.25];
    let (x, y) = beta_regression_data(5000, &beta, 50.0, 5);
    let fit = fit_beta_regression(&x, &y).unwrap();
    let err = fit.coefficients.iter().zip(&beta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    c.check(err < 0.05, format!("|beta_hat - beta|_inf = {err:.4}"));
    c.check(fit.trace.windows(2).all(|w| w[1] >= w[0]), "log-likelihood decreased on an accepted step");

    let data = BetaData::new(&x[..300], &y[..300]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let params: Vec<f64> = (0..data.n_params())
            .map(|i| if i + 1 == data.n_params() { rng.random_range(1.0..4.0) } else { rng.random_range(-1.0..1.0) })
            .collect();
        let g = data.gradient(&params);
        for (i, gi) in g.iter().enumerate() {
            let h = 1e-5;
            let (mut up, mut down) = (params.clone(), params.clone());
            up[i] += h;
            down[i] -= h;
            let fd = (data.log_likelihood(&up) - data.log_likelihood(&down)) / (2.0 * h);
            worst = worst.max((gi - fd).abs() / fd.abs().max(gi.abs()).max(1e-8));
        }
    }
    c.check(worst < 1e-4, format!("gradient relative error {worst:e}"));

    let model = VadModel::from_fit(VadDimension::Valence, &fit, x.len());
    let mut inside = true;
    for scale in [0.0, 1.0, 10.0, 1e3, 1e6] {
        for row in x.iter().take(200) {
            let f: Vec<f64> = row.iter().map(|v| v * scale).collect();
            let p = predict_beta(&model, &f).unwrap();
            inside &= p > 0.0 && p < 1.0;
        }
    }
    c.check(inside, "a prediction left (0,1)");
    c.note(format!(
        "recovery error {err:.4}, {} iterations, gradient rel. error {worst:.1e}",
        fit.iterations
    ));
    c.finish();
}

#[test]
fn criterion_06_spearman_and_cohens_d() {
    let mut c = Criterion::new(6, "Spearman / Cohen's d");
    let rho = spearman(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 1.0, 4.0, 3.0, 5.0]).unwrap().statistic;
    c.check((rho - 0.8).abs() <= 1e-12, format!("rho = {rho}"));
    let d = cohens_d(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
    c.check((d + 1.0).abs() <= 1e-12, format!("d = {d}"));
    c.note(format!("rho {rho}, d {d}"));
    c.finish();
}

fn surfaces(e: &IdiomEntry) -> BTreeSet<String> {
    e.expand().iter().map(|s| s.text()).collect()
}

#[test]
fn criterion_07_variant_expansion() {
    let mut c = Criterion::new(7, "variant expansion");
    let pick = IdiomEntry::with_annotations("pick a fight", "to start an argument", Some(0), None).unwrap();
    let want: BTreeSet<String> =
        ["pick a fight", "picks a fight", "picked a fight", "picking a fight"].map(String::from).into();
    c.check(surfaces(&pick) == want, format!("pick a fight -> {:?}", surfaces(&pick)));

    let swallow =
        IdiomEntry::with_annotations("swallow one's pride", "to accept humiliation", Some(0), Some(1)).unwrap();
    let got = surfaces(&swallow);
    let mut missing = Vec::new();
    for verb in ["swallow", "swallows", "swallowed", "swallowing"] {
        for pron in ["one's", "my", "your", "his", "her", "its", "our", "their"] {
            let s = format!("{verb} {pron} pride");
            if !got.contains(&s) {
                missing.push(s);
            }
        }
    }
    c.check(missing.is_empty(), format!("missing {missing:?}"));
    c.check(got.len() == 32, format!("{} forms of swallow one's pride, want 4 x 8", got.len()));

    // "picked a fight" seen 50 times, "picks a fight" 51 times
    let labels = GroupLabels::default();
    let mut posts = Vec::new();
    for i in 0..101 {
        let text = if i < 50 { "they picked a fight" } else { "she picks a fight" };
        posts.push(Post::new(format!("a{i}"), i % 2, text));
    }
    let corpus = Corpus::new(labels, posts).unwrap();
    let lex = Lexicon::from_entries([pick]).unwrap().expanded().unwrap();
    let counts = Matcher::build(&lex).unwrap().count_usages(&corpus);
    let pruned = lex.prune_variants(&counts, 50);
    let kept: BTreeSet<String> =
        pruned.get("pick a fight").unwrap().variants.values().map(|s| s.text()).collect();
    c.check(!kept.contains("picked a fight"), "count 50 was kept");
    c.check(kept.contains("picks a fight"), "count 51 was pruned");
    c.note(format!("{} swallow forms; after pruning at 50: {kept:?}", got.len()));
    c.finish();
}

#[test]
fn criterion_08_planted_signal() {
    let mut c = Criterion::new(8, "planted signal end to end");
    let start = Instant::now();
    let (corpus, lexicon) = synth::planted_corpus(8);
    let totals = corpus.totals();
    c.check(totals.posts == [500, 500], format!("posts {:?}", totals.posts));
    let corpus = corpus.balance_groups(1).unwrap();
    let expanded = lexicon.expanded().unwrap();
    let matcher = Matcher::build(&expanded).unwrap();
    let counts = matcher.count_usages(&corpus);
    let as_f64 = |m: HashMap<String, u64>| -> HashMap<String, f64> {
        m.into_iter().map(|(k, v)| (k, v as f64)).collect()
    };
    let table = log_odds_dirichlet(
        &as_f64(counts.group_token_counts(0)),
        &as_f64(counts.group_token_counts(1)),
        &as_f64(counts.combined_token_counts()),
    )
    .unwrap();
    let token = expanded.get(synth::PLANTED_IDIOM).unwrap().idiom_token();
    let z = table.score(&token).unwrap();
    c.check(z > 2.0, format!("planted idiom z = {z:.3}"));

    let report = divergence_gap_test(&corpus, &matcher, 500, 8).unwrap();
    let max = report.baseline_max[0].max(report.baseline_max[1]);
    c.check(report.cross_jsd > max, format!("cross JSD {:.4} <= baseline max {max:.4}", report.cross_jsd));
    c.check(report.p_value <= 1.0 / 501.0 + 1e-15, format!("empirical p {}", report.p_value));
    let secs = start.elapsed().as_secs_f64();
    c.check(secs < 60.0, format!("took {secs:.1}s"));
    c.note(format!(
        "z {z:.2}, cross JSD {:.4} vs baseline max {max:.4}, p {:.5}, {secs:.1}s",
        report.cross_jsd, report.p_value
    ));
    c.finish();
}

fn word_corpus(docs: &[String]) -> Corpus {
    let posts = docs.iter().enumerate().map(|(i, d)| Post::new(format!("a{i}"), i % 2, d.clone())).collect();
    Corpus::new(GroupLabels::default(), posts).unwrap()
}

/// "aa" and "bb" share one pool of neighbours, "cc" has a pool of its own.
fn context_corpus(seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shared: Vec<String> = (0..8).map(|i| format!("s{i}")).collect();
    let other: Vec<String> = (0..8).map(|i| format!("o{i}")).collect();
    let docs: Vec<String> = (0..300)
        .map(|i| {
            let (target, pool) = match i % 3 {
                0 => ("aa", &shared),
                1 => ("bb", &shared),
                _ => ("cc", &other),
            };
            let pick = |rng: &mut ChaCha8Rng| pool[rng.random_range(0..pool.len())].clone();
            format!("{} {} {target} {} {}", pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng))
        })
        .collect();
    word_corpus(&docs)
}

#[test]
fn criterion_09_embedding_properties() {
    let mut c = Criterion::new(9, "embedding properties");
    let none = Matcher::build(&Lexicon::new()).unwrap();

    let spec = SynthSpec { posts_per_group: 600, ..SynthSpec::default() };
    let corpus = generate_corpus(&spec, &GroupLabels::default()).unwrap();
    let bytes: usize = corpus.posts().map(|p| p.text.len() + 1).sum();
    let params = TrainParams { dim: 32, window: 4, min_count: 2, epochs: 6, seed: 9, ..TrainParams::default() };
    let (a, report) = train_sgns_with_report(&corpus, &none, &params).unwrap();
    let (b, _) = train_sgns_with_report(&corpus, &none, &params).unwrap();
    let same = a.tokens() == b.tokens()
        && a.tokens().iter().all(|t| {
            a.vector(t).unwrap().iter().map(|x| x.to_bits()).eq(b.vector(t).unwrap().iter().map(|x| x.to_bits()))
        });
    c.check(same, "two runs with one seed differ");
    let loss = &report.epoch_loss;
    c.check(loss.windows(2).all(|w| w[1] <= w[0]), format!("epoch loss increased: {loss:?}"));

    let params = TrainParams { dim: 10, window: 2, min_count: 1, epochs: 5, negatives: 5, ..TrainParams::default() };
    let mut closer = 0;
    for seed in 0..100 {
        let space = train_sgns(&context_corpus(seed), &none, &TrainParams { seed, ..params.clone() }).unwrap();
        let cos = |u: &str, v: &str| {
            figlex::embeddings::cosine(space.vector(u).unwrap(), space.vector(v).unwrap()).unwrap()
        };
        if cos("aa", "bb") > cos("aa", "cc") {
            closer += 1;
        }
    }
    c.check(closer >= 95, format!("shared-context pair closer in only {closer}/100 runs"));
    c.note(format!(
        "{} KB corpus, epoch loss {:.4} -> {:.4}, shared context closer in {closer}/100",
        bytes / 1024,
        loss[0],
        loss[loss.len() - 1]
    ));
    c.finish();
}

fn snapshot(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_10_pipeline_determinism() {
    let mut c = Criterion::new(10, "pipeline determinism");
    let config = common::fixture("e2e").join("figlex.conf");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let start = Instant::now();
    common::run_pipeline(&config, a.path(), &[]);
    let secs = start.elapsed().as_secs_f64();
    common::run_pipeline(&config, b.path(), &[]);
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    let names: Vec<&str> = sa.iter().map(|(n, _)| n.as_str()).collect();
    c.check(sa.len() > 15, format!("only {} files written", sa.len()));
    let differing: Vec<&str> = sa
        .iter()
        .zip(&sb)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.0.as_str())
        .collect();
    c.check(sa.len() == sb.len() && differing.is_empty(), format!("differing files {differing:?}"));
    c.check(secs < 120.0, format!("pipeline took {secs:.1}s"));
    c.note(format!("{} files byte-identical across runs; one run {secs:.1}s", names.len()));
    c.finish();
}
