#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Runs the `figlex` binary.
pub fn figlex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_figlex"))
        .args(args)
        .env_remove("FIGLEX_THREADS")
        .output()
        .expect("figlex runs")
}

pub fn figlex_ok(args: &[&str]) -> Output {
    let out = figlex(args);
    assert!(
        out.status.success(),
        "figlex {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// `prepare` and `analyze` with the given config into `out`.
pub fn run_pipeline(config: &Path, out: &Path, extra: &[&str]) {
    let (config, out) = (config.to_str().unwrap(), out.to_str().unwrap());
    for cmd in ["prepare", "analyze"] {
        let mut args = vec![cmd, "--config", config, "--out", out];
        args.extend_from_slice(extra);
        figlex_ok(&args);
    }
}

/// The end-to-end fixture run once per test binary.
pub fn e2e_run() -> &'static Path {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        run_pipeline(&fixture("e2e").join("figlex.conf"), dir.path(), &[]);
        dir
    })
    .path()
}

pub fn read_csv(path: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers
                .iter()
                .zip(rec.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}
