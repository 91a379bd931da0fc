use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use serde_json::{json, Map, Value};

use super::analyze::analysis_complete;
use super::{write_json, write_text, ReportFormat, RunConfig};

/// CSV columns that always hold text, even when a cell happens to parse as a number.
const TEXT_COLUMNS: &[&str] = &[
    "canonical",
    "group",
    "neighbor",
    "note",
    "dimension",
    "significance",
    "surface",
    "token",
];

/// Schema that `report.json` validates against.
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");

/// Gathers the `analyze` outputs (and the literality table from `prepare`) into one
/// `report.json`, or `report.csv` in long `path,value` form.
pub fn cmd_report(cfg: &RunConfig, format: ReportFormat) -> anyhow::Result<()> {
    let out = &cfg.out;
    if out.join("metadata.json").is_file() {
        let failed: Vec<String> = fs::read_dir(out)?
            .filter_map(|e| e.ok())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .filter(|n| n.ends_with(".FAILED"))
            .collect();
        if !failed.is_empty() {
            bail!("analysis incomplete: {}", failed.join(", "));
        }
    }
    let labels = cfg.groups.as_array();
    if !analysis_complete(out, labels) {
        bail!("{} lacks analysis outputs; run `figlex analyze` first", out.display());
    }
    let report = build_report(out).context("stage `report`")?;
    match format {
        ReportFormat::Json => write_json(&out.join("report.json"), &report),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["path", "value"])?;
            for (path, value) in flatten_json(&report) {
                w.write_record([path, value])?;
            }
            let bytes = w.into_inner().context("flushing CSV")?;
            write_text(&out.join("report.csv"), &String::from_utf8(bytes)?)
        }
    }
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cell(column: &str, raw: &str) -> Value {
    if TEXT_COLUMNS.contains(&column) {
        return Value::String(raw.to_string());
    }
    if raw.is_empty() {
        return Value::Null;
    }
    if let Ok(b) = raw.parse::<bool>() {
        return Value::Bool(b);
    }
    if let Ok(i) = raw.parse::<i64>() {
        return Value::from(i);
    }
    match raw.parse::<f64>() {
        Ok(x) if x.is_finite() => Value::from(x),
        _ => Value::String(raw.to_string()),
    }
}

/// CSV rows as objects keyed by header, with numeric cells as numbers and empty cells as null.
fn read_rows(path: &Path) -> anyhow::Result<Vec<Map<String, Value>>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = r.headers()?.clone();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.with_context(|| format!("reading {}", path.display()))?;
        rows.push(
            headers
                .iter()
                .zip(rec.iter())
                .map(|(h, v)| (h.to_string(), cell(h, v)))
                .collect(),
        );
    }
    Ok(rows)
}

fn to_array(rows: Vec<Map<String, Value>>) -> Value {
    Value::Array(rows.into_iter().map(Value::Object).collect())
}

fn build_report(dir: &Path) -> anyhow::Result<Value> {
    let metadata = read_json(&dir.join("metadata.json"))?;
    let labels: Vec<String> = serde_json::from_value(metadata["groups"].clone())
        .context("metadata.json has no `groups`")?;

    let idioms = read_rows(&dir.join("idioms.csv"))?;
    let count_keys: Vec<String> = labels.iter().map(|l| format!("count_{l}")).collect();
    let figure1: Vec<Value> = idioms
        .iter()
        .filter_map(|row| {
            let total: f64 = count_keys.iter().filter_map(|k| row[k].as_f64()).sum();
            let z = row["gscore"].as_f64()?;
            (total > 0.0).then(|| {
                json!({
                    "canonical": row["canonical"],
                    "log10_count": total.log10(),
                    "gscore": z,
                })
            })
        })
        .collect();

    let mut figure2: Vec<Value> = Vec::new();
    for label in &labels {
        let points: Vec<Value> = read_rows(&dir.join("kde_dominance.csv"))?
            .into_iter()
            .filter(|r| r["group"] == label.as_str())
            .map(|r| json!({ "x": r["x"], "density": r["density"] }))
            .collect();
        figure2.push(json!({ "group": label, "points": points }));
    }

    let literality = dir.join("literality.csv");
    Ok(json!({
        "metadata": metadata,
        "divergence": read_json(&dir.join("divergence.json"))?,
        "spearman": read_json(&dir.join("spearman.json"))?,
        "idioms": to_array(idioms),
        "figure1": figure1,
        "literality": if literality.is_file() { to_array(read_rows(&literality)?) } else { json!([]) },
        "vad_scores": to_array(read_rows(&dir.join("vad_scores.csv"))?),
        "vad_comparison": to_array(read_rows(&dir.join("vad_comparison.csv"))?),
        "literal_comparison": to_array(read_rows(&dir.join("literal_comparison.csv"))?),
        "figure2": figure2,
        "rbo": to_array(read_rows(&dir.join("rbo.csv"))?),
        "neighbors": to_array(read_rows(&dir.join("neighbors.csv"))?),
    }))
}

/// Leaf values of a JSON document as `(path, text)` pairs, object keys in sorted order.
///
/// Paths join object keys and array indices with `/`. Numbers keep serde_json's
/// round-trip formatting, strings are unquoted and null is the empty string.
/// Empty arrays and objects produce no rows.
pub fn flatten_json(value: &Value) -> Vec<(String, String)> {
    fn walk(v: &Value, path: &mut String, out: &mut Vec<(String, String)>) {
        let mut child = |key: &str, v: &Value, path: &mut String| {
            let len = path.len();
            if !path.is_empty() {
                path.push('/');
            }
            path.push_str(key);
            walk(v, path, out);
            path.truncate(len);
        };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, v)| child(k, v, path)),
            Value::Array(a) => a
                .iter()
                .enumerate()
                .for_each(|(i, v)| child(&i.to_string(), v, path)),
            Value::Null => out.push((path.clone(), String::new())),
            Value::String(s) => out.push((path.clone(), s.clone())),
            Value::Bool(b) => out.push((path.clone(), b.to_string())),
            Value::Number(n) => out.push((path.clone(), n.to_string())),
        }
    }
    let mut out = Vec::new();
    walk(value, &mut String::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flattens_with_sorted_keys() {
        let v = json!({ "b": [1, { "c": null }], "a": "x", "d": 0.5, "e": [] });
        let flat = flatten_json(&v);
        let expect = [("a", "x"), ("b/0", "1"), ("b/1/c", ""), ("d", "0.5")];
        assert_eq!(flat.len(), expect.len());
        for ((p, v), (ep, ev)) in flat.iter().zip(expect) {
            assert_eq!((p.as_str(), v.as_str()), (ep, ev));
        }
    }

    #[test]
    fn cells_are_typed_by_content() {
        assert_eq!(cell("gscore", "1.5"), json!(1.5));
        assert_eq!(cell("count_F", "12"), json!(12));
        assert_eq!(cell("kept", "true"), json!(true));
        assert_eq!(cell("cohens_d", ""), Value::Null);
        assert_eq!(cell("neighbor", "42"), json!("42"));
        assert_eq!(cell("x", "NaN"), json!("NaN"));
    }

    #[test]
    fn schema_is_valid_json() {
        let v: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
        assert!(v["properties"]["figure1"].is_object());
    }
}
