use std::collections::HashMap;
use std::path::{Path, PathBuf};

use holoeeg::learn::Label;
use holoeeg::pipeline::{binarize, LabelConfig, Ratings};
use serde::Serialize;

use crate::Failure;

pub const LABELS_FILE: &str = "labels.csv";

pub fn features_dir(out: &Path) -> PathBuf {
    out.join("features")
}

pub fn reports_dir(out: &Path) -> PathBuf {
    out.join("reports")
}

pub fn posteriors_dir(out: &Path) -> PathBuf {
    out.join("posteriors")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Failure::runtime(format!("cannot encode {}: {e}", path.display())))?;
    bytes.push(b'\n');
    write_file(path, &bytes)
}

/// Hash stored in the first `# config_hash=` line or `config_hash` field.
pub fn stored_hash(path: &Path) -> Option<String> {
    let text = std::fs::read_to_string(path).ok()?;
    if let Some(rest) = text.strip_prefix("# config_hash=") {
        return rest.lines().next().map(str::to_string);
    }
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    v.get("config_hash")?.as_str().map(str::to_string)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelRow {
    pub trial_id: String,
    pub ratings: Ratings,
}

pub fn write_labels(path: &Path, rows: &[LabelRow], cfg: &LabelConfig, hash: &str) -> Result<(), Failure> {
    let mut text = format!("# config_hash={hash}\ntrial_id,valence,arousal,label\n");
    for r in rows {
        let label = binarize(cfg.dimension.rating(&r.ratings), cfg);
        text.push_str(&format!("{},{},{},{}\n", r.trial_id, r.ratings.valence, r.ratings.arousal, label.name()));
    }
    write_file(path, text.as_bytes())
}

/// Labels by trial id, recomputed from the stored ratings with `cfg`.
pub fn read_labels(path: &Path, cfg: &LabelConfig) -> Result<HashMap<String, Label>, Failure> {
    let bad = |m: String| Failure::validation(format!("{}: {m}", path.display()));
    let bytes = std::fs::read(path).map_err(|e| bad(format!("cannot read labels ({e}); run `extract` first")))?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(bytes.as_slice());
    let mut out = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize| {
            rec.get(i)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| bad(format!("line {line}: bad rating")))
        };
        let ratings = Ratings { valence: num(1)?, arousal: num(2)? };
        out.insert(rec[0].to_string(), binarize(cfg.dimension.rating(&ratings), cfg));
    }
    Ok(out)
}

/// Labels in the order of `ids`; every id must be labelled.
pub fn align_labels(ids: &[String], labels: &HashMap<String, Label>, what: &str) -> Result<Vec<Label>, Failure> {
    let missing: Vec<&str> = ids.iter().filter(|i| !labels.contains_key(*i)).map(String::as_str).collect();
    if !missing.is_empty() {
        return Err(Failure::validation(format!("{what}: no label for trial(s) {}", missing.join(", "))));
    }
    Ok(ids.iter().map(|i| labels[i]).collect())
}
