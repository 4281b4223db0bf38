use std::io::Write;
use std::path::Path;

use super::PosteriorMatrix;
use crate::error::{Error, Result};

const HEADER: [&str; 3] = ["trial_id", "p_low", "p_high"];

/// Writes `trial_id,p_low,p_high` rows, preceded by a `# config_hash=` line
/// when a hash is given.
pub fn write_posterior_csv<W: Write>(
    mut out: W,
    ids: &[String],
    posteriors: &PosteriorMatrix,
    config_hash: Option<&str>,
) -> Result<()> {
    if ids.len() != posteriors.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} trial ids for {} posterior rows",
            ids.len(),
            posteriors.len()
        )));
    }
    let fmt = |e: csv::Error| Error::Format(e.to_string());
    if let Some(h) = config_hash {
        writeln!(out, "# config_hash={h}").map_err(|e| Error::Format(e.to_string()))?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER).map_err(fmt)?;
    for (id, r) in ids.iter().zip(&posteriors.rows) {
        w.write_record([id.as_str(), &r[0].to_string(), &r[1].to_string()]).map_err(fmt)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))?;
    Ok(())
}

/// Reads a posterior CSV, skipping `#` comment lines. Diagnostics name the
/// offending line.
pub fn read_posterior_csv(path: &Path) -> Result<(Vec<String>, PosteriorMatrix)> {
    let text = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: u64, msg: String| Error::Format(format!("{}: line {line}: {msg}", path.display()));
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_slice());
    let header = rdr.headers().map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    if header.iter().collect::<Vec<_>>() != HEADER {
        let line = header.position().map_or(1, |p| p.line());
        return Err(bad(line, format!("expected header {}", HEADER.join(","))));
    }
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            bad(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let parse = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| (0.0..=1.0).contains(v))
                .ok_or_else(|| bad(line, format!("{} = {:?} is not a probability", HEADER[i], &rec[i])))
        };
        let (lo, hi) = (parse(1)?, parse(2)?);
        if (lo + hi - 1.0).abs() > 1e-6 {
            return Err(bad(line, format!("probabilities sum to {}", lo + hi)));
        }
        ids.push(rec[0].to_string());
        rows.push([lo, hi]);
    }
    Ok((ids, PosteriorMatrix { rows }))
}
