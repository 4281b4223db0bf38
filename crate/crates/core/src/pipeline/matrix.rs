use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sets::SetId;
use crate::error::{Error, Result};

/// Something unusual met while extracting one trial, e.g. a channel whose
/// decomposition had fewer IMFs than requested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualityFlag {
    pub trial_id: String,
    pub channel: String,
    pub message: String,
}

/// Column names follow `feature@band@channel`; the middle part names a band,
/// an IMF or `all`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub set: SetId,
    pub trial_ids: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub flags: Vec<QualityFlag>,
}

pub fn column_tag(feature: &str, band: &str, channel: &str) -> String {
    format!("{feature}@{band}@{channel}")
}

/// Splits a column name into (feature, band, channel).
pub fn parse_tag(column: &str) -> Option<(&str, &str, &str)> {
    let mut it = column.splitn(3, '@');
    Some((it.next()?, it.next()?, it.next()?))
}

impl FeatureMatrix {
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.len() != self.trial_ids.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} rows for {} trial ids",
                self.rows.len(),
                self.trial_ids.len()
            )));
        }
        let mut names = self.columns.clone();
        names.sort();
        names.dedup();
        if names.len() != self.columns.len() {
            return Err(Error::FeatureSet("duplicate column names".into()));
        }
        for (row, id) in self.rows.iter().zip(&self.trial_ids) {
            if row.len() != self.columns.len() {
                return Err(Error::ShapeMismatch(format!(
                    "trial {id} has {} values for {} columns",
                    row.len(),
                    self.columns.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::FeatureSet(format!(
                    "non-finite value in trial {id}, column {}",
                    self.columns[j]
                )));
            }
        }
        Ok(())
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            set: self.set,
            trial_ids: self.trial_ids.clone(),
            columns: keep.iter().map(|&j| self.columns[j].clone()).collect(),
            rows: self.rows.iter().map(|r| keep.iter().map(|&j| r[j]).collect()).collect(),
            flags: self.flags.clone(),
        }
    }

    pub fn channels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.columns {
            if let Some((_, _, ch)) = parse_tag(c) {
                if !out.iter().any(|o| o == ch) {
                    out.push(ch.to_string());
                }
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: W, config_hash: Option<&str>) -> Result<()> {
        let mut out = out;
        let io = |e: std::io::Error| Error::Format(e.to_string());
        if let Some(h) = config_hash {
            writeln!(out, "# config_hash={h}").map_err(io)?;
        }
        let fmt = |e: csv::Error| Error::Format(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["trial_id".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).map_err(fmt)?;
        for (id, row) in self.trial_ids.iter().zip(&self.rows) {
            let mut rec = Vec::with_capacity(row.len() + 1);
            rec.push(id.clone());
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(fmt)?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    pub fn read_csv(path: &Path, set: SetId) -> Result<FeatureMatrix> {
        let text = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let bad = |line: u64, msg: String| Error::Format(format!("{}: line {line}: {msg}", path.display()));
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_slice());
        let header = rdr.headers().map_err(|e| Error::Format(format!("{}: {e}", path.display())))?.clone();
        if header.get(0) != Some("trial_id") {
            return Err(bad(1, "first column must be trial_id".into()));
        }
        let columns: Vec<String> = header.iter().skip(1).map(String::from).collect();
        let mut trial_ids = Vec::new();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| bad(e.position().map_or(0, |p| p.line()), e.to_string()))?;
            let line = rec.position().map_or(0, |p| p.line());
            let row = rec
                .iter()
                .skip(1)
                .map(|v| v.parse::<f64>().map_err(|_| bad(line, format!("{v:?} is not a number"))))
                .collect::<Result<Vec<f64>>>()?;
            trial_ids.push(rec[0].to_string());
            rows.push(row);
        }
        let m = FeatureMatrix { set, trial_ids, columns, rows, flags: Vec::new() };
        m.validate()?;
        Ok(m)
    }
}

/// Keeps only the columns whose channel tag is listed.
pub fn reduce_channels(matrix: &FeatureMatrix, channels: &[String]) -> Result<FeatureMatrix> {
    if channels.is_empty() {
        return Err(Error::EmptyChannelSelection);
    }
    let present = matrix.channels();
    if let Some(unknown) = channels.iter().find(|c| !present.contains(c)) {
        return Err(Error::UnknownChannel(unknown.clone()));
    }
    let keep: Vec<usize> = matrix
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| parse_tag(c).is_some_and(|(_, _, ch)| channels.iter().any(|k| k == ch)))
        .map(|(j, _)| j)
        .collect();
    let mut out = matrix.select_columns(&keep);
    out.flags.retain(|f| channels.contains(&f.channel));
    Ok(out)
}
