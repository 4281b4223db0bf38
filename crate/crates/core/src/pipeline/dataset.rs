//! Trial records, the on-disk trial format and label binarisation.
//!
//! A trial file is one line of JSON header followed by `\n` and the samples
//! as little-endian `f64`, channel after channel.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::Label;

pub const FORMAT_TAG: &str = "holoeeg-trial-v1";
pub const TRIAL_EXTENSION: &str = "trial";
pub const N_CHANNELS: usize = 32;
pub const SAMPLE_RATE: f64 = 128.0;

/// Recording order of the 32 EEG channels.
pub const DEAP_CHANNELS: [&str; N_CHANNELS] = [
    "Fp1", "AF3", "F3", "F7", "FC5", "FC1", "C3", "T7", "CP5", "CP1", "P3", "P7", "PO3", "O1", "Oz",
    "Pz", "Fp2", "AF4", "Fz", "F4", "F8", "FC6", "FC2", "Cz", "C4", "T8", "CP6", "CP2", "P4", "P8",
    "PO4", "O2",
];

pub const FRONTAL_CHANNELS: [&str; 10] =
    ["Fp1", "AF3", "F3", "F7", "FC5", "Fp2", "AF4", "F4", "F8", "FC6"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratings {
    pub valence: f64,
    pub arousal: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub subject_id: u32,
    pub trial_id: u32,
    pub fs: f64,
    pub channel_names: Vec<String>,
    /// One row per channel.
    pub channels: Vec<Vec<f64>>,
    pub ratings: Ratings,
}

impl Trial {
    pub fn id(&self) -> String {
        trial_key(self.subject_id, self.trial_id)
    }

    pub fn n_samples(&self) -> usize {
        self.channels.first().map_or(0, |c| c.len())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidConfig(format!("trial {}: {m}", self.id())));
        if self.channels.len() != N_CHANNELS || self.channel_names.len() != N_CHANNELS {
            return fail(format!(
                "expected {N_CHANNELS} channels, found {}",
                self.channels.len().min(self.channel_names.len())
            ));
        }
        if self.fs != SAMPLE_RATE {
            return fail(format!("sampling rate must be {SAMPLE_RATE} Hz, found {}", self.fs));
        }
        let n = self.n_samples();
        if n < 2 || self.channels.iter().any(|c| c.len() != n) {
            return fail("channels must share a length of at least 2 samples".into());
        }
        for (name, r) in [("valence", self.ratings.valence), ("arousal", self.ratings.arousal)] {
            if !(1.0..=9.0).contains(&r) {
                return fail(format!("rating out of range: {name} = {r}"));
            }
        }
        let mut names = self.channel_names.clone();
        names.sort();
        names.dedup();
        if names.len() != N_CHANNELS {
            return fail("channel names must be unique".into());
        }
        if let Some((c, i)) = self.channels.iter().enumerate().find_map(|(c, row)| {
            row.iter().position(|v| !v.is_finite()).map(|i| (c, i))
        }) {
            return fail(format!("non-finite sample at channel {c}, index {i}"));
        }
        Ok(())
    }
}

pub fn trial_key(subject_id: u32, trial_id: u32) -> String {
    format!("s{subject_id:02}_t{trial_id:02}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Valence,
    Arousal,
}

impl Dimension {
    pub fn name(self) -> &'static str {
        match self {
            Dimension::Valence => "valence",
            Dimension::Arousal => "arousal",
        }
    }

    pub fn rating(self, r: &Ratings) -> f64 {
        match self {
            Dimension::Valence => r.valence,
            Dimension::Arousal => r.arousal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelConfig {
    pub threshold: f64,
    pub dimension: Dimension,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig { threshold: 4.5, dimension: Dimension::Valence }
    }
}

impl LabelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 1.0 && self.threshold < 9.0) {
            return Err(Error::InvalidConfig(format!(
                "label threshold {} must lie strictly between 1 and 9",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// High iff the rating exceeds the threshold.
pub fn binarize(rating: f64, cfg: &LabelConfig) -> Label {
    if rating > cfg.threshold {
        Label::High
    } else {
        Label::Low
    }
}

pub fn labels_for(trials: &[Trial], cfg: &LabelConfig) -> Vec<Label> {
    trials.iter().map(|t| binarize(cfg.dimension.rating(&t.ratings), cfg)).collect()
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    subject_id: u32,
    trial_id: u32,
    fs: f64,
    n_samples: usize,
    channels: Vec<String>,
    ratings: Ratings,
}

pub fn encode_trial(trial: &Trial) -> Result<Vec<u8>> {
    trial.validate()?;
    let header = Header {
        format: FORMAT_TAG.into(),
        subject_id: trial.subject_id,
        trial_id: trial.trial_id,
        fs: trial.fs,
        n_samples: trial.n_samples(),
        channels: trial.channel_names.clone(),
        ratings: trial.ratings,
    };
    let mut out = serde_json::to_vec(&header).map_err(|e| Error::Format(e.to_string()))?;
    out.push(b'\n');
    out.reserve(N_CHANNELS * trial.n_samples() * 8);
    for row in &trial.channels {
        for v in row {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_trial(bytes: &[u8]) -> std::result::Result<Trial, String> {
    let nl = bytes.iter().position(|b| *b == b'\n').ok_or("missing header line")?;
    let header: Header =
        serde_json::from_slice(&bytes[..nl]).map_err(|e| format!("malformed header: {e}"))?;
    if header.format != FORMAT_TAG {
        return Err(format!("unknown format tag {:?}", header.format));
    }
    if header.channels.len() != N_CHANNELS {
        return Err(format!("expected {N_CHANNELS} channels, found {}", header.channels.len()));
    }
    let body = &bytes[nl + 1..];
    let expected = N_CHANNELS * header.n_samples * 8;
    if body.len() != expected {
        return Err(format!("sample block has {} bytes, expected {expected}", body.len()));
    }
    let channels = body
        .chunks_exact(header.n_samples * 8)
        .map(|row| {
            row.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect()
        })
        .collect();
    let trial = Trial {
        subject_id: header.subject_id,
        trial_id: header.trial_id,
        fs: header.fs,
        channel_names: header.channels,
        channels,
        ratings: header.ratings,
    };
    trial.validate().map_err(|e| e.to_string())?;
    Ok(trial)
}

pub fn trial_path(dir: &Path, trial: &Trial) -> PathBuf {
    dir.join(format!("{}.{TRIAL_EXTENSION}", trial.id()))
}

pub fn write_trial(dir: &Path, trial: &Trial) -> Result<PathBuf> {
    let path = trial_path(dir, trial);
    let bytes = encode_trial(trial)?;
    let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Loads every `*.trial` file in `dir`, ordered by (subject, trial). Any bad
/// file fails the whole load; the message lists each offending file.
pub fn load_dataset(dir: &Path) -> Result<Vec<Trial>> {
    let paths = trial_files(dir)?;
    let loaded: Vec<std::result::Result<Trial, String>> = paths
        .par_iter()
        .map(|p| {
            let bytes = fs::read(p).map_err(|e| format!("{}: {e}", p.display()))?;
            decode_trial(&bytes).map_err(|e| format!("{}: {e}", p.display()))
        })
        .collect();
    let mut trials = Vec::with_capacity(loaded.len());
    let mut problems = Vec::new();
    for r in loaded {
        match r {
            Ok(t) => trials.push(t),
            Err(e) => problems.push(e),
        }
    }
    trials.sort_by_key(|t| (t.subject_id, t.trial_id));
    for w in trials.windows(2) {
        if (w[0].subject_id, w[0].trial_id) == (w[1].subject_id, w[1].trial_id) {
            problems.push(format!("duplicate trial {}", w[0].id()));
        }
    }
    if !problems.is_empty() {
        return Err(Error::Dataset { path: dir.into(), message: problems.join("; ") });
    }
    Ok(trials)
}

/// Header-level view of a trial file.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialEntry {
    pub path: PathBuf,
    pub subject_id: u32,
    pub trial_id: u32,
    pub ratings: Ratings,
}

impl TrialEntry {
    pub fn id(&self) -> String {
        trial_key(self.subject_id, self.trial_id)
    }

    /// Reads and fully validates the trial.
    pub fn load(&self) -> Result<Trial> {
        let bytes = fs::read(&self.path).map_err(|e| Error::io(&self.path, e))?;
        let trial = decode_trial(&bytes)
            .map_err(|message| Error::Dataset { path: self.path.clone(), message })?;
        if (trial.subject_id, trial.trial_id) != (self.subject_id, self.trial_id) {
            return Err(Error::Dataset { path: self.path.clone(), message: "file changed while reading".into() });
        }
        Ok(trial)
    }
}

fn trial_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == TRIAL_EXTENSION) {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Dataset { path: dir.into(), message: "no .trial files found".into() });
    }
    Ok(paths)
}

fn read_header(path: &Path) -> std::result::Result<TrialEntry, String> {
    use std::io::BufRead;
    let f = fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut line = Vec::new();
    std::io::BufReader::new(f)
        .read_until(b'\n', &mut line)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let h: Header = serde_json::from_slice(line.strip_suffix(b"\n").unwrap_or(&line))
        .map_err(|e| format!("{}: malformed header: {e}", path.display()))?;
    let bad = |m: String| Err(format!("{}: {m}", path.display()));
    if h.format != FORMAT_TAG {
        return bad(format!("unknown format tag {:?}", h.format));
    }
    if h.channels.len() != N_CHANNELS {
        return bad(format!("expected {N_CHANNELS} channels, found {}", h.channels.len()));
    }
    for r in [h.ratings.valence, h.ratings.arousal] {
        if !(1.0..=9.0).contains(&r) {
            return bad(format!("rating out of range: {r}"));
        }
    }
    Ok(TrialEntry { path: path.into(), subject_id: h.subject_id, trial_id: h.trial_id, ratings: h.ratings })
}

/// Reads only the headers of every `*.trial` file in `dir`, ordered by
/// (subject, trial). Sample blocks are checked later by `TrialEntry::load`.
pub fn index_dataset(dir: &Path) -> Result<Vec<TrialEntry>> {
    let paths = trial_files(dir)?;
    let mut entries = Vec::with_capacity(paths.len());
    let mut problems = Vec::new();
    for p in &paths {
        match read_header(p) {
            Ok(e) => entries.push(e),
            Err(e) => problems.push(e),
        }
    }
    entries.sort_by_key(|e| (e.subject_id, e.trial_id));
    for w in entries.windows(2) {
        if (w[0].subject_id, w[0].trial_id) == (w[1].subject_id, w[1].trial_id) {
            problems.push(format!("duplicate trial {}", w[0].id()));
        }
    }
    if !problems.is_empty() {
        return Err(Error::Dataset { path: dir.into(), message: problems.join("; ") });
    }
    Ok(entries)
}
