use std::path::{Path, PathBuf};

use holoeeg::features::Band;
use holoeeg::learn::{default_rf_grid, ClassifierSpec};
use holoeeg::pipeline::{
    ExtractionParams, FeatureSetSpec, LabelConfig, SetId, SynthConfig, DEAP_CHANNELS,
    FRONTAL_CHANNELS,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::Failure;

/// Suffix of matrices reduced to `frontal_channels`.
pub const FRONTAL_SUFFIX: &str = "_frontal";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Trial directory, relative to the config file.
    pub dataset: PathBuf,
    /// Output directory, relative to the config file.
    pub output: PathBuf,
    pub seed: u64,
    pub labels: LabelConfig,
    pub sets: Vec<SetId>,
    /// Replaces the default spec of the set it names.
    #[serde(rename = "feature_set")]
    pub feature_sets: Vec<FeatureSetSpec>,
    pub frontal_channels: Vec<String>,
    /// Sets that also get a matrix reduced to `frontal_channels`.
    pub frontal_sets: Vec<SetId>,
    pub extraction: ExtractionParams,
    pub train: TrainConfig,
    pub fuse: FuseConfig,
    pub synth: SynthSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub folds: usize,
    pub grid: Vec<ClassifierSpec>,
    /// Matrix names to train on; empty means every extracted matrix.
    pub sets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuseConfig {
    /// Matrix names whose posteriors are fused when no files are given.
    pub inputs: Vec<String>,
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub n_subjects: u32,
    pub n_trials: u32,
    pub n_samples: usize,
    pub effect: f64,
    pub band: Band,
    pub high_fraction: f64,
    pub am_tones: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: "data".into(),
            output: "out".into(),
            seed: 0,
            labels: LabelConfig::default(),
            sets: SetId::ALL.to_vec(),
            feature_sets: Vec::new(),
            frontal_channels: FRONTAL_CHANNELS.iter().map(|s| s.to_string()).collect(),
            frontal_sets: Vec::new(),
            extraction: ExtractionParams::default(),
            train: TrainConfig::default(),
            fuse: FuseConfig::default(),
            synth: SynthSection::default(),
        }
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { folds: 5, grid: default_rf_grid(), sets: Vec::new() }
    }
}

impl Default for SynthSection {
    fn default() -> Self {
        let d = SynthConfig::default();
        SynthSection {
            n_subjects: d.n_subjects,
            n_trials: d.n_trials,
            n_samples: d.n_samples,
            effect: d.effect,
            band: d.band,
            high_fraction: d.high_fraction,
            am_tones: d.am_tones,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Failure> {
        self.labels.validate()?;
        self.extraction.validate()?;
        if self.sets.is_empty() {
            return Err(Failure::validation("config: `sets` is empty"));
        }
        let mut seen = self.sets.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.sets.len() {
            return Err(Failure::validation("config: `sets` lists a set twice"));
        }
        for s in &self.sets {
            self.spec_for(*s).validate(&self.extraction)?;
        }
        for o in &self.feature_sets {
            if !self.sets.contains(&o.set) {
                return Err(Failure::validation(format!(
                    "config: feature_set override for {} but the set is not listed in `sets`",
                    o.set.name()
                )));
            }
        }
        for s in &self.frontal_sets {
            if !self.sets.contains(s) {
                return Err(Failure::validation(format!(
                    "config: frontal set {} is not listed in `sets`",
                    s.name()
                )));
            }
        }
        if let Some(c) = self.frontal_channels.iter().find(|c| !DEAP_CHANNELS.contains(&c.as_str())) {
            return Err(Failure::validation(format!("config: unknown frontal channel {c:?}")));
        }
        if self.train.folds < 2 {
            return Err(Failure::validation("config: train.folds must be at least 2"));
        }
        if self.train.grid.is_empty() {
            return Err(Failure::validation("config: train.grid is empty"));
        }
        for g in &self.train.grid {
            let ok = match *g {
                ClassifierSpec::Knn { k } => k >= 1,
                ClassifierSpec::RandomForest { n_estimators, max_depth } => n_estimators >= 1 && max_depth >= 1,
            };
            if !ok {
                return Err(Failure::validation(format!("config: invalid grid point {g:?}")));
            }
        }
        Ok(())
    }

    pub fn spec_for(&self, set: SetId) -> FeatureSetSpec {
        self.feature_sets
            .iter()
            .find(|s| s.set == set)
            .cloned()
            .unwrap_or_else(|| FeatureSetSpec::default_for(set, self.labels.dimension))
    }

    /// Matrix names written by `extract`, in output order.
    pub fn matrix_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.sets.iter().map(|s| s.name().to_string()).collect();
        names.extend(self.frontal_sets.iter().map(|s| format!("{}{FRONTAL_SUFFIX}", s.name())));
        names
    }

    pub fn synth_config(&self) -> SynthConfig {
        let s = &self.synth;
        SynthConfig {
            seed: self.seed,
            n_subjects: s.n_subjects,
            n_trials: s.n_trials,
            n_samples: s.n_samples,
            effect: s.effect,
            band: s.band.clone(),
            dimension: self.labels.dimension,
            high_fraction: s.high_fraction,
            am_tones: s.am_tones,
        }
    }
}

/// Set id of a matrix name such as `MHS` or `MHS_frontal`.
pub fn set_of(name: &str) -> Option<SetId> {
    SetId::parse(name.strip_suffix(FRONTAL_SUFFIX).unwrap_or(name))
}

/// A loaded config with its base directory and hash.
pub struct Run {
    pub config: RunConfig,
    pub base: PathBuf,
    pub hash: String,
}

impl Run {
    pub fn load(path: Option<&Path>, seed: Option<u64>) -> Result<Run, Failure> {
        let (mut config, base) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Failure::validation(format!("cannot read config {}: {e}", p.display())))?;
                let cfg: RunConfig = toml::from_str(&text)
                    .map_err(|e| Failure::validation(format!("config {}: {e}", p.display())))?;
                let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
                (cfg, base)
            }
            None => (RunConfig::default(), PathBuf::new()),
        };
        if let Some(s) = seed {
            config.seed = s;
        }
        config.validate()?;
        let hash = config_hash(&config);
        Ok(Run { config, base, hash })
    }

    pub fn dataset_dir(&self) -> PathBuf {
        self.base.join(&self.config.dataset)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.base.join(&self.config.output)
    }
}

fn canonical(v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                canonical(&map[k], out);
            }
            out.push('}');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                canonical(x, out);
            }
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// SHA-256 of the config as JSON with sorted keys.
pub fn config_hash(config: &RunConfig) -> String {
    let value = serde_json::to_value(config).expect("config serialises");
    let mut text = String::new();
    canonical(&value, &mut text);
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}
