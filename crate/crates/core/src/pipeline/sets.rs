//! Feature-set assembly. Columns are channel-major: every feature of the
//! first selected channel, then the next channel, and so on.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{Dimension, Trial};
use super::matrix::{column_tag, FeatureMatrix, QualityFlag};
use crate::emd::{decompose_slice, ImfDecomposition, SiftConfig};
use crate::error::{Error, Result};
use crate::features::{
    band_powers, default_bands, default_dfa_boxes, dfa, features_of, higuchi_fd, hjorth, hurst,
    petrosian_fd, rir_and_entropy, Band, ImfFeatureVector, WelchConfig,
};
use crate::hilbert::{attributes_of, holo_spectrum_of, marginal_of_attributes, SpectrumConfig};
use crate::signal::{segment_windows, Signal};
use crate::wavelet::{band_features, dwt_slice, DwtBand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SetId {
    A,
    B,
    C,
    D,
    #[serde(rename = "MHS")]
    Mhs,
    #[serde(rename = "HHSA")]
    Hhsa,
}

impl SetId {
    pub const ALL: [SetId; 6] = [SetId::A, SetId::B, SetId::C, SetId::D, SetId::Mhs, SetId::Hhsa];

    pub fn name(self) -> &'static str {
        match self {
            SetId::A => "A",
            SetId::B => "B",
            SetId::C => "C",
            SetId::D => "D",
            SetId::Mhs => "MHS",
            SetId::Hhsa => "HHSA",
        }
    }

    pub fn parse(s: &str) -> Option<SetId> {
        SetId::ALL.into_iter().find(|id| id.name().eq_ignore_ascii_case(s))
    }

    fn uses_emd(self) -> bool {
        matches!(self, SetId::D | SetId::Mhs | SetId::Hhsa)
    }
}

/// Channel-level features of set A.
pub const SET_A_SCALAR: [&str; 7] =
    ["mobility", "complexity", "hfd", "pfd", "dfa", "hurst", "spectral_entropy"];
/// Band-wise features of set A.
pub const SET_A_BANDED: [&str; 2] = ["psi", "rir"];
pub const SET_C_FEATURES: [&str; 2] = ["dwt_energy", "dwt_entropy"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSetSpec {
    pub set: SetId,
    #[serde(default)]
    pub features: Vec<String>,
    #[serde(default)]
    pub bands: Vec<String>,
    /// 1-based IMF indices.
    #[serde(default)]
    pub imfs: Vec<usize>,
    /// Empty means every channel of the trial.
    #[serde(default)]
    pub channels: Vec<String>,
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

impl FeatureSetSpec {
    pub fn default_for(set: SetId, dimension: Dimension) -> Self {
        let valence = dimension == Dimension::Valence;
        let (features, bands, imfs): (&[&str], &[&str], Vec<usize>) = match set {
            SetId::A => (
                &["mobility", "complexity", "hfd", "pfd", "spectral_entropy", "psi", "rir"],
                &["alpha_low", "alpha_high", "beta", "gamma"],
                vec![],
            ),
            SetId::B => (&["psd"], &["alpha_high", "beta"], vec![]),
            SetId::C if valence => (&SET_C_FEATURES, &["gamma"], vec![]),
            SetId::C => (&SET_C_FEATURES, &["theta", "alpha", "beta", "gamma"], vec![]),
            SetId::D if valence => (&["sp_ited", "d_ised"], &[], vec![1, 2, 3, 4]),
            SetId::D => (&["energy", "sp_omega", "d_ised"], &[], vec![1, 2, 3]),
            SetId::Mhs => (&["mhs"], &[], vec![1, 2, 3, 4]),
            SetId::Hhsa => (&["hhsa"], &[], vec![1, 2, 3, 4]),
        };
        FeatureSetSpec { set, features: strings(features), bands: strings(bands), imfs, channels: vec![] }
    }

    /// Column names for the given channel list, in matrix order.
    pub fn columns(&self, channels: &[String], params: &ExtractionParams) -> Vec<String> {
        let mut per_channel: Vec<(String, String)> = Vec::new();
        match self.set {
            SetId::A => {
                for f in &self.features {
                    if SET_A_BANDED.contains(&f.as_str()) {
                        per_channel.extend(self.bands.iter().map(|b| (f.clone(), b.clone())));
                    } else {
                        per_channel.push((f.clone(), "all".into()));
                    }
                }
            }
            SetId::B | SetId::C => {
                for b in &self.bands {
                    per_channel.extend(self.features.iter().map(|f| (f.clone(), b.clone())));
                }
            }
            SetId::D => {
                for i in &self.imfs {
                    per_channel.extend(self.features.iter().map(|f| (f.clone(), format!("imf{i}"))));
                }
            }
            SetId::Mhs => {
                for i in &self.imfs {
                    per_channel
                        .extend((0..params.mhs.n_bins).map(|k| (format!("mhs_b{k:02}"), format!("imf{i}"))));
                }
            }
            SetId::Hhsa => {
                let span = format!("imf1-{}", self.imfs.len());
                for c in 0..params.hhsa_carrier.n_bins {
                    for a in 0..params.hhsa_am.n_bins {
                        per_channel.push((format!("hhsa_c{c}_a{a}"), span.clone()));
                    }
                }
            }
        }
        channels
            .iter()
            .flat_map(|ch| per_channel.iter().map(move |(f, b)| column_tag(f, b, ch)))
            .collect()
    }

    pub fn validate(&self, params: &ExtractionParams) -> Result<()> {
        let bad = |m: String| Err(Error::FeatureSet(format!("set {}: {m}", self.set.name())));
        if self.features.is_empty() {
            return bad("no features selected".into());
        }
        let known: Vec<&str> = match self.set {
            SetId::A => SET_A_SCALAR.iter().chain(&SET_A_BANDED).copied().collect(),
            SetId::B => vec!["psd"],
            SetId::C => SET_C_FEATURES.to_vec(),
            SetId::D => ImfFeatureVector::NAMES.to_vec(),
            SetId::Mhs => vec!["mhs"],
            SetId::Hhsa => vec!["hhsa"],
        };
        if let Some(f) = self.features.iter().find(|f| !known.contains(&f.as_str())) {
            return bad(format!("unknown feature {f:?} (expected one of {})", known.join(", ")));
        }
        let banded = match self.set {
            SetId::A => self.features.iter().any(|f| SET_A_BANDED.contains(&f.as_str())),
            SetId::B | SetId::C => true,
            _ => false,
        };
        if banded && self.bands.is_empty() {
            return bad("no bands selected".into());
        }
        for b in &self.bands {
            let ok = match self.set {
                SetId::C => DwtBand::ALL.iter().any(|d| d.name() == b),
                _ => params.bands.iter().any(|p| &p.name == b),
            };
            if !ok {
                return bad(format!("unknown band {b:?}"));
            }
        }
        if self.set.uses_emd() {
            if self.imfs.is_empty() || self.imfs.contains(&0) {
                return bad("IMF indices must be non-empty and 1-based".into());
            }
            if self.set == SetId::Hhsa && self.imfs != (1..=self.imfs.len()).collect::<Vec<_>>() {
                return bad("HHSA uses a leading run of IMFs 1..m".into());
            }
        }
        let mut seen = self.channels.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.channels.len() {
            return bad("duplicate channel".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionParams {
    pub sift: SiftConfig,
    /// Spectral bands for PSI, RIR and spectral entropy.
    pub bands: Vec<Band>,
    pub welch: WelchConfig,
    /// Window framing for the window-averaged sets B and C.
    pub window_s: f64,
    pub hop_s: f64,
    pub dwt_levels: usize,
    pub higuchi_k_max: usize,
    pub mhs: SpectrumConfig,
    pub hhsa_carrier: SpectrumConfig,
    pub hhsa_am: SpectrumConfig,
}

impl Default for ExtractionParams {
    fn default() -> Self {
        ExtractionParams {
            sift: SiftConfig::default(),
            bands: default_bands(),
            welch: WelchConfig::default(),
            window_s: 4.0,
            hop_s: 2.0,
            dwt_levels: 5,
            higuchi_k_max: 8,
            mhs: SpectrumConfig { freq_min: 5.0, freq_max: 45.0, n_bins: 64 },
            hhsa_carrier: SpectrumConfig { freq_min: 5.0, freq_max: 45.0, n_bins: 5 },
            hhsa_am: SpectrumConfig { freq_min: 5.0, freq_max: 45.0, n_bins: 5 },
        }
    }
}

impl ExtractionParams {
    pub fn validate(&self) -> Result<()> {
        self.sift.validate()?;
        self.mhs.validate()?;
        self.hhsa_carrier.validate()?;
        self.hhsa_am.validate()?;
        crate::features::validate_bands(&self.bands, super::dataset::SAMPLE_RATE)?;
        if !(self.window_s > 0.0 && self.hop_s > 0.0) {
            return Err(Error::InvalidWindow(format!(
                "window {} s and hop {} s must be positive",
                self.window_s, self.hop_s
            )));
        }
        if self.dwt_levels == 0 || self.higuchi_k_max < 2 {
            return Err(Error::InvalidConfig("dwt_levels must be >= 1 and higuchi_k_max >= 2".into()));
        }
        Ok(())
    }
}

fn resolve_channels(spec: &FeatureSetSpec, trial: &Trial) -> Result<Vec<usize>> {
    if spec.channels.is_empty() {
        return Ok((0..trial.channel_names.len()).collect());
    }
    spec.channels
        .iter()
        .map(|c| {
            trial
                .channel_names
                .iter()
                .position(|n| n == c)
                .ok_or_else(|| Error::UnknownChannel(c.clone()))
        })
        .collect()
}

struct Cache<'a> {
    trial: &'a Trial,
    decs: Vec<Option<ImfDecomposition>>,
}

/// Per-trial output for one set: a row plus its quality flags.
type RowOut = (Vec<f64>, Vec<QualityFlag>);

impl Cache<'_> {
    fn flag(&self, ch: usize, message: String) -> QualityFlag {
        QualityFlag {
            trial_id: self.trial.id(),
            channel: self.trial.channel_names[ch].clone(),
            message,
        }
    }

    fn signal(&self, ch: usize) -> Result<Signal> {
        Signal::new(self.trial.channels[ch].clone(), self.trial.fs)
    }

    fn set_a(&self, spec: &FeatureSetSpec, ch: usize, p: &ExtractionParams) -> Result<Vec<f64>> {
        let x = self.signal(ch)?;
        let needs_bands = spec
            .features
            .iter()
            .any(|f| SET_A_BANDED.contains(&f.as_str()) || f == "spectral_entropy");
        let (psi, summary) = if needs_bands {
            let psi = band_powers(&x, &p.bands, &p.welch)?;
            let s = rir_and_entropy(&psi)?;
            (psi, Some(s))
        } else {
            (Vec::new(), None)
        };
        let band_index = |name: &str| p.bands.iter().position(|b| b.name == name).unwrap_or(0);
        let needs_hjorth = spec.features.iter().any(|f| f == "mobility" || f == "complexity");
        let hj = if needs_hjorth { Some(hjorth(&x)?) } else { None };
        let mut out = Vec::new();
        for f in &spec.features {
            match f.as_str() {
                "mobility" => out.push(hj.unwrap().mobility),
                "complexity" => out.push(hj.unwrap().complexity),
                "hfd" => out.push(higuchi_fd(&x, p.higuchi_k_max)?.value),
                "pfd" => out.push(petrosian_fd(&x)?),
                "dfa" => out.push(dfa(&x, &default_dfa_boxes(x.len()))?),
                "hurst" => out.push(hurst(&x)?),
                "spectral_entropy" => out.push(summary.as_ref().unwrap().entropy),
                "psi" => out.extend(spec.bands.iter().map(|b| psi[band_index(b)])),
                "rir" => {
                    let rir = &summary.as_ref().unwrap().rir;
                    out.extend(spec.bands.iter().map(|b| rir[band_index(b)]));
                }
                other => return Err(Error::FeatureSet(format!("unknown set A feature {other}"))),
            }
        }
        Ok(out)
    }

    fn set_b(&self, spec: &FeatureSetSpec, ch: usize, p: &ExtractionParams) -> Result<Vec<f64>> {
        let windows = segment_windows(&self.signal(ch)?, p.window_s, p.hop_s)?;
        let bands: Vec<Band> = spec
            .bands
            .iter()
            .map(|b| p.bands.iter().find(|x| &x.name == b).cloned().unwrap())
            .collect();
        let single = WelchConfig { window_s: p.window_s, hop_s: p.window_s };
        let mut acc = vec![0.0; bands.len()];
        for w in &windows {
            for (a, v) in acc.iter_mut().zip(band_powers(w, &bands, &single)?) {
                *a += v;
            }
        }
        Ok(acc.into_iter().map(|a| a / windows.len() as f64).collect())
    }

    fn set_c(&self, spec: &FeatureSetSpec, ch: usize, p: &ExtractionParams) -> Result<Vec<f64>> {
        let windows = segment_windows(&self.signal(ch)?, p.window_s, p.hop_s)?;
        let mut acc = vec![0.0; spec.bands.len() * spec.features.len()];
        for w in &windows {
            let dec = dwt_slice(w.samples(), w.fs(), p.dwt_levels)?;
            let feats = band_features(&dec)?;
            let mut j = 0;
            for b in &spec.bands {
                let bf = feats.iter().find(|f| f.band.name() == b).unwrap();
                for f in &spec.features {
                    acc[j] += if f == "dwt_energy" { bf.energy } else { bf.entropy };
                    j += 1;
                }
            }
        }
        Ok(acc.into_iter().map(|a| a / windows.len() as f64).collect())
    }

    fn dec(&self, ch: usize) -> &ImfDecomposition {
        self.decs[ch].as_ref().expect("decomposition computed for EMD sets")
    }

    fn missing(&self, ch: usize, want: usize) -> Option<QualityFlag> {
        let have = self.dec(ch).imfs.len();
        (have < want).then(|| {
            self.flag(ch, format!("only {have} IMFs, {want} requested; missing IMF features set to 0"))
        })
    }

    fn set_d(&self, spec: &FeatureSetSpec, ch: usize) -> Result<RowOut> {
        let dec = self.dec(ch);
        let mut out = Vec::new();
        for &i in &spec.imfs {
            let v = match dec.imfs.get(i - 1) {
                Some(imf) => features_of(&imf.samples, &attributes_of(&imf.samples, dec.fs)?)?,
                None => ImfFeatureVector::default(),
            };
            out.extend(spec.features.iter().map(|f| v.get(f).unwrap()));
        }
        let flags = self.missing(ch, *spec.imfs.iter().max().unwrap()).into_iter().collect();
        Ok((out, flags))
    }

    fn set_mhs(&self, spec: &FeatureSetSpec, ch: usize, p: &ExtractionParams) -> Result<RowOut> {
        let dec = self.dec(ch);
        let mut out = Vec::new();
        for &i in &spec.imfs {
            match dec.imfs.get(i - 1) {
                Some(imf) => {
                    let attrs = attributes_of(&imf.samples, dec.fs)?;
                    out.extend(marginal_of_attributes(&attrs, &p.mhs).values);
                }
                None => out.extend(std::iter::repeat_n(0.0, p.mhs.n_bins)),
            }
        }
        let flags = self.missing(ch, *spec.imfs.iter().max().unwrap()).into_iter().collect();
        Ok((out, flags))
    }

    fn set_hhsa(&self, spec: &FeatureSetSpec, ch: usize, p: &ExtractionParams) -> Result<RowOut> {
        let m = spec.imfs.len();
        let h = holo_spectrum_of(self.dec(ch), Some(m), &p.hhsa_carrier, &p.hhsa_am, &p.sift)?;
        Ok((h.grid, self.missing(ch, m).into_iter().collect()))
    }

    fn row(&self, spec: &FeatureSetSpec, p: &ExtractionParams) -> Result<RowOut> {
        let channels = resolve_channels(spec, self.trial)?;
        let per_channel: Vec<Result<RowOut>> = channels
            .par_iter()
            .map(|&ch| {
                let ctx = |e: Error| {
                    Error::FeatureSet(format!(
                        "set {} trial {} channel {}: {e}",
                        spec.set.name(),
                        self.trial.id(),
                        self.trial.channel_names[ch]
                    ))
                };
                match spec.set {
                    SetId::A => self.set_a(spec, ch, p).map(|v| (v, vec![])),
                    SetId::B => self.set_b(spec, ch, p).map(|v| (v, vec![])),
                    SetId::C => self.set_c(spec, ch, p).map(|v| (v, vec![])),
                    SetId::D => self.set_d(spec, ch),
                    SetId::Mhs => self.set_mhs(spec, ch, p),
                    SetId::Hhsa => self.set_hhsa(spec, ch, p),
                }
                .map_err(ctx)
            })
            .collect();
        let mut row = Vec::new();
        let mut flags = Vec::new();
        for r in per_channel {
            let (v, f) = r?;
            row.extend(v);
            flags.extend(f);
        }
        Ok((row, flags))
    }
}

/// Every requested set's row for one trial. First-level decompositions are
/// computed once per channel and shared by sets D, MHS and HHSA.
pub fn extract_trial(
    trial: &Trial,
    specs: &[FeatureSetSpec],
    params: &ExtractionParams,
) -> Result<Vec<RowOut>> {
    trial.validate()?;
    let mut emd_channels = vec![false; trial.channels.len()];
    for spec in specs.iter().filter(|s| s.set.uses_emd()) {
        for ch in resolve_channels(spec, trial)? {
            emd_channels[ch] = true;
        }
    }
    let decs: Vec<Option<ImfDecomposition>> = emd_channels
        .par_iter()
        .enumerate()
        .map(|(ch, &needed)| {
            needed.then(|| decompose_slice(&trial.channels[ch], trial.fs, &params.sift)).transpose()
        })
        .collect::<Result<_>>()?;
    let cache = Cache { trial, decs };
    specs.iter().map(|s| cache.row(s, params)).collect()
}

/// Builds one matrix per spec over `n` trials produced on demand by
/// `source`, so large datasets never need to be held in memory.
pub fn build_feature_sets_from<F>(
    n: usize,
    source: F,
    specs: &[FeatureSetSpec],
    params: &ExtractionParams,
) -> Result<Vec<FeatureMatrix>>
where
    F: Fn(usize) -> Result<Trial> + Sync,
{
    params.validate()?;
    for s in specs {
        s.validate(params)?;
    }
    if n == 0 {
        return Err(Error::FeatureSet("no trials".into()));
    }
    let per_trial: Vec<Result<(String, Vec<String>, Vec<RowOut>)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let trial = source(i)?;
            let names: Vec<String> = trial.channel_names.clone();
            Ok((trial.id(), names, extract_trial(&trial, specs, params)?))
        })
        .collect();
    let mut mats: Vec<FeatureMatrix> = Vec::with_capacity(specs.len());
    let mut first_names: Option<Vec<String>> = None;
    for (i, r) in per_trial.into_iter().enumerate() {
        let (id, names, rows) = r?;
        if i == 0 {
            for spec in specs {
                let selected = if spec.channels.is_empty() { names.clone() } else { spec.channels.clone() };
                mats.push(FeatureMatrix {
                    set: spec.set,
                    trial_ids: Vec::with_capacity(n),
                    columns: spec.columns(&selected, params),
                    rows: Vec::with_capacity(n),
                    flags: Vec::new(),
                });
            }
            first_names = Some(names);
        } else if first_names.as_ref() != Some(&names) && specs.iter().any(|s| s.channels.is_empty()) {
            return Err(Error::FeatureSet(format!(
                "trial {id} lists its channels in a different order than the first trial"
            )));
        }
        for (m, (row, flags)) in mats.iter_mut().zip(rows) {
            m.trial_ids.push(id.clone());
            m.rows.push(row);
            m.flags.extend(flags);
        }
    }
    for m in &mats {
        m.validate()?;
    }
    Ok(mats)
}

pub fn build_feature_sets(
    trials: &[Trial],
    specs: &[FeatureSetSpec],
    params: &ExtractionParams,
) -> Result<Vec<FeatureMatrix>> {
    build_feature_sets_from(trials.len(), |i| Ok(trials[i].clone()), specs, params)
}

pub fn build_feature_set(
    trials: &[Trial],
    spec: &FeatureSetSpec,
    params: &ExtractionParams,
) -> Result<FeatureMatrix> {
    Ok(build_feature_sets(trials, std::slice::from_ref(spec), params)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::dataset::DEAP_CHANNELS;
    use crate::pipeline::synth::{synth_trial, SynthConfig};

    fn trials(n: u32, samples: usize) -> Vec<Trial> {
        let cfg = SynthConfig { n_trials: n.max(2), n_samples: samples, ..SynthConfig::default() };
        (1..=n).map(|t| synth_trial(&cfg, 1, t).unwrap()).collect()
    }

    fn all_channels() -> Vec<String> {
        DEAP_CHANNELS.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn default_column_counts() {
        let p = ExtractionParams::default();
        let ch = all_channels();
        let dims = |set, dim| FeatureSetSpec::default_for(set, dim).columns(&ch, &p).len();
        assert_eq!(dims(SetId::A, Dimension::Valence), 416);
        assert_eq!(dims(SetId::B, Dimension::Valence), 64);
        assert_eq!(dims(SetId::C, Dimension::Valence), 64);
        assert_eq!(dims(SetId::C, Dimension::Arousal), 256);
        assert_eq!(dims(SetId::D, Dimension::Valence), 256);
        assert_eq!(dims(SetId::D, Dimension::Arousal), 288);
        assert_eq!(dims(SetId::Mhs, Dimension::Valence), 8192);
        assert_eq!(dims(SetId::Hhsa, Dimension::Valence), 800);
        for set in SetId::ALL {
            for d in [Dimension::Valence, Dimension::Arousal] {
                FeatureSetSpec::default_for(set, d).validate(&p).unwrap();
            }
        }
    }

    #[test]
    fn window_features_average_window_values() {
        let t = trials(1, 1280);
        let p = ExtractionParams::default();
        let spec_b = FeatureSetSpec::default_for(SetId::B, Dimension::Valence);
        let spec_c = FeatureSetSpec::default_for(SetId::C, Dimension::Arousal);
        let mats = build_feature_sets(&t, &[spec_b, spec_c], &p).unwrap();
        let x = Signal::new(t[0].channels[3].clone(), 128.0).unwrap();
        let windows = segment_windows(&x, 4.0, 2.0).unwrap();
        assert_eq!(windows.len(), 4);
        let single = WelchConfig { window_s: 4.0, hop_s: 4.0 };
        let bands = vec![p.bands[2].clone(), p.bands[3].clone()];
        let per_window: Vec<Vec<f64>> =
            windows.iter().map(|w| band_powers(w, &bands, &single).unwrap()).collect();
        for b in 0..2 {
            let mean = per_window.iter().map(|v| v[b]).sum::<f64>() / 4.0;
            let got = mats[0].rows[0][3 * 2 + b];
            assert!((got - mean).abs() <= 1e-12 * mean.abs().max(1.0), "{got} vs {mean}");
        }
        let gamma_energy: Vec<f64> = windows
            .iter()
            .map(|w| {
                let dec = dwt_slice(w.samples(), 128.0, 5).unwrap();
                dec.details[0].iter().map(|c| c * c).sum::<f64>()
            })
            .collect();
        let mean = gamma_energy.iter().sum::<f64>() / 4.0;
        // channel 3, band gamma is the last of four, energy comes first
        let got = mats[1].rows[0][3 * 8 + 6];
        assert!((got - mean).abs() <= 1e-12 * mean, "{got} vs {mean}");
        assert_eq!(mats[1].columns[3 * 8 + 6], "dwt_energy@gamma@F7");
    }

    #[test]
    fn emd_sets_share_decompositions_and_pad() {
        let t = trials(2, 512);
        let p = ExtractionParams::default();
        let mut d = FeatureSetSpec::default_for(SetId::D, Dimension::Valence);
        d.imfs = vec![1, 2, 12];
        d.channels = vec!["Cz".into(), "Fp1".into()];
        let mats = build_feature_sets(&t, &[d], &p).unwrap();
        let m = &mats[0];
        assert_eq!(m.dim(), 2 * 3 * 2);
        assert_eq!(m.columns[0], "sp_ited@imf1@Cz");
        // IMF 12 never exists at this length
        assert_eq!(&m.rows[0][4..6], &[0.0, 0.0]);
        assert_eq!(m.flags.len(), 4);
        assert!(m.flags[0].message.contains("missing IMF features set to 0"));
    }

    #[test]
    fn specs_are_validated() {
        let p = ExtractionParams::default();
        let mut s = FeatureSetSpec::default_for(SetId::A, Dimension::Valence);
        s.features.push("nope".into());
        assert!(s.validate(&p).is_err());
        let mut s = FeatureSetSpec::default_for(SetId::C, Dimension::Valence);
        s.bands = vec!["alpha_low".into()];
        assert!(s.validate(&p).is_err());
        let mut s = FeatureSetSpec::default_for(SetId::Hhsa, Dimension::Valence);
        s.imfs = vec![2, 3];
        assert!(s.validate(&p).is_err());
        let mut s = FeatureSetSpec::default_for(SetId::B, Dimension::Valence);
        s.channels = vec!["Nope".into()];
        assert!(matches!(build_feature_set(&trials(1, 512), &s, &p), Err(Error::UnknownChannel(_))));
    }

    #[test]
    fn set_a_selection_and_extras() {
        let t = trials(1, 1280);
        let p = ExtractionParams::default();
        let mut s = FeatureSetSpec::default_for(SetId::A, Dimension::Valence);
        s.features = vec!["dfa".into(), "hurst".into(), "rir".into()];
        s.bands = vec!["theta".into(), "gamma".into()];
        s.channels = vec!["Oz".into()];
        let m = build_feature_set(&t, &s, &p).unwrap();
        assert_eq!(m.columns, vec!["dfa@all@Oz", "hurst@all@Oz", "rir@theta@Oz", "rir@gamma@Oz"]);
        let x = Signal::new(t[0].channels[14].clone(), 128.0).unwrap();
        let psi = band_powers(&x, &p.bands, &p.welch).unwrap();
        let total: f64 = psi.iter().sum();
        assert!((m.rows[0][2] - psi[0] / total).abs() < 1e-15);
        assert!((m.rows[0][3] - psi[4] / total).abs() < 1e-15);
    }
}
