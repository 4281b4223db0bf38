//! Instantaneous amplitude/frequency, the Hilbert-Huang spectrum, its
//! marginal, and the two-level Holo-Hilbert spectrum.
//!
//! All spectra accumulate instantaneous amplitude (not energy) into linearly
//! spaced frequency bins. Samples whose frequency falls outside
//! `[freq_min, freq_max]` are dropped.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::emd::{decompose_slice, ImfDecomposition, Imf, SiftConfig};
use crate::error::{Error, Result};
use crate::signal::{hilbert_transform, Signal};

#[derive(Debug, Clone, PartialEq)]
pub struct InstantaneousAttributes {
    pub amplitude: Vec<f64>,
    /// Hz, clamped to `[0, fs/2]`.
    pub frequency: Vec<f64>,
    pub fs: f64,
}

pub fn instantaneous_attributes(imf: &Imf, fs: f64) -> Result<InstantaneousAttributes> {
    attributes_of(&imf.samples, fs)
}

pub(crate) fn attributes_of(x: &[f64], fs: f64) -> Result<InstantaneousAttributes> {
    let n = x.len();
    if n < 4 {
        return Err(Error::TooShort { len: n, min: 4 });
    }
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::InvalidSampleRate(fs));
    }
    let imag = hilbert_transform(x);
    let amplitude: Vec<f64> = x.iter().zip(&imag).map(|(r, i)| r.hypot(*i)).collect();

    let mut phase: Vec<f64> = x.iter().zip(&imag).map(|(r, i)| i.atan2(*r)).collect();
    unwrap_phase(&mut phase);

    let scale = fs / (2.0 * PI);
    let nyquist = fs / 2.0;
    let mut frequency = Vec::with_capacity(n);
    frequency.push((phase[1] - phase[0]) * scale);
    for t in 1..n - 1 {
        frequency.push((phase[t + 1] - phase[t - 1]) * 0.5 * scale);
    }
    frequency.push((phase[n - 1] - phase[n - 2]) * scale);
    for f in &mut frequency {
        *f = f.clamp(0.0, nyquist);
    }
    Ok(InstantaneousAttributes { amplitude, frequency, fs })
}

fn unwrap_phase(phase: &mut [f64]) {
    let mut offset = 0.0;
    let mut prev = phase[0];
    for p in phase.iter_mut().skip(1) {
        let raw = *p;
        let mut d = raw - prev;
        while d > PI {
            d -= 2.0 * PI;
            offset -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
            offset += 2.0 * PI;
        }
        prev = raw;
        *p = raw + offset;
    }
}

/// Frequency range and bin count for a spectrum axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub freq_min: f64,
    pub freq_max: f64,
    pub n_bins: usize,
}

impl SpectrumConfig {
    pub fn new(freq_min: f64, freq_max: f64, n_bins: usize) -> Result<Self> {
        let cfg = Self { freq_min, freq_max, n_bins };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.freq_min > 0.0 && self.freq_min < self.freq_max && self.freq_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < freq_min < freq_max, got {}..{}",
                self.freq_min, self.freq_max
            )));
        }
        if self.n_bins == 0 {
            return Err(Error::InvalidConfig("n_bins must be at least 1".into()));
        }
        Ok(())
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        let span = self.freq_max - self.freq_min;
        (0..=self.n_bins)
            .map(|k| self.freq_min + k as f64 * span / self.n_bins as f64)
            .collect()
    }

    pub fn bin_width(&self) -> f64 {
        (self.freq_max - self.freq_min) / self.n_bins as f64
    }

    /// Bin holding `f`, or `None` outside `[freq_min, freq_max]`.
    ///
    /// Bins are half-open `[lo, hi)` except the last, which is closed.
    /// Values within 1e-9 of a bin width below an interior edge are snapped
    /// onto that edge, so a frequency computed as `10 - 1e-13` lands in
    /// the same bin as `10`.
    pub fn bin_index(&self, f: f64) -> Option<usize> {
        if !(f >= self.freq_min && f <= self.freq_max) {
            return None;
        }
        let pos = (f - self.freq_min) / self.bin_width();
        Some(((pos + 1e-9).floor() as usize).min(self.n_bins - 1))
    }
}

/// Time-frequency amplitude distribution, `n_bins` rows by `n_samples` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertSpectrum {
    pub grid: Vec<f64>,
    pub n_bins: usize,
    pub n_samples: usize,
    pub bin_edges: Vec<f64>,
}

impl HilbertSpectrum {
    pub fn at(&self, bin: usize, t: usize) -> f64 {
        self.grid[bin * self.n_samples + t]
    }

    pub fn row(&self, bin: usize) -> &[f64] {
        &self.grid[bin * self.n_samples..(bin + 1) * self.n_samples]
    }

    /// Sum of the row sums, so it equals the marginal total bit for bit.
    pub fn total(&self) -> f64 {
        (0..self.n_bins).map(|k| self.row(k).iter().sum::<f64>()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalSpectrum {
    pub values: Vec<f64>,
    pub bin_edges: Vec<f64>,
}

impl MarginalSpectrum {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn argmax(&self) -> usize {
        argmax(&self.values)
    }
}

/// Carrier frequency (rows) by amplitude-modulation frequency (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoloSpectrum {
    pub grid: Vec<f64>,
    pub carrier_edges: Vec<f64>,
    pub am_edges: Vec<f64>,
}

impl HoloSpectrum {
    pub fn carrier_bins(&self) -> usize {
        self.carrier_edges.len() - 1
    }

    pub fn am_bins(&self) -> usize {
        self.am_edges.len() - 1
    }

    pub fn at(&self, carrier: usize, am: usize) -> f64 {
        self.grid[carrier * self.am_bins() + am]
    }

    pub fn total(&self) -> f64 {
        self.grid.iter().sum()
    }

    /// `(carrier bin, am bin)` of the largest cell.
    pub fn argmax(&self) -> (usize, usize) {
        let k = argmax(&self.grid);
        (k / self.am_bins(), k % self.am_bins())
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

pub fn hilbert_spectrum(imfs: &[Imf], fs: f64, cfg: &SpectrumConfig) -> Result<HilbertSpectrum> {
    cfg.validate()?;
    let first = imfs.first().ok_or(Error::EmptyImfList)?;
    let n = first.samples.len();
    if let Some(bad) = imfs.iter().find(|imf| imf.samples.len() != n) {
        return Err(Error::ShapeMismatch(format!(
            "IMF {} has {} samples, expected {n}",
            bad.index,
            bad.samples.len()
        )));
    }
    let mut grid = vec![0.0; cfg.n_bins * n];
    for imf in imfs {
        let attrs = attributes_of(&imf.samples, fs)?;
        for (t, (a, f)) in attrs.amplitude.iter().zip(&attrs.frequency).enumerate() {
            if let Some(k) = cfg.bin_index(*f) {
                grid[k * n + t] += a;
            }
        }
    }
    Ok(HilbertSpectrum { grid, n_bins: cfg.n_bins, n_samples: n, bin_edges: cfg.bin_edges() })
}

/// Row sums of the Hilbert spectrum.
pub fn marginal_spectrum(h: &HilbertSpectrum) -> MarginalSpectrum {
    MarginalSpectrum {
        values: (0..h.n_bins).map(|k| h.row(k).iter().sum()).collect(),
        bin_edges: h.bin_edges.clone(),
    }
}

/// Marginal spectrum of a single IMF's attributes without materialising the grid.
pub fn marginal_of_attributes(attrs: &InstantaneousAttributes, cfg: &SpectrumConfig) -> MarginalSpectrum {
    let mut values = vec![0.0; cfg.n_bins];
    for (a, f) in attrs.amplitude.iter().zip(&attrs.frequency) {
        if let Some(k) = cfg.bin_index(*f) {
            values[k] += a;
        }
    }
    MarginalSpectrum { values, bin_edges: cfg.bin_edges() }
}

pub fn holo_spectrum(
    x: &Signal,
    carrier: &SpectrumConfig,
    am: &SpectrumConfig,
    sift: &SiftConfig,
) -> Result<HoloSpectrum> {
    sift.validate()?;
    if x.len() < 4 {
        return Err(Error::SecondLevelSift(format!(
            "{} samples is too short for two sifting levels",
            x.len()
        )));
    }
    let dec = decompose_slice(x.samples(), x.fs(), sift)?;
    holo_spectrum_of(&dec, None, carrier, am, sift)
}

/// Holo-Hilbert spectrum from an existing first-level decomposition,
/// optionally restricted to its first `first_level_imfs` IMFs.
pub fn holo_spectrum_of(
    dec: &ImfDecomposition,
    first_level_imfs: Option<usize>,
    carrier: &SpectrumConfig,
    am: &SpectrumConfig,
    sift: &SiftConfig,
) -> Result<HoloSpectrum> {
    carrier.validate()?;
    am.validate()?;
    if dec.source_length < 4 {
        return Err(Error::SecondLevelSift(format!(
            "{} samples is too short for two sifting levels",
            dec.source_length
        )));
    }
    let fs = dec.fs;
    let am_bins = am.n_bins;
    let mut grid = vec![0.0; carrier.n_bins * am_bins];
    let take = first_level_imfs.unwrap_or(dec.imfs.len());
    for imf in dec.imfs.iter().take(take) {
        let first = attributes_of(&imf.samples, fs)?;
        let second_dec = decompose_slice(&first.amplitude, fs, sift)
            .map_err(|e| Error::SecondLevelSift(e.to_string()))?;
        for second_imf in &second_dec.imfs {
            let second = attributes_of(&second_imf.samples, fs)
                .map_err(|e| Error::SecondLevelSift(e.to_string()))?;
            for t in 0..first.frequency.len() {
                let (Some(c), Some(m)) =
                    (carrier.bin_index(first.frequency[t]), am.bin_index(second.frequency[t]))
                else {
                    continue;
                };
                grid[c * am_bins + m] += second.amplitude[t];
            }
        }
    }
    Ok(HoloSpectrum { grid, carrier_edges: carrier.bin_edges(), am_edges: am.bin_edges() })
}
