//! Welch power spectral density, band powers, relative intensity ratio and
//! spectral entropy.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{fft_forward, Signal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        Band { name: name.into(), lo, hi }
    }

    pub fn contains(&self, f: f64) -> bool {
        self.lo <= f && f < self.hi
    }
}

/// theta 4-8, alpha_low 8-10, alpha_high 10-13, beta 13-25, gamma 25-40 Hz.
pub fn default_bands() -> Vec<Band> {
    vec![
        Band::new("theta", 4.0, 8.0),
        Band::new("alpha_low", 8.0, 10.0),
        Band::new("alpha_high", 10.0, 13.0),
        Band::new("beta", 13.0, 25.0),
        Band::new("gamma", 25.0, 40.0),
    ]
}

pub fn validate_bands(bands: &[Band], fs: f64) -> Result<()> {
    if bands.is_empty() {
        return Err(Error::InvalidConfig("band list is empty".into()));
    }
    for b in bands {
        if !(b.lo >= 0.0 && b.lo < b.hi && b.hi.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "band {} has invalid range [{}, {})",
                b.name, b.lo, b.hi
            )));
        }
        if b.hi > fs / 2.0 {
            return Err(Error::BandBeyondNyquist {
                name: b.name.clone(),
                lo: b.lo,
                hi: b.hi,
                nyquist: fs / 2.0,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WelchConfig {
    pub window_s: f64,
    pub hop_s: f64,
}

impl Default for WelchConfig {
    fn default() -> Self {
        WelchConfig { window_s: 4.0, hop_s: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    pub freqs: Vec<f64>,
    pub density: Vec<f64>,
}

impl Psd {
    pub fn band_sum(&self, band: &Band) -> f64 {
        self.freqs
            .iter()
            .zip(&self.density)
            .filter(|(f, _)| band.contains(**f))
            .map(|(_, p)| p)
            .sum()
    }
}

/// One-sided Welch estimate with a periodic Hann window and mean removal per
/// segment. A signal shorter than the window is treated as a single segment.
pub fn welch(x: &Signal, cfg: &WelchConfig) -> Result<Psd> {
    let fs = x.fs();
    if !(cfg.window_s > 0.0 && cfg.hop_s > 0.0) {
        return Err(Error::InvalidWindow(format!(
            "window {} s and hop {} s must be positive",
            cfg.window_s, cfg.hop_s
        )));
    }
    let data = x.samples();
    let n = data.len();
    let win = ((cfg.window_s * fs).round() as usize).clamp(2, n);
    let hop = ((cfg.hop_s * fs).round() as usize).max(1);
    let window: Vec<f64> =
        (0..win).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / win as f64).cos()).collect();
    let norm = fs * window.iter().map(|w| w * w).sum::<f64>();
    let bins = win / 2 + 1;
    let mut density = vec![0.0; bins];
    let segments = (n - win) / hop + 1;
    let mut buf = vec![Complex::new(0.0, 0.0); win];
    for s in 0..segments {
        let seg = &data[s * hop..s * hop + win];
        let mean = seg.iter().sum::<f64>() / win as f64;
        for ((b, v), w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = Complex::new((v - mean) * w, 0.0);
        }
        fft_forward(&mut buf);
        for (k, d) in density.iter_mut().enumerate() {
            let one_sided = if k == 0 || (win % 2 == 0 && k == win / 2) { 1.0 } else { 2.0 };
            *d += one_sided * buf[k].norm_sqr() / norm;
        }
    }
    for d in &mut density {
        *d /= segments as f64;
    }
    let freqs = (0..bins).map(|k| k as f64 * fs / win as f64).collect();
    Ok(Psd { freqs, density })
}

/// Sum of PSD values falling in each band.
pub fn band_powers(x: &Signal, bands: &[Band], cfg: &WelchConfig) -> Result<Vec<f64>> {
    validate_bands(bands, x.fs())?;
    let min = (2.0 * x.fs()).ceil() as usize;
    if x.len() < min {
        return Err(Error::TooShort { len: x.len(), min });
    }
    let psd = welch(x, cfg)?;
    Ok(bands.iter().map(|b| psd.band_sum(b)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandSummary {
    pub rir: Vec<f64>,
    /// Shannon entropy of `rir` in nats, divided by ln(#bands).
    pub entropy: f64,
}

pub fn rir_and_entropy(psi: &[f64]) -> Result<BandSummary> {
    let total: f64 = psi.iter().sum();
    if !(total > 0.0) || psi.iter().any(|p| *p < 0.0) {
        return Err(Error::NoInBandPower);
    }
    let rir: Vec<f64> = psi.iter().map(|p| p / total).collect();
    let h: f64 = 0.0 - rir.iter().filter(|r| **r > 0.0).map(|r| r * r.ln()).sum::<f64>();
    let entropy = if psi.len() < 2 {
        0.0
    } else if psi.iter().all(|p| *p == psi[0]) {
        1.0
    } else {
        (h / (psi.len() as f64).ln()).clamp(0.0, 1.0)
    };
    Ok(BandSummary { rir, entropy })
}
