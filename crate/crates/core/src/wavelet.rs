//! Multilevel db4 discrete wavelet transform and per-band energy/entropy.
//!
//! The transform uses half-sample symmetric border extension and keeps every
//! coefficient the extended convolution produces, so a level maps `n` samples
//! to `(n + 7) / 2` coefficients and reconstruction is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Daubechies 4-vanishing-moment scaling filter (minimum phase), from a
/// 50-digit spectral factorisation.
const DB4_SCALING: [f64; 8] = [
    0.230_377_813_308_896_50,
    0.714_846_570_552_915_65,
    0.630_880_767_929_858_91,
    -0.027_983_769_416_859_854,
    -0.187_034_811_719_093_08,
    0.030_841_381_835_560_764,
    0.032_883_011_666_885_200,
    -0.010_597_401_785_069_032,
];

const TAPS: usize = DB4_SCALING.len();

fn analysis_filters() -> ([f64; TAPS], [f64; TAPS]) {
    let mut lo = [0.0; TAPS];
    let mut hi = [0.0; TAPS];
    for j in 0..TAPS {
        lo[j] = DB4_SCALING[TAPS - 1 - j];
        hi[j] = if j % 2 == 0 { -DB4_SCALING[j] } else { DB4_SCALING[j] };
    }
    (lo, hi)
}

/// Half-sample symmetric extension: `x[-1] = x[0]`, `x[n] = x[n-1]`.
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

fn analyze(x: &[f64], lo: &[f64; TAPS], hi: &[f64; TAPS]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let out_len = (n + TAPS - 1) / 2;
    let mut approx = Vec::with_capacity(out_len);
    let mut detail = Vec::with_capacity(out_len);
    for o in 0..out_len {
        let centre = 2 * o as isize + 1;
        let (mut a, mut d) = (0.0, 0.0);
        for j in 0..TAPS {
            let v = x[reflect(centre - j as isize, n)];
            a += lo[j] * v;
            d += hi[j] * v;
        }
        approx.push(a);
        detail.push(d);
    }
    (approx, detail)
}

fn synthesize(approx: &[f64], detail: &[f64], out_len: usize, lo: &[f64; TAPS], hi: &[f64; TAPS]) -> Vec<f64> {
    let coeffs = approx.len();
    (0..out_len)
        .map(|t| {
            // coefficients o with 0 <= 2o + 1 - t <= TAPS - 1
            let first = t.saturating_sub(1).div_ceil(2);
            let last = ((t + TAPS - 2) / 2).min(coeffs - 1);
            let mut acc = 0.0;
            for o in first..=last {
                let j = 2 * o + 1 - t;
                acc += approx[o] * lo[j] + detail[o] * hi[j];
            }
            acc
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletDecomposition {
    /// D1 (finest) through DL.
    pub details: Vec<Vec<f64>>,
    pub approximation: Vec<f64>,
    pub source_length: usize,
    pub fs: f64,
}

impl WaveletDecomposition {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Nominal frequency range `[fs/2^(j+1), fs/2^j]` of detail level `j` (1-based).
    pub fn detail_range(&self, level: usize) -> (f64, f64) {
        let hi = self.fs / f64::powi(2.0, level as i32);
        (hi / 2.0, hi)
    }

    pub fn reconstruct(&self) -> Vec<f64> {
        let (lo, hi) = analysis_filters();
        let mut approx = self.approximation.clone();
        for level in (0..self.details.len()).rev() {
            let target = if level == 0 { self.source_length } else { self.details[level - 1].len() };
            approx = synthesize(&approx, &self.details[level], target, &lo, &hi);
        }
        approx
    }
}

/// Shortest signal that supports `levels` db4 levels.
pub fn min_length(levels: usize) -> usize {
    (TAPS - 1) << levels
}

pub fn dwt_decompose(x: &Signal, levels: usize) -> Result<WaveletDecomposition> {
    dwt_slice(x.samples(), x.fs(), levels)
}

pub(crate) fn dwt_slice(x: &[f64], fs: f64, levels: usize) -> Result<WaveletDecomposition> {
    if levels == 0 {
        return Err(Error::InvalidConfig("at least one wavelet level is required".into()));
    }
    let min = min_length(levels);
    if x.len() < min {
        return Err(Error::WaveletTooShort { len: x.len(), min, levels });
    }
    let (lo, hi) = analysis_filters();
    let mut details = Vec::with_capacity(levels);
    let mut approx = x.to_vec();
    for _ in 0..levels {
        let (a, d) = analyze(&approx, &lo, &hi);
        details.push(d);
        approx = a;
    }
    Ok(WaveletDecomposition { details, approximation: approx, source_length: x.len(), fs })
}

/// Octave bands carried by the detail levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DwtBand {
    Theta,
    Alpha,
    Beta,
    Gamma,
}

impl DwtBand {
    pub const ALL: [DwtBand; 4] = [DwtBand::Theta, DwtBand::Alpha, DwtBand::Beta, DwtBand::Gamma];

    pub fn range(self) -> (f64, f64) {
        match self {
            DwtBand::Theta => (4.0, 8.0),
            DwtBand::Alpha => (8.0, 16.0),
            DwtBand::Beta => (16.0, 32.0),
            DwtBand::Gamma => (32.0, 64.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DwtBand::Theta => "theta",
            DwtBand::Alpha => "alpha",
            DwtBand::Beta => "beta",
            DwtBand::Gamma => "gamma",
        }
    }

    /// Detail level whose octave matches this band at sampling rate `fs`:
    /// D1 at 128 Hz carries gamma, while at 256 Hz D1 is the 64-128 Hz
    /// octave and gamma moves to D2.
    pub fn level(self, fs: f64) -> Option<usize> {
        let ratio = fs / self.range().1;
        let j = ratio.log2().round();
        if j < 1.0 || (f64::powi(2.0, j as i32) - ratio).abs() > 1e-9 * ratio {
            return None;
        }
        Some(j as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandFeature {
    pub band: DwtBand,
    pub energy: f64,
    /// Shannon entropy (nats) of the normalised squared coefficients.
    pub entropy: f64,
}

pub fn energy_entropy(coeffs: &[f64]) -> (f64, f64) {
    let energy: f64 = coeffs.iter().map(|c| c * c).sum();
    if energy == 0.0 {
        return (0.0, 0.0);
    }
    let entropy = coeffs
        .iter()
        .map(|c| c * c / energy)
        .filter(|p| *p > 0.0)
        .map(|p| -p * p.ln())
        .sum::<f64>();
    (energy, entropy.max(0.0))
}

/// Energy and entropy of the theta, alpha, beta and gamma detail levels.
/// Detail octaves above gamma are not used.
pub fn band_features(dec: &WaveletDecomposition) -> Result<Vec<BandFeature>> {
    DwtBand::ALL
        .iter()
        .map(|&band| {
            let level = band
                .level(dec.fs)
                .filter(|l| *l <= dec.levels())
                .ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "no detail level of a {}-level decomposition at {} Hz covers the {} band",
                        dec.levels(),
                        dec.fs,
                        band.name()
                    ))
                })?;
            let (energy, entropy) = energy_entropy(&dec.details[level - 1]);
            Ok(BandFeature { band, energy, entropy })
        })
        .collect()
}
