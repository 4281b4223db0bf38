//! Empirical mode decomposition by iterative sifting.
//!
//! Envelopes are natural cubic splines through the local maxima (minima),
//! with the two extrema nearest each end mirrored about that endpoint so the
//! spline is pinned beyond the data. Each sift subtracts the envelope mean
//! until the Cauchy-type change measure
//! `SD = sum((h_prev - h)^2) / sum(h_prev^2)` drops below the threshold and
//! the candidate has as many zero crossings as extrema (within one), or the
//! iteration cap is reached.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{extrema_of, zero_crossings, ExtremaIndex, Signal};
use crate::spline::NaturalSpline;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SiftConfig {
    pub max_imfs: usize,
    pub max_sift_iterations: usize,
    pub sd_threshold: f64,
    pub envelope_tolerance: f64,
}

impl Default for SiftConfig {
    fn default() -> Self {
        Self {
            max_imfs: 10,
            max_sift_iterations: 300,
            sd_threshold: 0.2,
            envelope_tolerance: 0.05,
        }
    }
}

impl SiftConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_imfs == 0 || self.max_sift_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_imfs and max_sift_iterations must be positive".into(),
            ));
        }
        if !(self.sd_threshold > 0.0 && self.sd_threshold < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "sd_threshold must lie in (0, 1), got {}",
                self.sd_threshold
            )));
        }
        if !(self.envelope_tolerance > 0.0 && self.envelope_tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "envelope_tolerance must be positive, got {}",
                self.envelope_tolerance
            )));
        }
        Ok(())
    }
}

/// One intrinsic mode function.
#[derive(Debug, Clone, PartialEq)]
pub struct Imf {
    pub samples: Vec<f64>,
    /// 1-based extraction order.
    pub index: usize,
    /// Envelope subtractions performed while sifting this IMF.
    pub iterations: usize,
}

/// Post-hoc check of the two IMF conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImfCheck {
    pub extrema: usize,
    pub zero_crossings: usize,
    /// RMS of the envelope mean over RMS of the samples; `None` when
    /// there are too few extrema to build envelopes.
    pub envelope_mean_ratio: Option<f64>,
}

impl ImfCheck {
    pub fn extrema_condition(&self) -> bool {
        self.extrema.abs_diff(self.zero_crossings) <= 1
    }

    pub fn envelope_condition(&self, tolerance: f64) -> bool {
        self.envelope_mean_ratio.is_none_or(|r| r <= tolerance)
    }
}

impl Imf {
    pub fn check(&self) -> ImfCheck {
        let ext = extrema_of(&self.samples);
        let envelope_mean_ratio = mean_envelope(&self.samples, &ext).ok().map(|m| {
            let rms = |v: &[f64]| (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
            let denom = rms(&self.samples);
            if denom == 0.0 {
                0.0
            } else {
                rms(&m) / denom
            }
        });
        ImfCheck {
            extrema: ext.count(),
            zero_crossings: zero_crossings(&self.samples),
            envelope_mean_ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImfDecomposition {
    pub imfs: Vec<Imf>,
    pub residue: Vec<f64>,
    pub source_length: usize,
    pub fs: f64,
}

impl ImfDecomposition {
    /// Sum of all IMFs plus the residue.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.residue.clone();
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(&imf.samples) {
                *o += v;
            }
        }
        out
    }
}

/// Mean of the upper and lower spline envelopes.
pub fn envelope_mean(x: &Signal, extrema: &ExtremaIndex) -> Result<Vec<f64>> {
    mean_envelope(x.samples(), extrema)
}

fn mirrored_knots(x: &[f64], idx: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let end = (x.len() - 1) as f64;
    let k = idx.len();
    let mut knots = Vec::with_capacity(k + 4);
    let mut values = Vec::with_capacity(k + 4);
    for &i in [idx[1], idx[0]].iter() {
        knots.push(-(i as f64));
        values.push(x[i]);
    }
    for &i in idx {
        knots.push(i as f64);
        values.push(x[i]);
    }
    for &i in [idx[k - 1], idx[k - 2]].iter() {
        knots.push(2.0 * end - i as f64);
        values.push(x[i]);
    }
    (knots, values)
}

fn mean_envelope(x: &[f64], extrema: &ExtremaIndex) -> Result<Vec<f64>> {
    if extrema.maxima.len() < 2 || extrema.minima.len() < 2 {
        return Err(Error::InsufficientExtrema {
            maxima: extrema.maxima.len(),
            minima: extrema.minima.len(),
        });
    }
    let n = x.len();
    let mut upper = vec![0.0; n];
    let mut lower = vec![0.0; n];
    let (k, v) = mirrored_knots(x, &extrema.maxima);
    NaturalSpline::new(&k, &v).sample_grid(n, &mut upper);
    let (k, v) = mirrored_knots(x, &extrema.minima);
    NaturalSpline::new(&k, &v).sample_grid(n, &mut lower);
    Ok(upper.iter().zip(&lower).map(|(u, l)| 0.5 * (u + l)).collect())
}

/// Extracts the highest-frequency oscillation present in `x`.
pub fn sift_imf(x: &Signal, cfg: &SiftConfig) -> Result<Imf> {
    cfg.validate()?;
    let (samples, iterations) = sift(x.samples(), cfg)?;
    Ok(Imf { samples, index: 1, iterations })
}

fn sift(x: &[f64], cfg: &SiftConfig) -> Result<(Vec<f64>, usize)> {
    let mut h = x.to_vec();
    let mut extrema = extrema_of(&h);
    let mut iterations = 0;
    while iterations < cfg.max_sift_iterations {
        let mean = match mean_envelope(&h, &extrema) {
            Ok(m) => m,
            Err(e) if iterations == 0 => return Err(e),
            // the candidate ran out of extrema mid-sift; keep what we have
            Err(_) => break,
        };
        let mut change = 0.0;
        let mut energy = 0.0;
        for (v, m) in h.iter_mut().zip(&mean) {
            change += m * m;
            energy += *v * *v;
            *v -= m;
        }
        iterations += 1;
        extrema = extrema_of(&h);
        let sd = if energy > 0.0 { change / energy } else { 0.0 };
        if sd < cfg.sd_threshold && extrema.count().abs_diff(zero_crossings(&h)) <= 1 {
            break;
        }
    }
    Ok((h, iterations))
}

/// Full decomposition: IMFs are peeled off the running residue until it has
/// fewer than two maxima or minima, or `max_imfs` is reached.
pub fn decompose(x: &Signal, cfg: &SiftConfig) -> Result<ImfDecomposition> {
    cfg.validate()?;
    decompose_slice(x.samples(), x.fs(), cfg)
}

pub(crate) fn decompose_slice(x: &[f64], fs: f64, cfg: &SiftConfig) -> Result<ImfDecomposition> {
    if x.is_empty() {
        return Err(Error::TooShort { len: 0, min: 2 });
    }
    let mut residue = x.to_vec();
    let mut imfs = Vec::new();
    while imfs.len() < cfg.max_imfs {
        let ext = extrema_of(&residue);
        if ext.maxima.len() < 2 || ext.minima.len() < 2 {
            break;
        }
        let (samples, iterations) = match sift(&residue, cfg) {
            Ok(r) => r,
            Err(Error::InsufficientExtrema { .. }) => break,
            Err(e) => return Err(e),
        };
        for (r, v) in residue.iter_mut().zip(&samples) {
            *r -= v;
        }
        imfs.push(Imf { samples, index: imfs.len() + 1, iterations });
    }
    Ok(ImfDecomposition { imfs, residue, source_length: x.len(), fs })
}
