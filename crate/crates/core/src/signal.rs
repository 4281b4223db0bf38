//! Signal container, FFT-based analytic signal, extrema detection and windowing.

use std::cell::RefCell;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled, finite, single-channel time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    samples: Vec<f64>,
    fs: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidSampleRate(fs));
        }
        if samples.len() < 2 {
            return Err(Error::TooShort { len: samples.len(), min: 2 });
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { samples, fs })
    }

    /// Builds a signal by evaluating `f` at `t = i / fs` for `n` samples.
    pub fn from_fn(n: usize, fs: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..n).map(|i| f(i as f64 / fs)).collect(), fs)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }
}

/// Real input paired with its discrete Hilbert transform.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSignal {
    pub real: Vec<f64>,
    pub imag: Vec<f64>,
    pub fs: f64,
}

impl AnalyticSignal {
    pub fn envelope(&self) -> Vec<f64> {
        self.real.iter().zip(&self.imag).map(|(r, i)| r.hypot(*i)).collect()
    }

    /// Wrapped phase in (-pi, pi].
    pub fn phase(&self) -> Vec<f64> {
        self.real.iter().zip(&self.imag).map(|(r, i)| i.atan2(*r)).collect()
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
}

/// Discrete Hilbert transform of `x` by the frequency-domain method at the
/// exact input length.
pub fn hilbert_transform(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    // one-sided spectrum: keep DC (and Nyquist for even n), double the positive half
    let half = n / 2;
    let positive_end = if n % 2 == 0 { half } else { half + 1 };
    for (k, c) in buf.iter_mut().enumerate() {
        let gain = if k == 0 || (n % 2 == 0 && k == half) {
            1.0
        } else if k < positive_end {
            2.0
        } else {
            0.0
        };
        *c *= gain;
    }
    fft_inverse(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|c| c.im * scale).collect()
}

pub fn analytic_signal(x: &Signal) -> AnalyticSignal {
    AnalyticSignal {
        real: x.samples.clone(),
        imag: hilbert_transform(&x.samples),
        fs: x.fs,
    }
}

/// Interior local maxima and minima, as sample indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremaIndex {
    pub maxima: Vec<usize>,
    pub minima: Vec<usize>,
}

impl ExtremaIndex {
    pub fn count(&self) -> usize {
        self.maxima.len() + self.minima.len()
    }
}

pub fn find_extrema(x: &Signal) -> Result<ExtremaIndex> {
    if x.len() < 3 {
        return Err(Error::TooShortForExtrema(x.len()));
    }
    Ok(extrema_of(&x.samples))
}

/// Extrema of a raw slice; plateaus collapse to one extremum at the run midpoint.
pub(crate) fn extrema_of(x: &[f64]) -> ExtremaIndex {
    let mut out = ExtremaIndex::default();
    let n = x.len();
    if n < 3 {
        return out;
    }
    let mut i = 1;
    while i < n - 1 {
        let prev = x[i - 1];
        let cur = x[i];
        if prev == cur {
            // leading plateau touching the boundary
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && x[j + 1] == cur {
            j += 1;
        }
        if j == n - 1 {
            break;
        }
        let next = x[j + 1];
        let mid = i + (j - i) / 2;
        if prev < cur && next < cur {
            out.maxima.push(mid);
        } else if prev > cur && next > cur {
            out.minima.push(mid);
        }
        i = j + 1;
    }
    out
}

/// Number of sign changes, skipping exact zeros.
pub fn zero_crossings(x: &[f64]) -> usize {
    let mut count = 0;
    let mut last_sign = 0.0f64;
    for &v in x {
        if v == 0.0 {
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            count += 1;
        }
        last_sign = s;
    }
    count
}

fn seconds_to_samples(seconds: f64, fs: f64, what: &str) -> Result<usize> {
    let exact = seconds * fs;
    let rounded = exact.round();
    if !(rounded >= 1.0) || (exact - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(Error::InvalidWindow(format!(
            "{what} of {seconds} s at {fs} Hz is not a positive whole number of samples"
        )));
    }
    Ok(rounded as usize)
}

/// Splits a signal into fixed-length windows; trailing samples that do not
/// fill a whole window are dropped.
pub fn segment_windows(x: &Signal, window_s: f64, hop_s: f64) -> Result<Vec<Signal>> {
    let win = seconds_to_samples(window_s, x.fs, "window")?;
    let hop = seconds_to_samples(hop_s, x.fs, "hop")?;
    if win > x.len() {
        return Err(Error::InvalidWindow(format!(
            "window of {win} samples is longer than the {}-sample signal",
            x.len()
        )));
    }
    if win < 2 {
        return Err(Error::InvalidWindow("window must span at least 2 samples".into()));
    }
    let count = (x.len() - win) / hop + 1;
    Ok((0..count)
        .map(|w| Signal {
            samples: x.samples[w * hop..w * hop + win].to_vec(),
            fs: x.fs,
        })
        .collect())
}
