//! Fractal dimensions, Hjorth parameters, DFA and the Hurst exponent.

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

fn variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

fn diff(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiguchiFd {
    pub value: f64,
    /// Set when every curve length is zero (constant input); `value` is then 1.
    pub degenerate: bool,
}

pub fn higuchi_fd(x: &Signal, k_max: usize) -> Result<HiguchiFd> {
    let data = x.samples();
    let n = data.len();
    if k_max < 2 || n <= 2 * k_max {
        return Err(Error::TooShort { len: n, min: 2 * k_max.max(2) + 1 });
    }
    let mut log_inv_k = Vec::with_capacity(k_max);
    let mut log_len = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut mean_len = 0.0;
        for m in 0..k {
            let count = (n - m - 1) / k;
            let mut total = 0.0;
            for i in 1..=count {
                total += (data[m + i * k] - data[m + (i - 1) * k]).abs();
            }
            mean_len += total * (n - 1) as f64 / (count * k) as f64 / k as f64;
        }
        mean_len /= k as f64;
        if mean_len == 0.0 {
            return Ok(HiguchiFd { value: 1.0, degenerate: true });
        }
        log_inv_k.push((1.0 / k as f64).ln());
        log_len.push(mean_len.ln());
    }
    Ok(HiguchiFd { value: slope(&log_inv_k, &log_len), degenerate: false })
}

pub fn petrosian_fd(x: &Signal) -> Result<f64> {
    let data = x.samples();
    let n = data.len();
    if n < 3 {
        return Err(Error::TooShort { len: n, min: 3 });
    }
    let d = diff(data);
    let sign_changes = d.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    let nf = n as f64;
    Ok(nf.log10() / (nf.log10() + (nf / (nf + 0.4 * sign_changes as f64)).log10()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hjorth {
    pub mobility: f64,
    pub complexity: f64,
}

pub fn hjorth(x: &Signal) -> Result<Hjorth> {
    let data = x.samples();
    if data.len() < 3 {
        return Err(Error::TooShort { len: data.len(), min: 3 });
    }
    let d1 = diff(data);
    let d2 = diff(&d1);
    let (v0, v1, v2) = (variance(data), variance(&d1), variance(&d2));
    if v0 == 0.0 {
        return Err(Error::ConstantSignal);
    }
    let mobility = (v1 / v0).sqrt();
    let complexity = if v1 == 0.0 { 0.0 } else { (v2 / v1).sqrt() / mobility };
    Ok(Hjorth { mobility, complexity })
}

/// Ten log-spaced box sizes from 4 to `n / 4`, deduplicated.
pub fn default_dfa_boxes(n: usize) -> Vec<usize> {
    log_spaced(4, n / 4, 10)
}

fn log_spaced(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if hi < lo {
        return Vec::new();
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|i| {
            let t = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            (a + t * (b - a)).exp().round() as usize
        })
        .collect();
    out.dedup();
    out
}

/// Detrended fluctuation analysis scaling exponent.
pub fn dfa(x: &Signal, box_sizes: &[usize]) -> Result<f64> {
    let data = x.samples();
    let n = data.len();
    let usable: Vec<usize> = box_sizes.iter().copied().filter(|&b| b >= 4 && 4 * b <= n).collect();
    if usable.len() < 3 {
        return Err(Error::TooFewScales(format!(
            "{} of {} box sizes fit a {n}-sample signal (need 3)",
            usable.len(),
            box_sizes.len()
        )));
    }
    let mean = data.iter().sum::<f64>() / n as f64;
    let mut profile = Vec::with_capacity(n);
    let mut acc = 0.0;
    for v in data {
        acc += v - mean;
        profile.push(acc);
    }
    let mut log_n = Vec::with_capacity(usable.len());
    let mut log_f = Vec::with_capacity(usable.len());
    for &size in &usable {
        let boxes = n / size;
        // x = 0..size is shared by every box
        let xm = (size - 1) as f64 / 2.0;
        let sxx: f64 = (0..size).map(|i| (i as f64 - xm).powi(2)).sum();
        let mut sq = 0.0;
        for b in 0..boxes {
            let seg = &profile[b * size..(b + 1) * size];
            let ym = seg.iter().sum::<f64>() / size as f64;
            let sxy: f64 = seg.iter().enumerate().map(|(i, y)| (i as f64 - xm) * (y - ym)).sum();
            let beta = sxy / sxx;
            sq += seg
                .iter()
                .enumerate()
                .map(|(i, y)| (y - ym - beta * (i as f64 - xm)).powi(2))
                .sum::<f64>();
        }
        let fluct = (sq / (boxes * size) as f64).sqrt();
        if fluct == 0.0 {
            return Err(Error::ZeroFluctuation);
        }
        log_n.push((size as f64).ln());
        log_f.push(fluct.ln());
    }
    Ok(slope(&log_n, &log_f))
}

/// Rescaled-range estimate over log-spaced subseries lengths from 16 to `n / 2`.
pub fn hurst(x: &Signal) -> Result<f64> {
    let data = x.samples();
    let n = data.len();
    if n < 64 {
        return Err(Error::TooShort { len: n, min: 64 });
    }
    let mut log_n = Vec::new();
    let mut log_rs = Vec::new();
    for size in log_spaced(16, n / 2, 10) {
        let chunks = n / size;
        let mut total = 0.0;
        let mut used = 0usize;
        for c in 0..chunks {
            let seg = &data[c * size..(c + 1) * size];
            let mean = seg.iter().sum::<f64>() / size as f64;
            let (mut acc, mut lo, mut hi, mut ss) = (0.0f64, 0.0f64, 0.0f64, 0.0);
            for v in seg {
                let d = v - mean;
                acc += d;
                lo = lo.min(acc);
                hi = hi.max(acc);
                ss += d * d;
            }
            let sd = (ss / size as f64).sqrt();
            if sd > 0.0 {
                total += (hi - lo) / sd;
                used += 1;
            }
        }
        if used > 0 {
            log_n.push((size as f64).ln());
            log_rs.push((total / used as f64).ln());
        }
    }
    if log_n.len() < 2 {
        return Err(Error::TooFewScales("every subseries has zero variance".into()));
    }
    Ok(slope(&log_n, &log_rs))
}
