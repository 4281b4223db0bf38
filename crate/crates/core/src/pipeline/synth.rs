//! Synthetic trials with a controllable class-dependent band-power effect.
//!
//! Each channel is 1/f-shaped Gaussian noise restricted to 4-45 Hz plus a
//! class-independent amplitude-modulated tone. In high-class trials the
//! Fourier coefficients inside the effect band are scaled so that in-band
//! power is `1 + effect` times the background.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dataset::{Dimension, Ratings, Trial, DEAP_CHANNELS, N_CHANNELS, SAMPLE_RATE};
use crate::error::{Error, Result};
use crate::features::Band;
use crate::learn::Label;
use crate::signal::{fft_forward, fft_inverse};

const BACKGROUND: (f64, f64) = (4.0, 45.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_subjects: u32,
    pub n_trials: u32,
    pub n_samples: usize,
    /// Extra in-band power of high-class trials, as a multiple of background.
    pub effect: f64,
    pub band: Band,
    /// Rating that carries the class; the other rating is drawn independently.
    pub dimension: Dimension,
    /// Fraction of each subject's trials labelled high.
    pub high_fraction: f64,
    pub am_tones: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            n_subjects: 2,
            n_trials: 40,
            n_samples: 7680,
            effect: 2.0,
            band: Band::new("gamma", 25.0, 40.0),
            dimension: Dimension::Valence,
            high_fraction: 0.5,
            am_tones: true,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.effect.is_finite() && self.effect >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "effect size must be non-negative, got {}",
                self.effect
            )));
        }
        if self.n_subjects == 0 || self.n_trials < 2 {
            return Err(Error::InvalidConfig(
                "need at least one subject with two trials".into(),
            ));
        }
        if self.n_samples < 256 {
            return Err(Error::InvalidConfig(format!(
                "n_samples {} is below the 256-sample minimum",
                self.n_samples
            )));
        }
        if !(self.band.lo >= 0.0 && self.band.lo < self.band.hi && self.band.hi <= SAMPLE_RATE / 2.0) {
            return Err(Error::InvalidConfig(format!(
                "effect band [{}, {}) must lie within [0, {}]",
                self.band.lo,
                self.band.hi,
                SAMPLE_RATE / 2.0
            )));
        }
        if !(self.high_fraction > 0.0 && self.high_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "high_fraction {} must lie strictly between 0 and 1",
                self.high_fraction
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_subjects as usize * self.n_trials as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// High-class trial count per subject, kept within `1..n_trials`.
    pub fn high_per_subject(&self) -> u32 {
        ((self.high_fraction * self.n_trials as f64).round() as u32).clamp(1, self.n_trials - 1)
    }

    /// Subject and trial ids (both 1-based) of the `i`-th trial.
    pub fn ids(&self, i: usize) -> (u32, u32) {
        let n = self.n_trials as usize;
        ((i / n) as u32 + 1, (i % n) as u32 + 1)
    }

    fn rng(&self, subject: u32, trial: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((u64::from(subject) << 32) | u64::from(trial));
        rng
    }

    /// Class of `trial` on the target dimension and on the other one.
    fn classes(&self, subject: u32, trial: u32) -> (Label, Label) {
        let mut rng = self.rng(subject, 0);
        let high = self.high_per_subject() as usize;
        let mut pick = || {
            let mut order: Vec<u32> = (1..=self.n_trials).collect();
            order.shuffle(&mut rng);
            if order[..high].contains(&trial) {
                Label::High
            } else {
                Label::Low
            }
        };
        let target = pick();
        (target, pick())
    }
}

fn rating(label: Label, rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random();
    match label {
        Label::High => 5.0 + 4.0 * u,
        Label::Low => 1.0 + 3.5 * u,
    }
}

fn channel(cfg: &SynthConfig, boost: bool, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = cfg.n_samples;
    let fs = SAMPLE_RATE;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(StandardNormal.sample(&mut *rng), 0.0))
        .collect();
    fft_forward(&mut buf);
    let scale = (cfg.effect + 1.0).sqrt();
    let mut base_power = 0.0;
    for (k, c) in buf.iter_mut().enumerate() {
        let f = k.min(n - k) as f64 * fs / n as f64;
        let mut gain = if (BACKGROUND.0..=BACKGROUND.1).contains(&f) { f.sqrt().recip() } else { 0.0 };
        base_power += gain * gain;
        if boost && cfg.band.contains(f) {
            gain *= scale;
        }
        *c *= gain;
    }
    fft_inverse(&mut buf);
    // unit expected background variance
    let norm = (n as f64 * base_power).sqrt().recip();
    let mut out: Vec<f64> = buf.iter().map(|c| c.re * norm).collect();
    if cfg.am_tones {
        let carrier = rng.random_range(8.0..30.0);
        let am = rng.random_range(0.5..4.0);
        let depth = rng.random_range(0.2..0.8);
        let (p1, p2) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
        for (i, v) in out.iter_mut().enumerate() {
            let t = i as f64 / fs;
            *v += 0.5 * (1.0 + depth * (2.0 * PI * am * t + p1).cos()) * (2.0 * PI * carrier * t + p2).cos();
        }
    }
    out
}

/// One synthetic trial; `subject` and `trial` are 1-based. The result depends
/// only on the config and the two ids.
pub fn synth_trial(cfg: &SynthConfig, subject: u32, trial: u32) -> Result<Trial> {
    cfg.validate()?;
    if !(1..=cfg.n_subjects).contains(&subject) || !(1..=cfg.n_trials).contains(&trial) {
        return Err(Error::InvalidConfig(format!(
            "trial ({subject}, {trial}) is outside {} subjects x {} trials",
            cfg.n_subjects, cfg.n_trials
        )));
    }
    let (target, other) = cfg.classes(subject, trial);
    let mut rng = cfg.rng(subject, trial);
    let (r_target, r_other) = (rating(target, &mut rng), rating(other, &mut rng));
    let ratings = match cfg.dimension {
        Dimension::Valence => Ratings { valence: r_target, arousal: r_other },
        Dimension::Arousal => Ratings { valence: r_other, arousal: r_target },
    };
    let boost = target == Label::High && cfg.effect > 0.0;
    let channels = (0..N_CHANNELS).map(|_| channel(cfg, boost, &mut rng)).collect();
    Ok(Trial {
        subject_id: subject,
        trial_id: trial,
        fs: SAMPLE_RATE,
        channel_names: DEAP_CHANNELS.iter().map(|s| s.to_string()).collect(),
        channels,
        ratings,
    })
}

pub fn synth_dataset(cfg: &SynthConfig) -> Result<Vec<Trial>> {
    cfg.validate()?;
    (0..cfg.len())
        .into_par_iter()
        .map(|i| {
            let (s, t) = cfg.ids(i);
            synth_trial(cfg, s, t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{band_powers, WelchConfig};
    use crate::pipeline::dataset::{labels_for, LabelConfig};
    use crate::signal::Signal;

    fn small(effect: f64) -> SynthConfig {
        SynthConfig { n_trials: 10, n_samples: 1280, effect, ..SynthConfig::default() }
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let cfg = small(1.0);
        assert_eq!(synth_trial(&cfg, 1, 3).unwrap(), synth_trial(&cfg, 1, 3).unwrap());
        let other = SynthConfig { seed: 1, ..cfg.clone() };
        assert_ne!(synth_trial(&cfg, 1, 3).unwrap(), synth_trial(&other, 1, 3).unwrap());
        let a = synth_dataset(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        assert_eq!(a, pool.install(|| synth_dataset(&cfg).unwrap()));
    }

    #[test]
    fn labels_follow_the_split() {
        let cfg = SynthConfig { high_fraction: 0.6, ..small(0.0) };
        let trials = synth_dataset(&cfg).unwrap();
        let y = labels_for(&trials, &LabelConfig::default());
        let high = y.iter().filter(|l| **l == Label::High).count();
        assert_eq!(high, 12);
        for t in &trials {
            t.validate().unwrap();
        }
        let ya = labels_for(&trials, &LabelConfig { dimension: Dimension::Arousal, ..LabelConfig::default() });
        assert_eq!(ya.iter().filter(|l| **l == Label::High).count(), 12);
        assert_ne!(y, ya);
    }

    #[test]
    fn effect_scales_in_band_power() {
        let cfg = SynthConfig { n_trials: 20, am_tones: false, ..small(2.0) };
        let trials = synth_dataset(&cfg).unwrap();
        let y = labels_for(&trials, &LabelConfig::default());
        let band = [cfg.band.clone()];
        let mut power = [0.0; 2];
        for (t, l) in trials.iter().zip(&y) {
            for c in &t.channels {
                let s = Signal::new(c.clone(), 128.0).unwrap();
                power[l.index()] += band_powers(&s, &band, &WelchConfig::default()).unwrap()[0];
            }
        }
        let ratio = power[1] / power[0];
        assert!((ratio - 3.0).abs() < 0.15, "{ratio}");
    }

    #[test]
    fn rejects_negative_effect() {
        assert!(synth_trial(&small(-0.1), 1, 1).is_err());
        assert!(synth_trial(&small(0.0), 1, 11).is_err());
        assert!(SynthConfig { high_fraction: 1.0, ..small(0.0) }.validate().is_err());
    }
}
