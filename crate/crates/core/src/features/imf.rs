//! Per-IMF energy and energy-density statistics.
//!
//! Definitions used here:
//!
//! * ITED(t) = a(t)², the instantaneous temporal energy density.
//! * `sp_ited` is the standard deviation of sample time (seconds) under ITED
//!   normalised to a probability density.
//! * `d_ited` is the mean absolute deviation of ITED(t) from its mean.
//! * `sp_omega` is the population standard deviation of ω(t) in Hz.
//! * ISED is a 64-bin histogram of a(t)² over ω(t) on `[0, fs/2]`,
//!   normalised to a density in 1/Hz. `d_ised` is the mean absolute
//!   deviation of its bin heights.

use serde::{Deserialize, Serialize};

use crate::emd::Imf;
use crate::error::{Error, Result};
use crate::hilbert::InstantaneousAttributes;

pub const ISED_BINS: usize = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ImfFeatureVector {
    pub energy: f64,
    pub sp_ited: f64,
    pub d_ited: f64,
    pub sp_omega: f64,
    pub d_ised: f64,
}

impl ImfFeatureVector {
    pub const NAMES: [&'static str; 5] = ["energy", "sp_ited", "d_ited", "sp_omega", "d_ised"];

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "energy" => self.energy,
            "sp_ited" => self.sp_ited,
            "d_ited" => self.d_ited,
            "sp_omega" => self.sp_omega,
            "d_ised" => self.d_ised,
            _ => return None,
        })
    }
}

pub fn energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn mean_abs_dev(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean).abs()).sum::<f64>() / n
}

pub fn imf_features(imf: &Imf, attrs: &InstantaneousAttributes) -> Result<ImfFeatureVector> {
    features_of(&imf.samples, attrs)
}

pub(crate) fn features_of(x: &[f64], attrs: &InstantaneousAttributes) -> Result<ImfFeatureVector> {
    let n = x.len();
    if attrs.amplitude.len() != n || attrs.frequency.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "IMF has {n} samples, attributes have {}",
            attrs.amplitude.len()
        )));
    }
    let e = energy(x);
    if e == 0.0 {
        return Ok(ImfFeatureVector::default());
    }
    let fs = attrs.fs;
    let ited: Vec<f64> = attrs.amplitude.iter().map(|a| a * a).collect();
    let mass: f64 = ited.iter().sum();

    let t_mean: f64 = ited.iter().enumerate().map(|(i, w)| w * i as f64).sum::<f64>() / mass;
    let t_var: f64 = ited
        .iter()
        .enumerate()
        .map(|(i, w)| w * (i as f64 - t_mean).powi(2))
        .sum::<f64>()
        / mass;

    let w_mean = attrs.frequency.iter().sum::<f64>() / n as f64;
    let w_var =
        attrs.frequency.iter().map(|w| (w - w_mean).powi(2)).sum::<f64>() / n as f64;

    let nyquist = fs / 2.0;
    let mut hist = [0.0; ISED_BINS];
    for (w, p) in attrs.frequency.iter().zip(&ited) {
        let k = ((w / nyquist) * ISED_BINS as f64).floor().clamp(0.0, (ISED_BINS - 1) as f64);
        hist[k as usize] += p;
    }
    let scale = 1.0 / (mass * nyquist / ISED_BINS as f64);
    for h in &mut hist {
        *h *= scale;
    }

    Ok(ImfFeatureVector {
        energy: e,
        sp_ited: t_var.sqrt() / fs,
        d_ited: mean_abs_dev(&ited),
        sp_omega: w_var.sqrt(),
        d_ised: mean_abs_dev(&hist),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;

    use super::*;
    use crate::hilbert::attributes_of;

    fn tone() -> Vec<f64> {
        (0..1280).map(|i| (2.0 * PI * 10.0 * i as f64 / 128.0).cos()).collect()
    }

    #[test]
    fn tone_features() {
        let x = tone();
        let attrs = attributes_of(&x, 128.0).unwrap();
        let f = features_of(&x, &attrs).unwrap();
        assert!((f.energy - 640.0).abs() < 1e-9, "{f:?}");
        assert!(f.sp_omega < 0.5, "{f:?}");
        let uniform = 10.0 / 12f64.sqrt();
        assert!((f.sp_ited / uniform - 1.0).abs() < 0.05, "{f:?}");
    }

    #[test]
    fn mid_bin_tone_concentrates_ised() {
        // 10.5 Hz sits mid-bin, so all energy lands in one ISED bin of height 1/Δf
        let x: Vec<f64> = (0..1280).map(|i| (2.0 * PI * 10.5 * i as f64 / 128.0).cos()).collect();
        let attrs = attributes_of(&x, 128.0).unwrap();
        let f = features_of(&x, &attrs).unwrap();
        let peak = ISED_BINS as f64 / 64.0;
        let expected = 2.0 * peak * (ISED_BINS - 1) as f64 / (ISED_BINS * ISED_BINS) as f64;
        assert!((f.d_ised - expected).abs() < 0.02 * expected, "{f:?} vs {expected}");
    }

    #[test]
    fn ised_is_a_density() {
        let x: Vec<f64> = (0..1024).map(|i| ((i * i) as f64 * 1e-3).sin()).collect();
        let attrs = attributes_of(&x, 128.0).unwrap();
        let ited: Vec<f64> = attrs.amplitude.iter().map(|a| a * a).collect();
        let mass: f64 = ited.iter().sum();
        let mut hist = [0.0; ISED_BINS];
        for (w, p) in attrs.frequency.iter().zip(&ited) {
            let k = ((w / 1.0).floor() as usize).min(ISED_BINS - 1);
            hist[k] += p / mass;
        }
        let f = features_of(&x, &attrs).unwrap();
        assert!((f.d_ised - mean_abs_dev(&hist)).abs() < 1e-12);
    }

    #[test]
    fn zero_imf_gives_zeros() {
        let x = vec![0.0; 256];
        let attrs = attributes_of(&x, 128.0).unwrap();
        assert_eq!(features_of(&x, &attrs).unwrap(), ImfFeatureVector::default());
    }

    #[test]
    fn shape_mismatch() {
        let x = tone();
        let attrs = attributes_of(&x[..100], 128.0).unwrap();
        assert!(features_of(&x, &attrs).is_err());
    }

    #[test]
    fn names_round_trip() {
        let f = ImfFeatureVector { energy: 1.0, sp_ited: 2.0, d_ited: 3.0, sp_omega: 4.0, d_ised: 5.0 };
        let got: Vec<f64> = ImfFeatureVector::NAMES.iter().map(|n| f.get(n).unwrap()).collect();
        assert_eq!(got, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(f.get("nope"), None);
    }

    proptest! {
        #[test]
        fn energy_is_additive_over_halves(
            a in prop::collection::vec(-1000i32..1000, 1..200),
            b in prop::collection::vec(-1000i32..1000, 1..200),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let whole: Vec<f64> = a.iter().chain(&b).copied().collect();
            prop_assert_eq!(energy(&whole), energy(&a) + energy(&b));
        }

        #[test]
        fn energy_additivity_real_valued(
            a in prop::collection::vec(-10.0f64..10.0, 1..200),
            b in prop::collection::vec(-10.0f64..10.0, 1..200),
        ) {
            let whole: Vec<f64> = a.iter().chain(&b).copied().collect();
            let (e, ea, eb) = (energy(&whole), energy(&a), energy(&b));
            prop_assert!((e - (ea + eb)).abs() <= 1e-12 * e.max(1.0));
        }

        #[test]
        fn features_are_deterministic_and_nonnegative(
            x in prop::collection::vec(-5.0f64..5.0, 8..300),
        ) {
            let attrs = attributes_of(&x, 128.0).unwrap();
            let f1 = features_of(&x, &attrs).unwrap();
            let f2 = features_of(&x, &attributes_of(&x, 128.0).unwrap()).unwrap();
            prop_assert_eq!(f1.energy.to_bits(), f2.energy.to_bits());
            prop_assert_eq!(f1.d_ised.to_bits(), f2.d_ised.to_bits());
            prop_assert_eq!(f1.sp_ited.to_bits(), f2.sp_ited.to_bits());
            for v in [f1.energy, f1.sp_ited, f1.d_ited, f1.sp_omega, f1.d_ised] {
                prop_assert!(v >= 0.0);
            }
        }
    }
}
