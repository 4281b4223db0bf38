use std::f64::consts::PI;

use holoeeg::emd::{decompose, SiftConfig};
use holoeeg::features::{hjorth, rir_and_entropy};
use holoeeg::hilbert::{hilbert_spectrum, instantaneous_attributes, marginal_spectrum, SpectrumConfig};
use holoeeg::signal::Signal;
use holoeeg::wavelet::{band_features, dwt_decompose};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn noise(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn tones_plus_noise(seed: u64, n: usize, f1: f64, f2: f64) -> Signal {
    let z = noise(seed, n);
    let v = (0..n)
        .map(|i| {
            let t = i as f64 / 128.0;
            (2.0 * PI * f1 * t).sin() + 0.5 * (2.0 * PI * f2 * t).cos() + 0.2 * z[i]
        })
        .collect();
    Signal::new(v, 128.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn hilbert_spectrum_accounting(
        seed in any::<u64>(),
        n in 256usize..1024,
        f1 in 2.0f64..60.0,
        f2 in 0.5f64..20.0,
        lo in 0.5f64..20.0,
        width in 5.0f64..44.0,
        bins in 1usize..80,
    ) {
        let x = tones_plus_noise(seed, n, f1, f2);
        let d = decompose(&x, &SiftConfig::default()).unwrap();
        prop_assume!(!d.imfs.is_empty());
        let cfg = SpectrumConfig::new(lo, lo + width, bins).unwrap();
        let h = hilbert_spectrum(&d.imfs, 128.0, &cfg).unwrap();
        let m = marginal_spectrum(&h);
        prop_assert_eq!(m.total(), h.total());

        let mut oracle = 0.0;
        for imf in &d.imfs {
            let a = instantaneous_attributes(imf, 128.0).unwrap();
            for (amp, f) in a.amplitude.iter().zip(&a.frequency) {
                prop_assert!((0.0..=64.0).contains(f));
                if lo <= *f && *f <= lo + width {
                    oracle += amp;
                }
            }
        }
        prop_assert!((h.total() - oracle).abs() <= 1e-9 * oracle.max(1.0), "{} vs {}", h.total(), oracle);

        let edges = cfg.bin_edges();
        let span = (lo + width) - lo;
        prop_assert_eq!(edges.len(), bins + 1);
        for (k, e) in edges.iter().enumerate() {
            prop_assert_eq!(*e, lo + k as f64 * span / bins as f64);
        }
    }

    #[test]
    fn dwt_reconstruction_and_feature_bounds(seed in any::<u64>(), which in 0usize..4) {
        let n = [256, 512, 1280, 7680][which];
        let x = Signal::new(noise(seed, n), 128.0).unwrap();
        let d = dwt_decompose(&x, 5).unwrap();
        let r = d.reconstruct();
        let err: f64 = r.iter().zip(x.samples()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = x.samples().iter().map(|a| a * a).sum::<f64>().sqrt();
        prop_assert!(err / norm < 1e-10);
        for bf in band_features(&d).unwrap() {
            let level = bf.band.level(128.0).unwrap();
            let len = d.details[level - 1].len() as f64;
            prop_assert!(bf.energy >= 0.0);
            prop_assert!(bf.entropy >= 0.0 && bf.entropy <= len.ln() + 1e-12);
        }
    }

    #[test]
    fn rir_sums_to_one_and_entropy_is_bounded(psi in prop::collection::vec(0.0f64..1e3, 2..8)) {
        prop_assume!(psi.iter().sum::<f64>() > 0.0);
        let s = rir_and_entropy(&psi).unwrap();
        prop_assert!((s.rir.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&s.entropy));
        let nonzero = psi.iter().filter(|p| **p > 0.0).count();
        prop_assert_eq!(s.entropy == 0.0, nonzero == 1);
    }

    #[test]
    fn hjorth_mobility_is_scale_free(seed in any::<u64>(), exp in -8i32..8) {
        let x = Signal::new(noise(seed, 512), 128.0).unwrap();
        let c = 2f64.powi(exp);
        let y = Signal::new(x.samples().iter().map(|v| -c * v).collect(), 128.0).unwrap();
        prop_assert_eq!(hjorth(&x).unwrap().mobility, hjorth(&y).unwrap().mobility);
    }
}

#[test]
fn equal_band_powers_have_unit_entropy() {
    for k in 2..8 {
        assert_eq!(rir_and_entropy(&vec![0.25; k]).unwrap().entropy, 1.0);
    }
}
