//! Temporal, band-spectral and per-IMF features.

mod imf;
mod spectral;
mod temporal;

pub(crate) use imf::features_of;
pub use imf::{energy, imf_features, ImfFeatureVector, ISED_BINS};
pub use spectral::{
    band_powers, default_bands, rir_and_entropy, validate_bands, welch, Band, BandSummary, Psd,
    WelchConfig,
};
pub use temporal::{default_dfa_boxes, dfa, higuchi_fd, hjorth, hurst, petrosian_fd, HiguchiFd, Hjorth};
