use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("signal needs at least {min} samples, got {len}")]
    TooShort { len: usize, min: usize },

    #[error("sampling rate must be positive and finite, got {0}")]
    InvalidSampleRate(f64),

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("too short for extrema: need at least 3 samples, got {0}")]
    TooShortForExtrema(usize),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("insufficient extrema: {maxima} maxima, {minima} minima (need 2 of each)")]
    InsufficientExtrema { maxima: usize, minima: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty IMF list")]
    EmptyImfList,

    #[error("second-level sift failed: {0}")]
    SecondLevelSift(String),

    #[error("signal too short for a {levels}-level decomposition: need at least {min} samples, got {len}")]
    WaveletTooShort { len: usize, min: usize, levels: usize },

    #[error("constant signal")]
    ConstantSignal,

    #[error("zero fluctuation")]
    ZeroFluctuation,

    #[error("not enough usable scales: {0}")]
    TooFewScales(String),

    #[error("band {name} ({lo}-{hi} Hz) lies beyond the Nyquist frequency {nyquist} Hz")]
    BandBeyondNyquist { name: String, lo: f64, hi: f64, nyquist: f64 },

    #[error("no in-band power")]
    NoInBandPower,

    #[error("{path}: {message}")]
    Dataset { path: PathBuf, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown channel {0}")]
    UnknownChannel(String),

    #[error("empty channel selection")]
    EmptyChannelSelection,

    #[error("feature set: {0}")]
    FeatureSet(String),

    #[error("{0}")]
    Learn(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("{groups} feature groups exceed the exhaustive-search limit of {limit}; use greedy forward selection")]
    TooManyGroups { groups: usize, limit: usize },

    #[error("{0}")]
    Format(String),
}

impl Error {
    /// Whether the error stems from bad input (as opposed to a failure while computing).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Learn(_))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
