pub mod emd;
pub mod error;
pub mod features;
pub mod hilbert;
pub mod learn;
pub mod pipeline;
pub mod signal;
mod spline;
pub mod wavelet;

pub use error::{Error, Result};
