//! Exact Gaussian score inference for mixed fractional Brownian motion.

pub mod acceptance;
pub mod constants;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod params;
pub mod quadrature;
pub mod scores;
pub mod simulate;
pub mod special;
pub mod spectral;
pub mod toeplitz;

pub use error::{Error, ErrorKind, Result};
pub use spectral::{HurstIndex, Regime, SpectralConstants};
