//! Multifractal and volatility analysis of high-frequency return series.
//!
//! Numerical routines are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common `f64` instantiations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ingest;
pub mod mfdfa;
pub mod regression;
pub mod rolling;
pub mod scalar;
pub mod stats;
pub mod surrogate;
pub mod table;
pub mod volatility;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Returns = ingest::ReturnSeries<f64>;
pub type Returns32 = ingest::ReturnSeries<f32>;
pub type Surface = mfdfa::FluctuationSurface<f64>;
pub type Surface32 = mfdfa::FluctuationSurface<f32>;
pub type Spectrum = mfdfa::MultifractalSpectrum<f64>;
pub type Spectrum32 = mfdfa::MultifractalSpectrum<f32>;
pub type Decomposition = mfdfa::DecompositionReport<f64>;
pub type MfdfaConfig = mfdfa::MfdfaConfig<f64>;
pub type Acf = stats::AcfResult<f64>;
pub type VolParams = volatility::VolModelParams<f64>;
pub type VolFit = volatility::VolatilityFit<f64>;
pub type Rolling = rolling::RollingResult<f64>;
