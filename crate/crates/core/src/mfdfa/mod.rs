//! Multifractal detrended fluctuation analysis.
//!
//! The pipeline is profile → segment-wise polynomial detrending on `2·N_s`
//! forward and backward segments → q-th order fluctuation functions →
//! log-log scaling fits for `h(q)` → `τ(q)`, `f(α)` and `Δh`.

mod decompose;
mod fluctuation;
mod profile;
mod spectrum;

pub use decompose::{decompose, DecompositionReport, MIN_SHUFFLED_WIDTH};
pub use fluctuation::{
    fluctuation_surface, segment_variances, validate_scales, FluctuationSurface, PolyBasis, SurfaceDiagnostics,
};
pub use profile::{make_profile, Profile};
pub use spectrum::{delta_h, fit_hurst, singularity_spectrum, spectrum_from_h, tau_spectrum, MultifractalSpectrum};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `|q|` below this is treated as the logarithmic-average case.
pub const Q_ZERO_TOLERANCE: f64 = 1e-10;

/// Fit range for full-sample original and shuffled series.
pub const FULL_SAMPLE_FIT_RANGE: (usize, usize) = (3000, 270_000);
/// Fit range for full-sample phase-randomized surrogates.
pub const FULL_SAMPLE_SURROGATE_FIT_RANGE: (usize, usize) = (100, 100_000);
/// Fit range for one-year original and shuffled series.
pub const YEAR_FIT_RANGE: (usize, usize) = (3000, 90_000);
/// Fit range for one-year surrogates.
pub const YEAR_SURROGATE_FIT_RANGE: (usize, usize) = (100, 20_000);

/// Uniform grid `min, min + step, ..., max`; values within `Q_ZERO_TOLERANCE`
/// of zero are snapped to exactly zero.
pub fn q_range<T: Scalar>(min: T, max: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !(max >= min) || !min.is_finite() || !max.is_finite() {
        return Err(Error::InvalidArgument(format!("bad q range {min}:{max}:{step}")));
    }
    let count = ((max - min) / step).round().to_usize().unwrap_or(0) + 1;
    Ok((0..count)
        .map(|i| {
            let q = min + T::from_usize_lossy(i) * step;
            if q.abs() < T::lit(Q_ZERO_TOLERANCE) {
                T::zero()
            } else {
                q
            }
        })
        .collect())
}

/// Index of the grid point matching `q` to within 1e-9.
pub fn q_index<T: Scalar>(grid: &[T], q: T) -> Option<usize> {
    let tol = T::lit(1e-9) * q.abs().max(T::one());
    grid.iter().position(|&g| (g - q).abs() <= tol)
}

/// `count` logarithmically spaced integer scales in `[min, max]`, deduplicated.
pub fn log_scales(min: usize, max: usize, count: usize) -> Vec<usize> {
    if count <= 1 || max <= min {
        return vec![min];
    }
    let (a, b) = ((min as f64).ln(), (max as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .collect();
    out.dedup();
    out
}

/// Settings for one full MF-DFA run.
#[derive(Debug, Clone, PartialEq)]
pub struct MfdfaConfig<T = f64> {
    pub q_grid: Vec<T>,
    pub scale_min: usize,
    /// Largest scale; `None` means `N / 4`.
    pub scale_max: Option<usize>,
    pub scale_count: usize,
    pub detrend_order: usize,
    pub fit_range: (usize, usize),
}

impl<T: Scalar> Default for MfdfaConfig<T> {
    fn default() -> Self {
        Self {
            q_grid: q_range(T::lit(-25.0), T::lit(25.0), T::lit(0.2)).expect("static grid"),
            scale_min: 16,
            scale_max: None,
            scale_count: 40,
            detrend_order: 3,
            fit_range: FULL_SAMPLE_FIT_RANGE,
        }
    }
}

impl<T: Scalar> MfdfaConfig<T> {
    pub fn scales_for(&self, n: usize) -> Vec<usize> {
        log_scales(self.scale_min, self.scale_max.unwrap_or(n / 4), self.scale_count)
    }
}

/// Surface and fitted spectrum of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct MfdfaResult<T = f64> {
    pub surface: FluctuationSurface<T>,
    pub spectrum: MultifractalSpectrum<T>,
}

/// Runs the whole pipeline on a return series.
pub fn analyze<T: Scalar>(returns: &[T], config: &MfdfaConfig<T>) -> Result<MfdfaResult<T>> {
    let profile = make_profile(returns)?;
    let scales = config.scales_for(returns.len());
    let surface = fluctuation_surface(&profile, &config.q_grid, &scales, config.detrend_order)?;
    let spectrum = fit_hurst(&surface, config.fit_range)?;
    Ok(MfdfaResult { surface, spectrum })
}
