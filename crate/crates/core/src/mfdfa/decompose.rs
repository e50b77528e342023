use super::spectrum::{delta_h, MultifractalSpectrum};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Below this `Δh_sh` the ratio `R` is left undefined.
pub const MIN_SHUFFLED_WIDTH: f64 = 1e-6;

/// Split of the multifractal width into correlation and distribution parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionReport<T = f64> {
    pub h2_orig: Option<T>,
    pub delta_h_orig: T,
    pub delta_h_corr: T,
    pub delta_h_sh: T,
    pub delta_h_su: T,
    /// `Δh_corr / Δh_sh`; `None` when `Δh_sh` is numerically zero.
    pub ratio_r: Option<T>,
}

pub fn decompose<T: Scalar>(
    orig: &MultifractalSpectrum<T>,
    shuffled: &MultifractalSpectrum<T>,
    surrogate: &MultifractalSpectrum<T>,
    q_min: T,
    q_max: T,
) -> Result<DecompositionReport<T>> {
    for other in [shuffled, surrogate] {
        let same = other.q_grid.len() == orig.q_grid.len()
            && other
                .q_grid
                .iter()
                .zip(&orig.q_grid)
                .all(|(&a, &b)| (a - b).abs() <= T::lit(1e-9));
        if !same {
            return Err(Error::InvalidArgument("spectra must share one q-grid".into()));
        }
    }
    let delta_h_orig = delta_h(orig, q_min, q_max)?;
    let delta_h_sh = delta_h(shuffled, q_min, q_max)?;
    let delta_h_su = delta_h(surrogate, q_min, q_max)?;
    let delta_h_corr = delta_h_orig - delta_h_sh;
    let ratio_r = (delta_h_sh.abs() >= T::lit(MIN_SHUFFLED_WIDTH)).then(|| delta_h_corr / delta_h_sh);
    Ok(DecompositionReport {
        h2_orig: orig.h_at(T::lit(2.0)),
        delta_h_orig,
        delta_h_corr,
        delta_h_sh,
        delta_h_su,
        ratio_r,
    })
}
