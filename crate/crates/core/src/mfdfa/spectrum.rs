//! Scaling fits of `F_q(s)` and the derived multifractal spectra.

use super::fluctuation::FluctuationSurface;
use super::q_index;
use crate::error::{Error, Result};
use crate::regression::fit_line;
use crate::scalar::Scalar;

/// Generalized Hurst exponents with `τ(q)` and the singularity spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct MultifractalSpectrum<T = f64> {
    pub q_grid: Vec<T>,
    pub h: Vec<T>,
    pub h_stderr: Vec<T>,
    pub r_squared: Vec<T>,
    pub tau: Vec<T>,
    pub alpha: Vec<T>,
    pub f_alpha: Vec<T>,
    pub fit_range: (usize, usize),
    /// `h(q_min) − h(q_max)` at the grid extremes.
    pub delta_h: T,
    /// Adjacent q pairs where `h` increases; expected zero for multifractal data.
    pub monotonicity_violations: usize,
    /// Scale points dropped from fits because `F_q(s)` was zero.
    pub dropped_points: usize,
}

impl<T: Scalar> MultifractalSpectrum<T> {
    /// `h(q)` for a q on the grid.
    pub fn h_at(&self, q: T) -> Option<T> {
        q_index(&self.q_grid, q).map(|i| self.h[i])
    }
}

/// Fits `ln F_q(s) = c + h(q) ln s` over scales in `[s_min, s_max]`.
pub fn fit_hurst<T: Scalar>(f: &FluctuationSurface<T>, fit_range: (usize, usize)) -> Result<MultifractalSpectrum<T>> {
    let (s_min, s_max) = fit_range;
    let inside: Vec<usize> = f
        .scale_grid
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= s_min && s <= s_max)
        .map(|(i, _)| i)
        .collect();
    if inside.len() < 4 {
        return Err(Error::InsufficientScales {
            got: inside.len(),
            s_min,
            s_max,
        });
    }

    let nq = f.q_grid.len();
    let mut h = Vec::with_capacity(nq);
    let mut h_stderr = Vec::with_capacity(nq);
    let mut r_squared = Vec::with_capacity(nq);
    let mut dropped = 0;
    for qi in 0..nq {
        let row = f.row(qi);
        let (xs, ys): (Vec<T>, Vec<T>) = inside
            .iter()
            .filter(|&&si| row[si] > T::zero())
            .map(|&si| (T::from_usize_lossy(f.scale_grid[si]).ln(), row[si].ln()))
            .unzip();
        dropped += inside.len() - xs.len();
        if xs.len() < 4 {
            return Err(Error::InsufficientScales {
                got: xs.len(),
                s_min,
                s_max,
            });
        }
        let fit = fit_line(&xs, &ys).expect("distinct scales");
        h.push(fit.slope);
        h_stderr.push(fit.slope_stderr);
        r_squared.push(fit.r_squared);
    }
    if dropped > 0 {
        log::warn!("dropped {dropped} zero-valued F_q(s) points from the scaling fits");
    }
    spectrum_from_h(f.q_grid.clone(), h, h_stderr, r_squared, fit_range, dropped)
}

/// Assembles a spectrum from per-q Hurst exponents.
pub fn spectrum_from_h<T: Scalar>(
    q_grid: Vec<T>,
    h: Vec<T>,
    h_stderr: Vec<T>,
    r_squared: Vec<T>,
    fit_range: (usize, usize),
    dropped_points: usize,
) -> Result<MultifractalSpectrum<T>> {
    let tau = tau_spectrum(&h, &q_grid);
    let (alpha, f_alpha) = singularity_spectrum(&h, &q_grid)?;
    let (lo, hi) = extreme_indices(&q_grid);
    let delta_h = h[lo] - h[hi];
    let mut order: Vec<usize> = (0..q_grid.len()).collect();
    order.sort_by(|&a, &b| q_grid[a].partial_cmp(&q_grid[b]).unwrap());
    let monotonicity_violations = order.windows(2).filter(|w| h[w[1]] > h[w[0]]).count();
    if monotonicity_violations > 0 {
        log::debug!("h(q) increases at {monotonicity_violations} grid steps");
    }
    Ok(MultifractalSpectrum {
        q_grid,
        h,
        h_stderr,
        r_squared,
        tau,
        alpha,
        f_alpha,
        fit_range,
        delta_h,
        monotonicity_violations,
        dropped_points,
    })
}

fn extreme_indices<T: Scalar>(q: &[T]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, &v) in q.iter().enumerate() {
        if v < q[lo] {
            lo = i;
        }
        if v > q[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

/// `τ(q) = q·h(q) − 1`.
pub fn tau_spectrum<T: Scalar>(h: &[T], q_grid: &[T]) -> Vec<T> {
    h.iter().zip(q_grid).map(|(&h, &q)| q * h - T::one()).collect()
}

/// Hölder exponents `α = h + q·h′` and `f(α) = q·(α − h) + 1`.
///
/// `h′` uses central differences inside the grid and one-sided differences
/// at the two ends. The grid must be ascending and uniform.
pub fn singularity_spectrum<T: Scalar>(h: &[T], q_grid: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let n = q_grid.len();
    if n < 3 || h.len() != n {
        return Err(Error::InvalidArgument(format!(
            "singularity spectrum needs at least 3 aligned points, got {n} q and {} h",
            h.len()
        )));
    }
    let dq = uniform_step(q_grid)?;
    let two = T::lit(2.0);
    let alpha: Vec<T> = (0..n)
        .map(|i| {
            let dh = if i == 0 {
                (h[1] - h[0]) / dq
            } else if i == n - 1 {
                (h[n - 1] - h[n - 2]) / dq
            } else {
                (h[i + 1] - h[i - 1]) / (two * dq)
            };
            h[i] + q_grid[i] * dh
        })
        .collect();
    let f_alpha = (0..n).map(|i| q_grid[i] * (alpha[i] - h[i]) + T::one()).collect();
    Ok((alpha, f_alpha))
}

fn uniform_step<T: Scalar>(q: &[T]) -> Result<T> {
    let n = q.len();
    let step = (q[n - 1] - q[0]) / T::from_usize_lossy(n - 1);
    if !(step > T::zero()) {
        return Err(Error::NonUniformQGrid);
    }
    let tol = step * T::lit(1e-6);
    if q.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > tol) {
        return Err(Error::NonUniformQGrid);
    }
    Ok(step)
}

/// `Δh = h(q_min) − h(q_max)`.
pub fn delta_h<T: Scalar>(spectrum: &MultifractalSpectrum<T>, q_min: T, q_max: T) -> Result<T> {
    if !(q_min < q_max) {
        return Err(Error::InvalidArgument(format!(
            "q_min ({q_min}) must be below q_max ({q_max})"
        )));
    }
    let lo = q_index(&spectrum.q_grid, q_min).ok_or(Error::OffGridQ(q_min.to_f64_lossy()))?;
    let hi = q_index(&spectrum.q_grid, q_max).ok_or(Error::OffGridQ(q_max.to_f64_lossy()))?;
    Ok(spectrum.h[lo] - spectrum.h[hi])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mfdfa::{q_range, SurfaceDiagnostics};

    fn power_surface(q: Vec<f64>, scales: Vec<usize>, h: impl Fn(f64) -> f64) -> FluctuationSurface<f64> {
        let mut values = Vec::new();
        for &qv in &q {
            for &s in &scales {
                values.push(2.0 * (s as f64).powf(h(qv)));
            }
        }
        FluctuationSurface {
            segment_counts: scales.iter().map(|&s| 4096 / s).collect(),
            q_grid: q,
            scale_grid: scales,
            values,
            detrend_order: 3,
            diagnostics: SurfaceDiagnostics::default(),
        }
    }

    #[test]
    fn exact_monofractal_surface() {
        let q = q_range(-5.0, 5.0, 0.5).unwrap();
        let f = power_surface(q, vec![16, 32, 64, 128, 256, 512], |_| 0.5);
        let sp = fit_hurst(&f, (16, 512)).unwrap();
        assert!(sp.h.iter().all(|&h| (h - 0.5).abs() < 1e-12));
        assert!(sp.delta_h.abs() < 1e-12);
        assert!(sp.alpha.iter().all(|&a| (a - 0.5).abs() < 1e-10));
        assert!(sp.f_alpha.iter().all(|&f| (f - 1.0).abs() < 1e-10));
    }

    #[test]
    fn too_few_scales_in_range() {
        let q = q_range(-1.0, 1.0, 1.0).unwrap();
        let f = power_surface(q, vec![16, 32, 64, 128, 256], |_| 0.5);
        assert!(matches!(
            fit_hurst(&f, (32, 128)),
            Err(Error::InsufficientScales { got: 3, .. })
        ));
    }

    #[test]
    fn zero_points_are_dropped() {
        let q = q_range(-1.0, 1.0, 1.0).unwrap();
        let mut f = power_surface(q, vec![16, 32, 64, 128, 256, 512], |_| 0.7);
        f.values[0] = 0.0;
        let sp = fit_hurst(&f, (16, 512)).unwrap();
        assert_eq!(sp.dropped_points, 1);
        assert!((sp.h[0] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn tau_identities() {
        let q = [-2.0, 0.0, 2.0];
        let t = tau_spectrum(&[0.7, 0.6, 0.5], &q);
        assert_eq!(t, vec![-2.4, -1.0, 0.0]);
        let flat = tau_spectrum(&[0.3; 3], &q);
        assert_eq!(flat[1], -1.0);
    }

    #[test]
    fn f_alpha_at_q_zero_is_one() {
        let q: Vec<f64> = q_range(-3.0, 3.0, 0.2).unwrap();
        let h: Vec<f64> = q.iter().map(|&x| 0.6 - 0.1 * x.tanh()).collect();
        let (_, f) = singularity_spectrum(&h, &q).unwrap();
        let i0 = q_index(&q, 0.0).unwrap();
        assert_eq!(f[i0], 1.0);
        assert!(f.iter().all(|&v| v <= 1.0 + 1e-12));
    }

    #[test]
    fn non_uniform_grid_rejected() {
        let q = [-1.0, 0.0, 2.0];
        assert!(matches!(
            singularity_spectrum(&[0.5; 3], &q),
            Err(Error::NonUniformQGrid)
        ));
        assert!(singularity_spectrum(&[0.5; 2], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn delta_h_lookup() {
        let q: Vec<f64> = q_range(-2.0, 2.0, 1.0).unwrap();
        let h = vec![0.9, 0.8, 0.7, 0.6, 0.5];
        let n = q.len();
        let sp = spectrum_from_h(q, h, vec![0.0; n], vec![1.0; n], (1, 2), 0).unwrap();
        assert!((delta_h(&sp, -2.0, 2.0).unwrap() - 0.4).abs() < 1e-15);
        assert!((sp.delta_h - 0.4).abs() < 1e-15);
        assert!(matches!(delta_h(&sp, -1.5, 2.0), Err(Error::OffGridQ(_))));
        assert!(delta_h(&sp, 2.0, -2.0).is_err());
        assert_eq!(sp.monotonicity_violations, 0);
    }
}
