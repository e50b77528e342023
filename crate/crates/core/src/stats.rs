//! Descriptive statistics of return series: autocorrelation, power-law decay
//! of the absolute-return ACF and moment scans across sampling periods.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::{compute_returns, PriceSeries, ReturnSeries};
use crate::regression::fit_line;
use crate::scalar::{mean, Scalar};

/// Sample autocorrelation function.
#[derive(Debug, Clone, PartialEq)]
pub struct AcfResult<T = f64> {
    pub lags: Vec<usize>,
    pub values: Vec<T>,
    pub series_label: String,
}

/// `acf(k) ≈ amplitude · k^(−exponent)` over `fit_range` (inclusive lags).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit<T = f64> {
    pub exponent: T,
    pub amplitude: T,
    pub fit_range: (usize, usize),
    pub r_squared: T,
}

/// Autocorrelation of `r` (or `|r|`) for lags `0..=max_lag`.
///
/// Every lag is normalized by the global biased variance, so `|acf(k)| ≤ 1`.
pub fn acf<T: Scalar>(r: &ReturnSeries<T>, max_lag: usize, absolute: bool) -> Result<AcfResult<T>> {
    let x: Vec<T> = if absolute {
        r.values().iter().map(|v| v.abs()).collect()
    } else {
        r.values().to_vec()
    };
    let label = if absolute { "absolute returns" } else { "returns" };
    acf_of(&x, max_lag, label)
}

pub fn acf_of<T: Scalar>(x: &[T], max_lag: usize, label: &str) -> Result<AcfResult<T>> {
    let n = x.len();
    if n < 2 || 2 * max_lag >= n {
        return Err(Error::InvalidArgument(format!(
            "max_lag {max_lag} must be below half the series length {n}"
        )));
    }
    let m = mean(x);
    let d: Vec<T> = x.iter().map(|&v| v - m).collect();
    let c0 = d.iter().map(|&v| v * v).sum::<T>();
    if !(c0 > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    let values: Vec<T> = (0..=max_lag)
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                return T::one();
            }
            let ck = d[..n - k].iter().zip(&d[k..]).map(|(&a, &b)| a * b).sum::<T>();
            (ck / c0).max(-T::one()).min(T::one())
        })
        .collect();
    Ok(AcfResult {
        lags: (0..=max_lag).collect(),
        values,
        series_label: label.to_string(),
    })
}

/// Least-squares fit of `ln acf` against `ln lag` over `[lag_min, lag_max]`.
pub fn fit_power_law_acf<T: Scalar>(a: &AcfResult<T>, fit_range: (usize, usize)) -> Result<PowerLawFit<T>> {
    let (lo, hi) = fit_range;
    if lo == 0 || lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "fit range must satisfy 1 <= lag_min < lag_max, got {lo}..{hi}"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&lag, &v) in a.lags.iter().zip(&a.values) {
        if lag < lo || lag > hi {
            continue;
        }
        if !(v > T::zero()) {
            return Err(Error::NonPositiveAcf {
                lag,
                value: v.to_f64_lossy(),
            });
        }
        xs.push(T::from_usize_lossy(lag).ln());
        ys.push(v.ln());
    }
    let fit = fit_line(&xs, &ys)
        .ok_or_else(|| Error::InvalidArgument(format!("fewer than two ACF lags inside {lo}..{hi}")))?;
    Ok(PowerLawFit {
        exponent: -fit.slope,
        amplitude: fit.intercept.exp(),
        fit_range,
        r_squared: fit.r_squared,
    })
}

/// Sample skewness (standardized third central moment).
pub fn skewness<T: Scalar>(x: &[T]) -> T {
    let (m2, m3, _) = central_moments(x);
    m3 / (m2 * m2.sqrt())
}

/// Sample kurtosis, non-excess (3 for a Gaussian).
pub fn kurtosis<T: Scalar>(x: &[T]) -> T {
    let (m2, _, m4) = central_moments(x);
    m4 / (m2 * m2)
}

fn central_moments<T: Scalar>(x: &[T]) -> (T, T, T) {
    let m = mean(x);
    let n = T::from_usize_lossy(x.len());
    let (mut s2, mut s3, mut s4) = (T::zero(), T::zero(), T::zero());
    for &v in x {
        let d = v - m;
        let d2 = d * d;
        s2 = s2 + d2;
        s3 = s3 + d2 * d;
        s4 = s4 + d2 * d2;
    }
    (s2 / n, s3 / n, s4 / n)
}

/// Resampling settings for moment standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            resamples: 1000,
            seed: 0,
        }
    }
}

/// Block length used by the moving-block bootstrap: `max(10, n^(1/3))`.
pub fn block_length(n: usize) -> usize {
    ((n as f64).cbrt().round() as usize).max(10).min(n.max(1))
}

/// Skewness and kurtosis with moving-block bootstrap standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary<T = f64> {
    pub count: usize,
    pub skewness: T,
    pub skewness_se: T,
    pub kurtosis: T,
    pub kurtosis_se: T,
    /// False when fewer than 30 observations were available.
    pub reliable: bool,
}

pub fn moment_summary<T: Scalar>(x: &[T], boot: BootstrapConfig) -> MomentSummary<T> {
    let n = x.len();
    let skew = skewness(x);
    let kurt = kurtosis(x);
    let (skewness_se, kurtosis_se) = if n >= 2 && boot.resamples >= 2 {
        let l = block_length(n);
        let blocks = n.div_ceil(l);
        let reps: Vec<(T, T)> = (0..boot.resamples)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(boot.seed);
                rng.set_stream(i as u64);
                let mut sample = Vec::with_capacity(blocks * l);
                for _ in 0..blocks {
                    let start = rng.random_range(0..=n - l);
                    sample.extend_from_slice(&x[start..start + l]);
                }
                sample.truncate(n);
                (skewness(&sample), kurtosis(&sample))
            })
            .collect();
        let s: Vec<T> = reps.iter().map(|r| r.0).collect();
        let k: Vec<T> = reps.iter().map(|r| r.1).collect();
        (sample_sd(&s), sample_sd(&k))
    } else {
        (T::nan(), T::nan())
    };
    MomentSummary {
        count: n,
        skewness: skew,
        skewness_se,
        kurtosis: kurt,
        kurtosis_se,
        reliable: n >= 30,
    }
}

fn sample_sd<T: Scalar>(x: &[T]) -> T {
    let m = mean(x);
    let ss = x.iter().map(|&v| (v - m) * (v - m)).sum::<T>();
    (ss / T::from_usize_lossy(x.len() - 1)).sqrt()
}

/// Kurtosis and skewness of returns as a function of sampling period.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentScan<T = f64> {
    pub sampling_periods: Vec<i64>,
    pub kurtosis: Vec<T>,
    pub skewness: Vec<T>,
    pub kurtosis_se: Vec<T>,
    pub skewness_se: Vec<T>,
    pub counts: Vec<usize>,
    pub reliable: Vec<bool>,
}

pub fn moment_scan<T: Scalar>(prices: &PriceSeries, periods: &[i64], boot: BootstrapConfig) -> Result<MomentScan<T>> {
    let mut scan = MomentScan {
        sampling_periods: periods.to_vec(),
        kurtosis: Vec::with_capacity(periods.len()),
        skewness: Vec::with_capacity(periods.len()),
        kurtosis_se: Vec::with_capacity(periods.len()),
        skewness_se: Vec::with_capacity(periods.len()),
        counts: Vec::with_capacity(periods.len()),
        reliable: Vec::with_capacity(periods.len()),
    };
    for &dt in periods {
        let r = compute_returns::<T>(prices, dt, 1.0, false)?;
        let s = moment_summary(r.values(), boot);
        if !s.reliable {
            log::warn!(
                "sampling period {dt}s yields only {} returns; moments unreliable",
                s.count
            );
        }
        scan.kurtosis.push(s.kurtosis);
        scan.skewness.push(s.skewness);
        scan.kurtosis_se.push(s.kurtosis_se);
        scan.skewness_se.push(s.skewness_se);
        scan.counts.push(s.count);
        scan.reliable.push(s.reliable);
    }
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn lag_zero_is_one() {
        let r = ReturnSeries::from_values(normals(100, 1), 60);
        let a = acf(&r, 10, false).unwrap();
        assert_eq!(a.values[0], 1.0);
        assert!(a.values.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn alternating_series() {
        let n = 100;
        let x: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let a = acf_of(&x, 3, "alt").unwrap();
        assert!((a.values[1] + (n as f64 - 1.0) / n as f64).abs() < 1e-14);
    }

    #[test]
    fn acf_rejects_bad_args() {
        assert!(matches!(acf_of(&[1.0; 10], 2, "c"), Err(Error::ZeroVariance)));
        assert!(acf_of(&[1.0, 2.0, 3.0, 4.0], 2, "x").is_err());
    }

    #[test]
    fn exact_power_laws() {
        for (amp, mu) in [(1.0, 0.3), (0.5, 0.16)] {
            let lags: Vec<usize> = (0..200).collect();
            let values = lags
                .iter()
                .map(|&k| if k == 0 { 1.0 } else { amp * (k as f64).powf(-mu) })
                .collect();
            let a = AcfResult {
                lags,
                values,
                series_label: "synthetic".into(),
            };
            let fit = fit_power_law_acf(&a, (1, 199)).unwrap();
            assert!((fit.exponent - mu).abs() < 1e-12);
            assert!((fit.amplitude - amp).abs() < 1e-12);
        }
    }

    #[test]
    fn non_positive_acf_reports_lag() {
        let a = AcfResult {
            lags: vec![0, 1, 2, 3],
            values: vec![1.0, 0.5, -0.1, 0.2],
            series_label: String::new(),
        };
        assert!(matches!(
            fit_power_law_acf(&a, (1, 3)),
            Err(Error::NonPositiveAcf { lag: 2, .. })
        ));
    }

    #[test]
    fn two_point_distribution_moments() {
        let x: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!((kurtosis(&x) - 1.0).abs() < 1e-12);
        assert!(skewness(&x).abs() < 1e-12);
    }

    #[test]
    fn gaussian_moments_within_three_se() {
        let x = normals(20_000, 7);
        let s = moment_summary(
            &x,
            BootstrapConfig {
                resamples: 200,
                seed: 3,
            },
        );
        assert!(s.reliable);
        assert!((s.kurtosis - 3.0).abs() < 3.0 * s.kurtosis_se, "{s:?}");
        assert!(s.skewness.abs() < 3.0 * s.skewness_se, "{s:?}");
    }

    #[test]
    fn bootstrap_is_reproducible() {
        let x = normals(500, 9);
        let b = BootstrapConfig {
            resamples: 50,
            seed: 11,
        };
        assert_eq!(moment_summary(&x, b), moment_summary(&x, b));
    }

    #[test]
    fn block_length_rule() {
        assert_eq!(block_length(100), 10);
        assert_eq!(block_length(1_000_000), 100);
    }
}
