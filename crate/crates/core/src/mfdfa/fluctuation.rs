//! Segment-wise polynomial detrending and q-th order fluctuation functions.

use rayon::prelude::*;

use super::profile::Profile;
use super::Q_ZERO_TOLERANCE;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `F_q(s)` on a `q_grid × scale_grid` lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationSurface<T = f64> {
    pub q_grid: Vec<T>,
    pub scale_grid: Vec<usize>,
    /// Row-major: `values[qi * scale_grid.len() + si]`.
    pub values: Vec<T>,
    pub detrend_order: usize,
    /// `N_s = floor(N / s)` per scale.
    pub segment_counts: Vec<usize>,
    pub diagnostics: SurfaceDiagnostics,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SurfaceDiagnostics {
    /// Segments whose detrended variance vanished.
    pub zero_variance_segments: usize,
    /// Segment variances raised to the variance floor before a q ≤ 0 moment.
    pub floored_segments: usize,
    /// Every segment at every scale was exactly polynomial; all `F_q(s)` are 0.
    pub degenerate: bool,
}

impl<T: Scalar> FluctuationSurface<T> {
    pub fn get(&self, qi: usize, si: usize) -> T {
        self.values[qi * self.scale_grid.len() + si]
    }

    /// `F_q(s)` across all scales for the `qi`-th q.
    pub fn row(&self, qi: usize) -> &[T] {
        let n = self.scale_grid.len();
        &self.values[qi * n..(qi + 1) * n]
    }
}

/// Orthonormal discrete polynomial basis on `s` equally spaced points.
///
/// Built by Gram–Schmidt on monomials of an abscissa mapped to `[-1, 1]`,
/// with one reorthogonalization pass.
#[derive(Debug, Clone)]
pub struct PolyBasis<T> {
    len: usize,
    columns: Vec<Vec<T>>,
}

impl<T: Scalar> PolyBasis<T> {
    pub fn new(len: usize, order: usize) -> Self {
        assert!(len > order, "segment shorter than the polynomial order");
        let x: Vec<f64> = if len == 1 {
            vec![0.0]
        } else {
            (0..len)
                .map(|i| (2.0 * i as f64 - (len - 1) as f64) / (len - 1) as f64)
                .collect()
        };
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut v: Vec<f64> = x.iter().map(|&xi| xi.powi(k as i32)).collect();
            for _ in 0..2 {
                for c in &columns {
                    let d = dot(c, &v);
                    v.iter_mut().zip(c).for_each(|(vi, ci)| *vi -= d * ci);
                }
            }
            let norm = dot(&v, &v).sqrt();
            v.iter_mut().for_each(|vi| *vi /= norm);
            columns.push(v);
        }
        Self {
            len,
            columns: columns
                .into_iter()
                .map(|c| c.into_iter().map(T::lit).collect())
                .collect(),
        }
    }

    /// Mean squared residual of `y` after removing its least-squares polynomial.
    ///
    /// Residuals indistinguishable from rounding noise are reported as 0.
    pub fn detrended_variance(&self, y: &[T], resid: &mut Vec<T>) -> T {
        debug_assert_eq!(y.len(), self.len);
        resid.clear();
        resid.extend_from_slice(y);
        for c in &self.columns {
            let d = c.iter().zip(resid.iter()).map(|(&a, &b)| a * b).sum::<T>();
            resid.iter_mut().zip(c).for_each(|(r, &ci)| *r = *r - d * ci);
        }
        let n = T::from_usize_lossy(self.len);
        let f2 = resid.iter().map(|&r| r * r).sum::<T>() / n;
        let scale = y.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let noise = T::lit(8.0) * T::epsilon() * n.sqrt() * scale;
        if f2.sqrt() <= noise {
            T::zero()
        } else {
            f2
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Detrended variances `F²(ν, s)` of the `2·N_s` forward and backward segments.
pub fn segment_variances<T: Scalar>(profile: &[T], s: usize, basis: &PolyBasis<T>) -> Vec<T> {
    let n = profile.len();
    let ns = n / s;
    let mut resid = Vec::with_capacity(s);
    let forward = (0..ns).map(|v| v * s);
    let backward = (1..=ns).map(|k| n - k * s);
    forward
        .chain(backward)
        .map(|start| basis.detrended_variance(&profile[start..start + s], &mut resid))
        .collect()
}

/// Generalized mean of order `q/2` over segment variances, raised to `1/q`.
///
/// Returns the value and the number of floored segments.
pub(crate) fn fluctuation_of_order<T: Scalar>(variances: &[T], q: T) -> (T, usize) {
    let count = T::from_usize_lossy(variances.len());
    let floor = T::variance_floor();
    let mut floored = 0;
    if q.abs() < T::lit(Q_ZERO_TOLERANCE) {
        let mut acc = T::zero();
        for &v in variances {
            let v = if v < floor {
                floored += 1;
                floor
            } else {
                v
            };
            acc = acc + v.ln();
        }
        return ((acc / (T::lit(2.0) * count)).exp(), floored);
    }

    let half_q = q / T::lit(2.0);
    let logs: Vec<T> = variances
        .iter()
        .map(|&v| {
            let v = if q < T::zero() && v < floor {
                floored += 1;
                floor
            } else {
                v
            };
            half_q * v.ln()
        })
        .collect();
    let peak = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let sum = logs.iter().map(|&l| (l - peak).exp()).sum::<T>();
    (((peak + sum.ln() - count.ln()) / q).exp(), floored)
}

/// Checks `2·(order + 2) ≤ s ≤ N/4` for every scale.
pub fn validate_scales(n: usize, scales: &[usize], detrend_order: usize) -> Result<()> {
    let min_allowed = 2 * (detrend_order + 2);
    let max_allowed = n / 4;
    let offending: Vec<usize> = scales
        .iter()
        .copied()
        .filter(|&s| s < min_allowed || s > max_allowed)
        .collect();
    if offending.is_empty() && !scales.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidScales {
            offending,
            min_allowed,
            max_allowed,
        })
    }
}

pub fn fluctuation_surface<T: Scalar>(
    y: &Profile<T>,
    q_grid: &[T],
    scale_grid: &[usize],
    detrend_order: usize,
) -> Result<FluctuationSurface<T>> {
    if !(1..=5).contains(&detrend_order) {
        return Err(Error::InvalidArgument(format!(
            "detrend order must be in 1..=5, got {detrend_order}"
        )));
    }
    if q_grid.is_empty() || q_grid.iter().any(|q| !q.is_finite()) {
        return Err(Error::InvalidArgument("q-grid must be non-empty and finite".into()));
    }
    let n = y.values.len();
    validate_scales(n, scale_grid, detrend_order)?;

    struct PerScale<T> {
        column: Vec<T>,
        zeros: usize,
        floored: usize,
        all_zero: bool,
    }

    let per_scale: Vec<PerScale<T>> = scale_grid
        .par_iter()
        .map(|&s| {
            let basis = PolyBasis::new(s, detrend_order);
            let vars = segment_variances(&y.values, s, &basis);
            let zeros = vars.iter().filter(|&&v| v == T::zero()).count();
            if zeros == vars.len() {
                return PerScale {
                    column: vec![T::zero(); q_grid.len()],
                    zeros,
                    floored: 0,
                    all_zero: true,
                };
            }
            let mut floored = 0;
            let column = q_grid
                .iter()
                .map(|&q| {
                    let (f, fl) = fluctuation_of_order(&vars, q);
                    floored = floored.max(fl);
                    f
                })
                .collect();
            PerScale {
                column,
                zeros,
                floored,
                all_zero: false,
            }
        })
        .collect();

    let ns = scale_grid.len();
    let mut values = vec![T::zero(); q_grid.len() * ns];
    for (si, ps) in per_scale.iter().enumerate() {
        for (qi, &f) in ps.column.iter().enumerate() {
            values[qi * ns + si] = f;
        }
    }
    let diagnostics = SurfaceDiagnostics {
        zero_variance_segments: per_scale.iter().map(|p| p.zeros).sum(),
        floored_segments: per_scale.iter().map(|p| p.floored).sum(),
        degenerate: per_scale.iter().all(|p| p.all_zero),
    };
    if diagnostics.degenerate {
        log::warn!("profile is polynomial in every segment; fluctuation functions are identically zero");
    } else if diagnostics.floored_segments > 0 {
        log::debug!("{} segment variances floored for q <= 0", diagnostics.floored_segments);
    }

    Ok(FluctuationSurface {
        q_grid: q_grid.to_vec(),
        scale_grid: scale_grid.to_vec(),
        values,
        detrend_order,
        segment_counts: scale_grid.iter().map(|&s| n / s).collect(),
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mfdfa::make_profile;

    #[test]
    fn basis_is_orthonormal() {
        let b = PolyBasis::<f64>::new(1000, 5);
        for i in 0..6 {
            for j in 0..6 {
                let d: f64 = b.columns[i].iter().zip(&b.columns[j]).map(|(a, c)| a * c).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-12, "{i},{j}: {d}");
            }
        }
    }

    #[test]
    fn cubic_removes_cubics_exactly() {
        let b = PolyBasis::<f64>::new(64, 3);
        let y: Vec<f64> = (0..64)
            .map(|i| {
                let x = i as f64;
                3.0 - 2.0 * x + 0.5 * x * x - 0.01 * x * x * x
            })
            .collect();
        let mut scratch = Vec::new();
        assert_eq!(b.detrended_variance(&y, &mut scratch), 0.0);
    }

    #[test]
    fn constant_returns_are_degenerate() {
        let r = vec![0.1f64; 1024];
        let p = make_profile(&r).unwrap();
        let s = fluctuation_surface(&p, &[-2.0, 0.0, 2.0], &[16, 32, 64, 128, 256], 3).unwrap();
        assert!(s.diagnostics.degenerate);
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_bad_scales() {
        let p = make_profile(&(0..100).map(|i| (i as f64).sin()).collect::<Vec<_>>()).unwrap();
        match fluctuation_surface(&p, &[2.0], &[8, 10, 26], 3) {
            Err(Error::InvalidScales { offending, .. }) => assert_eq!(offending, vec![8, 26]),
            other => panic!("{other:?}"),
        }
        assert!(fluctuation_surface(&p, &[2.0], &[10], 0).is_err());
        assert!(fluctuation_surface(&p, &[f64::NAN], &[10], 1).is_err());
    }

    #[test]
    fn q_zero_uses_log_average() {
        let vars = [1.0f64, 4.0, 16.0];
        let (f0, _) = fluctuation_of_order(&vars, 0.0);
        assert!((f0 - 4.0f64.sqrt()).abs() < 1e-14);
        let (f2, _) = fluctuation_of_order(&vars, 2.0);
        assert!((f2 - 7.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn negative_q_floors_zero_variances() {
        let (f, floored) = fluctuation_of_order(&[0.0f64, 1.0], -2.0);
        assert_eq!(floored, 1);
        assert!(f.is_finite() && f > 0.0);
    }
}
