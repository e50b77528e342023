//! Rolling-window MF-DFA: `h(2)` and `Δh` tracked through time.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::ReturnSeries;
use crate::mfdfa::{analyze, q_index, MfdfaConfig};
use crate::scalar::Scalar;

/// End timestamp and `(h2, Δh, r²)` of one window, `None` on failure.
type WindowRow<T> = (i64, Option<(T, T, T)>);

/// Smallest window accepted, in samples.
pub const MIN_WINDOW: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct RollingConfig<T = f64> {
    /// Window length in samples.
    pub window: usize,
    /// Offset between consecutive windows in samples.
    pub step: usize,
    pub mfdfa: MfdfaConfig<T>,
}

impl<T: Scalar> RollingConfig<T> {
    /// 20 log-spaced scales from 16 to `window/4`, fit over `[100, window/4]`.
    pub fn new(window: usize, step: usize) -> Self {
        Self {
            window,
            step,
            mfdfa: MfdfaConfig {
                scale_max: Some(window / 4),
                scale_count: 20,
                fit_range: (100, window / 4),
                ..MfdfaConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RollingResult<T = f64> {
    pub window_end_timestamps: Vec<i64>,
    /// `NaN` marks a window whose fit failed.
    pub h2: Vec<T>,
    pub delta_h: Vec<T>,
    /// `R²` of the `q = 2` scaling fit.
    pub fit_r2: Vec<T>,
    pub window: usize,
    pub step: usize,
    pub failed_windows: usize,
}

impl<T: Scalar> RollingResult<T> {
    pub fn len(&self) -> usize {
        self.h2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h2.is_empty()
    }
}

/// Number of windows: `floor((n − window) / step) + 1`.
pub fn window_count(n: usize, window: usize, step: usize) -> usize {
    if window > n || step == 0 {
        0
    } else {
        (n - window) / step + 1
    }
}

pub fn rolling_mfdfa<T: Scalar>(r: &ReturnSeries<T>, config: &RollingConfig<T>) -> Result<RollingResult<T>> {
    let n = r.len();
    let (w, step) = (config.window, config.step);
    if w < MIN_WINDOW {
        return Err(Error::InvalidArgument(format!(
            "window of {w} samples is below the minimum of {MIN_WINDOW}"
        )));
    }
    if step == 0 {
        return Err(Error::InvalidArgument("step must be at least one sample".into()));
    }
    if w > n {
        return Err(Error::TooShort { need: w, got: n });
    }
    let q2 = q_index(&config.mfdfa.q_grid, T::lit(2.0))
        .ok_or_else(|| Error::InvalidArgument("rolling analysis needs q = 2 on the q-grid".into()))?;

    let count = window_count(n, w, step);
    let rows: Vec<WindowRow<T>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let start = i * step;
            let end_ts = r.timestamps()[start + w - 1];
            let fit = analyze(&r.values()[start..start + w], &config.mfdfa)
                .map(|res| {
                    let sp = res.spectrum;
                    (sp.h[q2], sp.delta_h, sp.r_squared[q2])
                })
                .map_err(|e| log::warn!("window ending at {end_ts}: {e}"))
                .ok();
            (end_ts, fit)
        })
        .collect();

    let mut out = RollingResult {
        window_end_timestamps: Vec::with_capacity(count),
        h2: Vec::with_capacity(count),
        delta_h: Vec::with_capacity(count),
        fit_r2: Vec::with_capacity(count),
        window: w,
        step,
        failed_windows: 0,
    };
    for (ts, fit) in rows {
        out.window_end_timestamps.push(ts);
        let (h2, dh, r2) = fit.unwrap_or_else(|| {
            out.failed_windows += 1;
            (T::nan(), T::nan(), T::nan())
        });
        out.h2.push(h2);
        out.delta_h.push(dh);
        out.fit_r2.push(r2);
    }
    Ok(out)
}
