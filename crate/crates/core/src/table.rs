//! Plain-text tabular serialization of results (comma separated, one header
//! row, optional `#` comment lines).

use std::io::Write;

use crate::error::{Error, Result};
use crate::ingest::{parse_two_columns, ReturnSeries};
use crate::mfdfa::{DecompositionReport, FluctuationSurface, MultifractalSpectrum};
use crate::rolling::RollingResult;
use crate::scalar::Scalar;
use crate::stats::{AcfResult, MomentScan, PowerLawFit};
use crate::volatility::VolatilityFit;

fn comment<W: Write>(w: &mut W, lines: &[String]) -> Result<()> {
    for l in lines {
        writeln!(w, "# {l}")?;
    }
    Ok(())
}

pub fn write_returns<T: Scalar, W: Write>(w: &mut W, r: &ReturnSeries<T>, comments: &[String]) -> Result<()> {
    comment(w, comments)?;
    writeln!(w, "timestamp,return")?;
    for (t, v) in r.timestamps().iter().zip(r.values()) {
        writeln!(w, "{t},{v}")?;
    }
    Ok(())
}

/// Reads a `(timestamp, value)` table written by [`write_returns`].
pub fn read_returns(text: &str, sampling_period: i64) -> Result<ReturnSeries<f64>> {
    let rows = parse_two_columns(text)?;
    let mut ts = Vec::with_capacity(rows.len());
    let mut vs = Vec::with_capacity(rows.len());
    for (row, t, v) in rows {
        ts.push(t.parse().map_err(|_| Error::Parse {
            row,
            msg: format!("bad timestamp {t:?}"),
        })?);
        vs.push(v.parse().map_err(|_| Error::Parse {
            row,
            msg: format!("bad value {v:?}"),
        })?);
    }
    ReturnSeries::with_timestamps(vs, ts, sampling_period)
}

pub fn write_surface<T: Scalar, W: Write>(w: &mut W, f: &FluctuationSurface<T>) -> Result<()> {
    writeln!(w, "q,s,F")?;
    for (qi, q) in f.q_grid.iter().enumerate() {
        for (si, s) in f.scale_grid.iter().enumerate() {
            writeln!(w, "{q},{s},{}", f.get(qi, si))?;
        }
    }
    Ok(())
}

pub fn write_spectrum<T: Scalar, W: Write>(w: &mut W, sp: &MultifractalSpectrum<T>) -> Result<()> {
    comment(
        w,
        &[
            format!("fit_range={}:{}", sp.fit_range.0, sp.fit_range.1),
            format!("delta_h={}", sp.delta_h),
        ],
    )?;
    writeln!(w, "q,h,h_stderr,tau,alpha,f_alpha")?;
    for i in 0..sp.q_grid.len() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            sp.q_grid[i], sp.h[i], sp.h_stderr[i], sp.tau[i], sp.alpha[i], sp.f_alpha[i]
        )?;
    }
    Ok(())
}

pub fn write_acf<T: Scalar, W: Write>(w: &mut W, a: &AcfResult<T>, fit: Option<&PowerLawFit<T>>) -> Result<()> {
    let mut notes = vec![format!("series={}", a.series_label)];
    if let Some(f) = fit {
        notes.push(format!(
            "power_law mu={} amplitude={} lags={}:{} r2={}",
            f.exponent, f.amplitude, f.fit_range.0, f.fit_range.1, f.r_squared
        ));
    }
    comment(w, &notes)?;
    writeln!(w, "lag,acf")?;
    for (l, v) in a.lags.iter().zip(&a.values) {
        writeln!(w, "{l},{v}")?;
    }
    Ok(())
}

pub fn write_moment_scan<T: Scalar, W: Write>(w: &mut W, m: &MomentScan<T>) -> Result<()> {
    writeln!(
        w,
        "sampling_period,count,kurtosis,kurtosis_se,skewness,skewness_se,reliable"
    )?;
    for i in 0..m.sampling_periods.len() {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            m.sampling_periods[i],
            m.counts[i],
            m.kurtosis[i],
            m.kurtosis_se[i],
            m.skewness[i],
            m.skewness_se[i],
            m.reliable[i]
        )?;
    }
    Ok(())
}

pub fn write_rolling<T: Scalar, W: Write>(w: &mut W, r: &RollingResult<T>) -> Result<()> {
    comment(
        w,
        &[format!(
            "window={} step={} failed={}",
            r.window, r.step, r.failed_windows
        )],
    )?;
    writeln!(w, "window_end_timestamp,h2,delta_h,fit_r2")?;
    for i in 0..r.len() {
        writeln!(
            w,
            "{},{},{},{}",
            r.window_end_timestamps[i], r.h2[i], r.delta_h[i], r.fit_r2[i]
        )?;
    }
    Ok(())
}

pub fn write_chain<T: Scalar, W: Write>(w: &mut W, fit: &VolatilityFit<T>) -> Result<()> {
    writeln!(w, "{}", fit.model.param_names().join(","))?;
    for d in &fit.posterior {
        let row: Vec<String> = d.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

fn fmt_opt<T: Scalar>(v: Option<T>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.3}"))
}

/// Model comparison table: parameters as `mean(sd)`, then AIC and DIC.
pub fn write_vol_table<T: Scalar, W: Write>(w: &mut W, fits: &[VolatilityFit<T>]) -> Result<()> {
    let header: Vec<String> = fits.iter().map(|f| f.model.to_string()).collect();
    writeln!(w, "parameter,{}", header.join(","))?;
    for name in ["alpha", "beta", "omega", "delta", "gamma"] {
        let cells: Vec<String> = fits
            .iter()
            .map(|f| {
                f.model
                    .param_names()
                    .iter()
                    .position(|&n| n == name)
                    .map_or_else(|| "---".to_string(), |j| format!("{:.4}({:.4})", f.mean[j], f.sd[j]))
            })
            .collect();
        if cells.iter().any(|c| c != "---") {
            writeln!(w, "{name},{}", cells.join(","))?;
        }
    }
    let row = |label: &str, get: &dyn Fn(&VolatilityFit<T>) -> T| -> String {
        let cells: Vec<String> = fits.iter().map(|f| format!("{:.2}", get(f))).collect();
        format!("{label},{}", cells.join(","))
    };
    writeln!(w, "{}", row("AIC", &|f| f.aic))?;
    writeln!(w, "{}", row("DIC", &|f| f.dic))?;
    writeln!(w, "{}", row("acceptance", &|f| f.acceptance_rate))?;
    writeln!(w, "{}", row("P(alpha+beta<1)", &|f| f.stationary_probability))?;
    Ok(())
}

/// Two-column report: h(2), Δh, Δh_corr, Δh_sh, Δh_su and R.
pub fn write_decomposition<T: Scalar, W: Write>(w: &mut W, d: &DecompositionReport<T>) -> Result<()> {
    writeln!(w, "quantity,value")?;
    writeln!(w, "h(2),{}", fmt_opt(d.h2_orig))?;
    writeln!(w, "delta_h,{:.3}", d.delta_h_orig)?;
    writeln!(w, "delta_h_corr,{:.3}", d.delta_h_corr)?;
    writeln!(w, "delta_h_sh,{:.3}", d.delta_h_sh)?;
    writeln!(w, "delta_h_su,{:.3}", d.delta_h_su)?;
    writeln!(w, "R,{}", fmt_opt(d.ratio_r))?;
    Ok(())
}
