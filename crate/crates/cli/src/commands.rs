//! One runner per subcommand. Each writes its tables, `config.txt` and
//! `summary.txt` into the output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;
use mfkit::ingest::{self, PriceSeries, Striding};
use mfkit::mfdfa::{self, MfdfaConfig};
use mfkit::rolling::{self, RollingConfig};
use mfkit::stats::{self, BootstrapConfig};
use mfkit::surrogate::{self, SurrogateSpec};
use mfkit::table;
use mfkit::volatility::{self, ChainConfig, VolModel};
use mfkit::Returns;

use crate::config::{RunConfig, UsageError};

pub fn run(cfg: &RunConfig) -> anyhow::Result<()> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("output: cannot create {}", cfg.out.display()))?;
    write_file(&cfg.out, "config.txt", cfg.to_kv().into_bytes())?;
    let summary = match cfg.command.as_str() {
        "returns" => returns(cfg)?,
        "acf" => acf(cfg)?,
        "moments" => moments(cfg)?,
        "mfdfa" => mfdfa_cmd(cfg)?,
        "surrogate" => surrogate_cmd(cfg)?,
        "decompose" => decompose(cfg)?,
        "garch" => garch(cfg)?,
        "rolling" => rolling_cmd(cfg)?,
        other => return Err(UsageError(format!("unknown command {other:?}")).into()),
    };
    print!("{summary}");
    write_file(&cfg.out, "summary.txt", summary.into_bytes())
}

fn write_file(dir: &Path, name: &str, bytes: Vec<u8>) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("output: cannot write {}", path.display()))
}

fn table_bytes(stage: &str, f: impl FnOnce(&mut Vec<u8>) -> mfkit::Result<()>) -> anyhow::Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf).with_context(|| format!("{stage}: writing table"))?;
    Ok(buf)
}

fn load(cfg: &RunConfig) -> anyhow::Result<PriceSeries> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| UsageError("ingest: --input is required".into()))?;
    let prices =
        ingest::load_prices(path, cfg.base_period).with_context(|| format!("ingest: reading {}", path.display()))?;
    if prices.filled_count() > 0 {
        log::warn!("ingest: forward-filled {} missing slots", prices.filled_count());
    }
    Ok(prices)
}

fn load_returns(cfg: &RunConfig, normalize: bool) -> anyhow::Result<Returns> {
    let prices = load(cfg)?;
    let striding = if cfg.overlapping {
        Striding::Overlapping
    } else {
        Striding::NonOverlapping
    };
    ingest::compute_returns_with(&prices, cfg.dt, cfg.scale, normalize, striding).context("ingest: computing returns")
}

fn mfdfa_config(cfg: &RunConfig, fit_range: (usize, usize)) -> anyhow::Result<MfdfaConfig> {
    let (lo, hi, step) = cfg.q;
    Ok(MfdfaConfig {
        q_grid: mfdfa::q_range(lo, hi, step).context("mfdfa: building q-grid")?,
        scale_min: cfg.scale_min,
        scale_max: cfg.scale_max,
        scale_count: cfg.scales,
        detrend_order: cfg.order,
        fit_range,
    })
}

fn spectrum_lines(s: &mut String, label: &str, sp: &mfkit::Spectrum) {
    let h2 = sp.h_at(2.0).map_or("n/a".to_string(), |h| format!("{h:.4}"));
    let _ = writeln!(
        s,
        "{label}: h(2) = {h2}, delta_h = {:.4}, fit range = {}..{}, monotonicity violations = {}",
        sp.delta_h, sp.fit_range.0, sp.fit_range.1, sp.monotonicity_violations
    );
}

fn returns(cfg: &RunConfig) -> anyhow::Result<String> {
    let r = load_returns(cfg, cfg.normalize)?;
    let comments = vec![
        format!("sampling_period_s = {}", r.sampling_period()),
        format!("scale = {}", cfg.scale),
        format!("normalized = {}", r.is_normalized()),
    ];
    write_file(
        &cfg.out,
        "returns.csv",
        table_bytes("returns", |w| table::write_returns(w, &r, &comments))?,
    )?;
    let v = r.values();
    Ok(format!(
        "returns: {} values at {} s, skewness = {:.4}, kurtosis = {:.4}\n",
        r.len(),
        r.sampling_period(),
        stats::skewness(v),
        stats::kurtosis(v)
    ))
}

fn acf(cfg: &RunConfig) -> anyhow::Result<String> {
    let r = load_returns(cfg, false)?;
    let a = stats::acf(&r, cfg.max_lag, cfg.absolute).context("stats: autocorrelation")?;
    let fit = cfg
        .acf_fit_range
        .map(|range| stats::fit_power_law_acf(&a, range).context("stats: power-law fit"))
        .transpose()?;
    write_file(
        &cfg.out,
        "acf.csv",
        table_bytes("stats", |w| table::write_acf(w, &a, fit.as_ref()))?,
    )?;
    let mut s = format!(
        "acf of {}: lags 1..{}, acf(1) = {:.4}\n",
        a.series_label, cfg.max_lag, a.values[0]
    );
    if let Some(f) = fit {
        let _ = writeln!(
            s,
            "power law over lags {}..{}: exponent = {:.4}, r2 = {:.4}",
            f.fit_range.0, f.fit_range.1, f.exponent, f.r_squared
        );
    }
    Ok(s)
}

fn moments(cfg: &RunConfig) -> anyhow::Result<String> {
    let prices = load(cfg)?;
    let boot = BootstrapConfig {
        resamples: cfg.resamples,
        seed: cfg.seed,
    };
    let scan = stats::moment_scan::<f64>(&prices, &cfg.periods, boot).context("stats: moment scan")?;
    write_file(
        &cfg.out,
        "moments.csv",
        table_bytes("stats", |w| table::write_moment_scan(w, &scan))?,
    )?;
    let mut s = String::from("period_s  count  skewness (se)  kurtosis (se)\n");
    for i in 0..scan.sampling_periods.len() {
        let _ = writeln!(
            s,
            "{}  {}  {:.4} ({:.4})  {:.4} ({:.4}){}",
            scan.sampling_periods[i],
            scan.counts[i],
            scan.skewness[i],
            scan.skewness_se[i],
            scan.kurtosis[i],
            scan.kurtosis_se[i],
            if scan.reliable[i] { "" } else { "  [few samples]" }
        );
    }
    Ok(s)
}

fn mfdfa_cmd(cfg: &RunConfig) -> anyhow::Result<String> {
    let r = load_returns(cfg, false)?;
    let mc = mfdfa_config(cfg, cfg.fit_range)?;
    let res = mfdfa::analyze(r.values(), &mc).context("mfdfa")?;
    write_file(
        &cfg.out,
        "surface.csv",
        table_bytes("mfdfa", |w| table::write_surface(w, &res.surface))?,
    )?;
    write_file(
        &cfg.out,
        "spectrum.csv",
        table_bytes("mfdfa", |w| table::write_spectrum(w, &res.spectrum))?,
    )?;
    let mut s = format!(
        "mfdfa: {} returns, {} scales, {} q values, order {}\n",
        r.len(),
        res.surface.scale_grid.len(),
        res.surface.q_grid.len(),
        mc.detrend_order
    );
    spectrum_lines(&mut s, "spectrum", &res.spectrum);
    let d = &res.surface.diagnostics;
    if d.zero_variance_segments > 0 || d.floored_segments > 0 {
        let _ = writeln!(
            s,
            "diagnostics: {} zero-variance segments, {} floored",
            d.zero_variance_segments, d.floored_segments
        );
    }
    Ok(s)
}

fn surrogate_cmd(cfg: &RunConfig) -> anyhow::Result<String> {
    let r = load_returns(cfg, false)?;
    let spec = SurrogateSpec {
        kind: cfg.kind,
        seed: cfg.seed,
        count: cfg.count,
    };
    let members = surrogate::generate(&r, spec).context("surrogate")?;
    for (i, m) in members.iter().enumerate() {
        let seed = cfg.seed.wrapping_add(i as u64);
        let comments = vec![format!("kind = {}", cfg.kind), format!("seed = {seed}")];
        let name = format!("surrogate_{}_{i}.csv", cfg.kind);
        write_file(
            &cfg.out,
            &name,
            table_bytes("surrogate", |w| table::write_returns(w, m, &comments))?,
        )?;
    }
    Ok(format!(
        "surrogate: {} {} series of {} values, seeds {}..{}\n",
        members.len(),
        cfg.kind,
        r.len(),
        cfg.seed,
        cfg.seed.wrapping_add(members.len().saturating_sub(1) as u64)
    ))
}

fn decompose(cfg: &RunConfig) -> anyhow::Result<String> {
    let r = load_returns(cfg, false)?;
    let main = mfdfa_config(cfg, cfg.fit_range)?;
    let sur = MfdfaConfig {
        fit_range: cfg.surrogate_fit_range,
        ..main.clone()
    };
    let shuffled = surrogate::shuffle(&r, cfg.seed);
    let phase = surrogate::phase_surrogate(&r, cfg.seed).context("surrogate: phase randomization")?;

    let orig = mfdfa::analyze(r.values(), &main).context("mfdfa: original series")?;
    let sh = mfdfa::analyze(shuffled.values(), &main).context("mfdfa: shuffled series")?;
    let su = mfdfa::analyze(phase.values(), &sur).context("mfdfa: phase surrogate")?;

    let q_min = cfg.q_min.unwrap_or(cfg.q.0);
    let q_max = cfg.q_max.unwrap_or(cfg.q.1);
    let report =
        mfdfa::decompose(&orig.spectrum, &sh.spectrum, &su.spectrum, q_min, q_max).context("mfdfa: decomposition")?;

    for (name, res) in [("original", &orig), ("shuffled", &sh), ("surrogate", &su)] {
        let file = format!("spectrum_{name}.csv");
        write_file(
            &cfg.out,
            &file,
            table_bytes("mfdfa", |w| table::write_spectrum(w, &res.spectrum))?,
        )?;
    }
    let table_text = table_bytes("mfdfa", |w| table::write_decomposition(w, &report))?;
    write_file(&cfg.out, "decomposition.csv", table_text.clone())?;

    let mut s = String::new();
    spectrum_lines(&mut s, "original", &orig.spectrum);
    spectrum_lines(&mut s, "shuffled", &sh.spectrum);
    spectrum_lines(&mut s, "surrogate", &su.spectrum);
    s.push_str(&String::from_utf8_lossy(&table_text));
    if report.ratio_r.is_none() {
        s.push_str("note: shuffled width is numerically zero, R undefined\n");
    }
    Ok(s)
}

fn garch(cfg: &RunConfig) -> anyhow::Result<String> {
    let r = load_returns(cfg, false)?;
    let models: Vec<VolModel> = if cfg.model == "all" {
        vec![VolModel::Garch, VolModel::Gjr, VolModel::Rgarch]
    } else {
        vec![cfg.model.parse().context("volatility: model name")?]
    };
    let chain = ChainConfig {
        burn_in: cfg.burn_in,
        draws: cfg.draws,
        seed: cfg.seed,
        demean: cfg.demean,
        ..ChainConfig::default()
    };
    let mut fits = Vec::with_capacity(models.len());
    for m in models {
        let fit = volatility::estimate(m, r.values(), &chain).with_context(|| format!("volatility: {m} chain"))?;
        write_file(
            &cfg.out,
            &format!("chain_{m}.csv"),
            table_bytes("volatility", |w| table::write_chain(w, &fit))?,
        )?;
        fits.push(fit);
    }
    let table_text = table_bytes("volatility", |w| table::write_vol_table(w, &fits))?;
    write_file(&cfg.out, "volatility.csv", table_text.clone())?;
    let mut s = format!(
        "volatility: {} returns at {} s, scale {}\n",
        r.len(),
        r.sampling_period(),
        cfg.scale
    );
    s.push_str(&String::from_utf8_lossy(&table_text));
    for f in &fits {
        for w in &f.warnings {
            let _ = writeln!(s, "warning ({}): {w}", f.model);
        }
    }
    Ok(s)
}

fn samples(stage: &str, what: &str, duration: i64, dt: i64) -> anyhow::Result<usize> {
    if duration % dt != 0 {
        return Err(UsageError(format!("{stage}: {what} {duration} s is not a multiple of dt {dt} s")).into());
    }
    Ok((duration / dt) as usize)
}

fn rolling_cmd(cfg: &RunConfig) -> anyhow::Result<String> {
    let r = load_returns(cfg, false)?;
    let window = samples("rolling", "window", cfg.window, cfg.dt)?;
    let step = samples("rolling", "step", cfg.step, cfg.dt)?;
    let mut rc = RollingConfig::new(window, step);
    let fit = cfg.rolling_fit_range.unwrap_or(rc.mfdfa.fit_range);
    rc.mfdfa = MfdfaConfig {
        scale_max: Some(cfg.scale_max.unwrap_or(window / 4)),
        ..mfdfa_config(cfg, fit)?
    };
    let res = rolling::rolling_mfdfa(&r, &rc).context("rolling")?;
    write_file(
        &cfg.out,
        "rolling.csv",
        table_bytes("rolling", |w| table::write_rolling(w, &res))?,
    )?;
    let mut s = format!(
        "rolling: {} windows of {} samples, step {}, {} failed\n",
        res.len(),
        window,
        step,
        res.failed_windows
    );
    let ok: Vec<f64> = res.delta_h.iter().copied().filter(|v| v.is_finite()).collect();
    if !ok.is_empty() {
        let lo = ok.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ok.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(s, "delta_h range: {lo:.4} .. {hi:.4}");
    }
    Ok(s)
}
