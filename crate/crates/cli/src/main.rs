//! `mfkit`: command-line front end for the analysis pipeline.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{RunConfig, UsageError};

#[derive(Parser, Debug)]
#[command(
    name = "mfkit",
    version,
    about = "Multifractal and volatility analysis of price series"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Price file: two columns, unix timestamp and price.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// `key = value` configuration file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Grid spacing of the price file (e.g. 1m).
    #[arg(long, global = true)]
    base_period: Option<String>,
    /// Return sampling period (e.g. 1m, 1h, 1d).
    #[arg(long, global = true)]
    dt: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Worker threads.
    #[arg(long, global = true, env = "MFKIT_THREADS")]
    threads: Option<String>,
}

#[derive(Args, Debug, Default)]
struct MfdfaArgs {
    /// q-grid as min:max:step.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Number of log-spaced scales.
    #[arg(long)]
    scales: Option<String>,
    #[arg(long)]
    scale_min: Option<String>,
    #[arg(long)]
    scale_max: Option<String>,
    /// Detrending polynomial order.
    #[arg(long)]
    order: Option<String>,
    /// Scaling fit range as smin:smax.
    #[arg(long)]
    fit_range: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute log-returns.
    Returns {
        #[arg(long)]
        scale: Option<String>,
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        overlapping: bool,
    },
    /// Autocorrelation of returns or absolute returns.
    Acf {
        #[arg(long)]
        max_lag: Option<String>,
        #[arg(long)]
        absolute: bool,
        /// Power-law fit range as lo:hi (lags).
        #[arg(long)]
        fit_range: Option<String>,
    },
    /// Skewness and kurtosis across sampling periods.
    Moments {
        /// Comma-separated list of periods.
        #[arg(long)]
        periods: Option<String>,
        #[arg(long)]
        resamples: Option<String>,
    },
    /// Fluctuation functions and multifractal spectrum.
    Mfdfa {
        #[command(flatten)]
        mf: MfdfaArgs,
    },
    /// Shuffled or phase-randomized surrogates of the returns.
    Surrogate {
        /// shuffle or phase.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        count: Option<String>,
    },
    /// Split the spectrum width into correlation and distribution parts.
    Decompose {
        #[command(flatten)]
        mf: MfdfaArgs,
        #[arg(long)]
        surrogate_fit_range: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        q_min: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        q_max: Option<String>,
    },
    /// Bayesian GARCH-family estimation.
    Garch {
        /// garch, gjr, rgarch or all.
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        burn_in: Option<String>,
        #[arg(long)]
        draws: Option<String>,
        #[arg(long)]
        scale: Option<String>,
        #[arg(long)]
        demean: bool,
    },
    /// MF-DFA over sliding windows.
    Rolling {
        #[command(flatten)]
        mf: MfdfaArgs,
        /// Window length as a duration (e.g. 30d).
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        step: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Returns { .. } => "returns",
            Command::Acf { .. } => "acf",
            Command::Moments { .. } => "moments",
            Command::Mfdfa { .. } => "mfdfa",
            Command::Surrogate { .. } => "surrogate",
            Command::Decompose { .. } => "decompose",
            Command::Garch { .. } => "garch",
            Command::Rolling { .. } => "rolling",
        }
    }

    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut opt = |k: &'static str, v: &Option<String>| {
            if let Some(v) = v {
                out.push((k, v.clone()));
            }
        };
        match self {
            Command::Returns {
                scale,
                normalize,
                overlapping,
            } => {
                opt("scale", scale);
                opt("normalize", &normalize.then(|| "true".into()));
                opt("overlapping", &overlapping.then(|| "true".into()));
            }
            Command::Acf {
                max_lag,
                absolute,
                fit_range,
            } => {
                opt("max_lag", max_lag);
                opt("absolute", &absolute.then(|| "true".into()));
                opt("acf_fit_range", fit_range);
            }
            Command::Moments { periods, resamples } => {
                opt("periods", periods);
                opt("resamples", resamples);
            }
            Command::Mfdfa { mf } => mf.push(&mut opt, "fit_range"),
            Command::Surrogate { kind, count } => {
                opt("kind", kind);
                opt("count", count);
            }
            Command::Decompose {
                mf,
                surrogate_fit_range,
                q_min,
                q_max,
            } => {
                mf.push(&mut opt, "fit_range");
                opt("surrogate_fit_range", surrogate_fit_range);
                opt("q_min", q_min);
                opt("q_max", q_max);
            }
            Command::Garch {
                model,
                burn_in,
                draws,
                scale,
                demean,
            } => {
                opt("model", model);
                opt("burn_in", burn_in);
                opt("draws", draws);
                opt("scale", scale);
                opt("demean", &demean.then(|| "true".into()));
            }
            Command::Rolling { mf, window, step } => {
                mf.push(&mut opt, "rolling_fit_range");
                opt("window", window);
                opt("step", step);
            }
        }
        out
    }
}

impl MfdfaArgs {
    fn push(&self, opt: &mut impl FnMut(&'static str, &Option<String>), fit_key: &'static str) {
        opt("q", &self.q);
        opt("scales", &self.scales);
        opt("scale_min", &self.scale_min);
        opt("scale_max", &self.scale_max);
        opt("order", &self.order);
        opt(fit_key, &self.fit_range);
    }
}

fn build_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::new(cli.command.name());
    if let Some(path) = &cli.common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        cfg.apply_file_text(&text)?;
    }
    let c = &cli.common;
    let mut globals: Vec<(&str, String)> = Vec::new();
    if let Some(p) = &c.input {
        globals.push(("input", p.display().to_string()));
    }
    if let Some(p) = &c.out {
        globals.push(("out", p.display().to_string()));
    }
    for (k, v) in [
        ("base_period", &c.base_period),
        ("dt", &c.dt),
        ("seed", &c.seed),
        ("threads", &c.threads),
    ] {
        if let Some(v) = v {
            globals.push((k, v.clone()));
        }
    }
    for (k, v) in globals
        .iter()
        .map(|(k, v)| (*k, v.clone()))
        .chain(cli.command.overrides())
    {
        cfg.set(k, &v)?;
    }
    Ok(cfg)
}

fn is_user_error(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        if cause.is::<UsageError>() {
            return true;
        }
        match cause.downcast_ref::<mfkit::Error>() {
            Some(mfkit::Error::Io(_) | mfkit::Error::NonFiniteChain | mfkit::Error::SimulationAborted(_)) => false,
            Some(_) => true,
            None => false,
        }
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = build_config(&cli)?;
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(UsageError("threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    commands::run(&cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_user_error(&err) {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
