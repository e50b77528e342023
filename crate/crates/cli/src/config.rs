//! Effective run configuration: `key = value` files, flag overrides, echo.

use std::fmt::Write as _;
use std::path::PathBuf;

use mfkit::surrogate::SurrogateKind;

/// Invalid user-supplied configuration (exit code 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub base_period: i64,
    pub dt: i64,
    pub scale: f64,
    pub normalize: bool,
    pub overlapping: bool,
    pub seed: u64,
    pub threads: Option<usize>,
    pub max_lag: usize,
    pub absolute: bool,
    pub acf_fit_range: Option<(usize, usize)>,
    pub periods: Vec<i64>,
    pub resamples: usize,
    pub q: (f64, f64, f64),
    pub scales: usize,
    pub scale_min: usize,
    pub scale_max: Option<usize>,
    pub order: usize,
    pub fit_range: (usize, usize),
    pub surrogate_fit_range: (usize, usize),
    pub q_min: Option<f64>,
    pub q_max: Option<f64>,
    pub kind: SurrogateKind,
    pub count: usize,
    pub model: String,
    pub burn_in: usize,
    pub draws: usize,
    pub demean: bool,
    pub window: i64,
    pub step: i64,
    pub rolling_fit_range: Option<(usize, usize)>,
}

const MINUTE: i64 = 60;
const HOUR: i64 = 3600;
const DAY: i64 = 86_400;

impl RunConfig {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            input: None,
            out: PathBuf::from("mfkit-out"),
            base_period: MINUTE,
            dt: if command == "garch" { DAY } else { MINUTE },
            scale: if command == "garch" { 100.0 } else { 1.0 },
            normalize: false,
            overlapping: false,
            seed: 42,
            threads: None,
            max_lag: 1000,
            absolute: false,
            acf_fit_range: None,
            periods: vec![
                MINUTE,
                5 * MINUTE,
                15 * MINUTE,
                30 * MINUTE,
                HOUR,
                2 * HOUR,
                4 * HOUR,
                8 * HOUR,
                12 * HOUR,
                DAY,
                2 * DAY,
                4 * DAY,
                7 * DAY,
            ],
            resamples: 1000,
            q: (-25.0, 25.0, 0.2),
            scales: if command == "rolling" { 20 } else { 40 },
            scale_min: 16,
            scale_max: None,
            order: 3,
            fit_range: mfkit::mfdfa::FULL_SAMPLE_FIT_RANGE,
            surrogate_fit_range: mfkit::mfdfa::FULL_SAMPLE_SURROGATE_FIT_RANGE,
            q_min: None,
            q_max: None,
            kind: SurrogateKind::Shuffle,
            count: 1,
            model: "garch".into(),
            burn_in: 20_000,
            draws: 80_000,
            demean: false,
            window: 30 * DAY,
            step: DAY,
            rolling_fit_range: None,
        }
    }

    /// Applies one `key = value` setting; keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> anyhow::Result<()> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "command" => {}
            "input" => self.input = Some(PathBuf::from(v)),
            "out" => self.out = PathBuf::from(v),
            "base_period" => self.base_period = parse_duration(v)?,
            "dt" => self.dt = parse_duration(v)?,
            "scale" => self.scale = parse_num(&key, v)?,
            "normalize" => self.normalize = parse_bool(&key, v)?,
            "overlapping" => self.overlapping = parse_bool(&key, v)?,
            "seed" => self.seed = parse_num(&key, v)?,
            "threads" => self.threads = Some(parse_num(&key, v)?),
            "max_lag" => self.max_lag = parse_num(&key, v)?,
            "absolute" => self.absolute = parse_bool(&key, v)?,
            "acf_fit_range" => self.acf_fit_range = Some(parse_pair(&key, v)?),
            "periods" => {
                self.periods = v
                    .split(',')
                    .map(|p| parse_duration(p.trim()))
                    .collect::<anyhow::Result<_>>()?
            }
            "resamples" => self.resamples = parse_num(&key, v)?,
            "q" => self.q = parse_q(v)?,
            "scales" => self.scales = parse_num(&key, v)?,
            "scale_min" => self.scale_min = parse_num(&key, v)?,
            "scale_max" => self.scale_max = Some(parse_num(&key, v)?),
            "order" => self.order = parse_num(&key, v)?,
            "fit_range" => self.fit_range = parse_pair(&key, v)?,
            "surrogate_fit_range" => self.surrogate_fit_range = parse_pair(&key, v)?,
            "q_min" => self.q_min = Some(parse_num(&key, v)?),
            "q_max" => self.q_max = Some(parse_num(&key, v)?),
            "kind" => self.kind = v.parse().map_err(|e: mfkit::Error| usage(e.to_string()))?,
            "count" => self.count = parse_num(&key, v)?,
            "model" => {
                if !["garch", "gjr", "rgarch", "all"].contains(&v) {
                    return Err(usage(format!("unknown model {v:?} (garch, gjr, rgarch, all)")));
                }
                self.model = v.to_string()
            }
            "burn_in" => self.burn_in = parse_num(&key, v)?,
            "draws" => self.draws = parse_num(&key, v)?,
            "demean" => self.demean = parse_bool(&key, v)?,
            "window" => self.window = parse_duration(v)?,
            "step" => self.step = parse_duration(v)?,
            "rolling_fit_range" => self.rolling_fit_range = Some(parse_pair(&key, v)?),
            other => return Err(usage(format!("unknown configuration key {other:?}"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; blank lines and `#` comments are ignored.
    pub fn apply_file_text(&mut self, text: &str) -> anyhow::Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", i + 1)))?;
            self.set(k, v)
                .map_err(|e| usage(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    /// Every effective setting, one `key = value` per line, stable order.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("command", self.command.clone());
        if let Some(p) = &self.input {
            put("input", p.display().to_string());
        }
        put("out", self.out.display().to_string());
        put("base_period", format!("{}s", self.base_period));
        put("dt", format!("{}s", self.dt));
        put("scale", self.scale.to_string());
        put("normalize", self.normalize.to_string());
        put("overlapping", self.overlapping.to_string());
        put("seed", self.seed.to_string());
        put("max_lag", self.max_lag.to_string());
        put("absolute", self.absolute.to_string());
        if let Some((a, b)) = self.acf_fit_range {
            put("acf_fit_range", format!("{a}:{b}"));
        }
        put(
            "periods",
            self.periods
                .iter()
                .map(|p| format!("{p}s"))
                .collect::<Vec<_>>()
                .join(","),
        );
        put("resamples", self.resamples.to_string());
        put("q", format!("{}:{}:{}", self.q.0, self.q.1, self.q.2));
        put("scales", self.scales.to_string());
        put("scale_min", self.scale_min.to_string());
        if let Some(m) = self.scale_max {
            put("scale_max", m.to_string());
        }
        put("order", self.order.to_string());
        put("fit_range", format!("{}:{}", self.fit_range.0, self.fit_range.1));
        put(
            "surrogate_fit_range",
            format!("{}:{}", self.surrogate_fit_range.0, self.surrogate_fit_range.1),
        );
        if let Some(q) = self.q_min {
            put("q_min", q.to_string());
        }
        if let Some(q) = self.q_max {
            put("q_max", q.to_string());
        }
        put("kind", self.kind.to_string());
        put("count", self.count.to_string());
        put("model", self.model.clone());
        put("burn_in", self.burn_in.to_string());
        put("draws", self.draws.to_string());
        put("demean", self.demean.to_string());
        put("window", format!("{}s", self.window));
        put("step", format!("{}s", self.step));
        if let Some((a, b)) = self.rolling_fit_range {
            put("rolling_fit_range", format!("{a}:{b}"));
        }
        s
    }
}

/// `90`, `90s`, `5m`, `2h`, `1d`; bare numbers are seconds.
pub fn parse_duration(s: &str) -> anyhow::Result<i64> {
    let s = s.trim();
    let (num, mult) = match s.char_indices().last() {
        Some((i, 's')) => (&s[..i], 1),
        Some((i, 'm')) => (&s[..i], MINUTE),
        Some((i, 'h')) => (&s[..i], HOUR),
        Some((i, 'd')) => (&s[..i], DAY),
        _ => (s, 1),
    };
    let n: i64 = num
        .parse()
        .map_err(|_| usage(format!("bad duration {s:?} (use e.g. 30s, 1m, 2h, 1d)")))?;
    if n <= 0 {
        return Err(usage(format!("duration must be positive, got {s:?}")));
    }
    Ok(n * mult)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> anyhow::Result<T> {
    v.parse().map_err(|_| usage(format!("bad value {v:?} for {key}")))
}

fn parse_bool(key: &str, v: &str) -> anyhow::Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(usage(format!("bad boolean {v:?} for {key}"))),
    }
}

fn parse_pair(key: &str, v: &str) -> anyhow::Result<(usize, usize)> {
    let (a, b) = v
        .split_once(':')
        .ok_or_else(|| usage(format!("{key} expects min:max, got {v:?}")))?;
    let pair = (parse_num(key, a)?, parse_num(key, b)?);
    if pair.0 >= pair.1 {
        return Err(usage(format!("{key}: min must be below max, got {v:?}")));
    }
    Ok(pair)
}

/// `min:max:step`.
pub fn parse_q(v: &str) -> anyhow::Result<(f64, f64, f64)> {
    let parts: Vec<&str> = v.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("q-grid expects min:max:step, got {v:?}")));
    }
    let (a, b, c) = (
        parse_num::<f64>("q", parts[0])?,
        parse_num::<f64>("q", parts[1])?,
        parse_num::<f64>("q", parts[2])?,
    );
    if c.is_nan() || c <= 0.0 || b < a {
        return Err(usage(format!("q-grid {v:?} needs min <= max and step > 0")));
    }
    Ok((a, b, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn durations() {
        assert_eq!(parse_duration("1m").unwrap(), 60);
        assert_eq!(parse_duration("1440m").unwrap(), 86_400);
        assert_eq!(parse_duration("30d").unwrap(), 2_592_000);
        assert_eq!(parse_duration("45").unwrap(), 45);
        assert_eq!(parse_duration("2h").unwrap(), 7200);
        assert!(parse_duration("0m").is_err());
        assert!(parse_duration("xm").is_err());
    }

    #[test]
    fn q_syntax() {
        assert_eq!(parse_q("-25:25:0.2").unwrap(), (-25.0, 25.0, 0.2));
        assert!(parse_q("1:2").is_err());
        assert!(parse_q("2:1:0.5").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let mut c = RunConfig::new("mfdfa");
        c.set("fit-range", "100:5000").unwrap();
        c.set("q", "-5:5:0.5").unwrap();
        c.set("dt", "5m").unwrap();
        c.set("input", "prices.csv").unwrap();
        c.set("kind", "phase").unwrap();
        let mut back = RunConfig::new("mfdfa");
        back.apply_file_text(&c.to_kv()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_unknown_keys_and_values() {
        let mut c = RunConfig::new("mfdfa");
        assert!(c.set("bogus", "1").is_err());
        assert!(c.set("order", "three").is_err());
        assert!(c.set("fit_range", "10:5").is_err());
        assert!(c.apply_file_text("order 3").is_err());
        assert!(c.set("model", "egarch").is_err());
    }
}
