//! Price ingestion, grid regularization and log-return construction.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{mean, variance, Scalar};

/// Prices on a uniform grid of `base_period` seconds.
///
/// Slots with no observation in the raw feed carry the last observed price
/// forward and are marked in `gap_mask`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    timestamps: Vec<i64>,
    prices: Vec<f64>,
    gap_mask: Vec<bool>,
    base_period: i64,
}

impl PriceSeries {
    /// Builds a series from `(timestamp, price)` observations in any order.
    ///
    /// Records are sorted by timestamp; exact duplicates are dropped, while a
    /// repeated timestamp with a different price is rejected. Row indices in
    /// errors refer to the position in `observations`.
    pub fn from_observations(observations: &[(i64, f64)], base_period: i64) -> Result<Self> {
        if base_period <= 0 {
            return Err(Error::InvalidArgument(format!(
                "base period must be positive, got {base_period}"
            )));
        }
        if observations.is_empty() {
            return Err(Error::Empty);
        }
        for (row, &(_, price)) in observations.iter().enumerate() {
            if !(price > 0.0) || !price.is_finite() {
                return Err(Error::NonPositivePrice { row, price });
            }
        }

        let mut order: Vec<usize> = (0..observations.len()).collect();
        order.sort_by_key(|&i| observations[i].0);

        let mut kept: Vec<usize> = Vec::with_capacity(order.len());
        for &i in &order {
            if let Some(&last) = kept.last() {
                let (t_prev, p_prev) = observations[last];
                let (t, p) = observations[i];
                if t == t_prev {
                    if p == p_prev {
                        continue;
                    }
                    return Err(Error::NonMonotone { row: i, timestamp: t });
                }
            }
            kept.push(i);
        }

        let t0 = observations[kept[0]].0;
        for &i in &kept {
            let t = observations[i].0;
            if (t - t0) % base_period != 0 {
                return Err(Error::OffGrid {
                    row: i,
                    timestamp: t,
                    base_period,
                });
            }
        }

        let t_last = observations[*kept.last().unwrap()].0;
        let n = ((t_last - t0) / base_period) as usize + 1;
        let mut timestamps = Vec::with_capacity(n);
        let mut prices = Vec::with_capacity(n);
        let mut gap_mask = Vec::with_capacity(n);
        let mut next = kept.iter().peekable();
        let mut carried = observations[kept[0]].1;
        for slot in 0..n {
            let t = t0 + slot as i64 * base_period;
            timestamps.push(t);
            match next.peek() {
                Some(&&i) if observations[i].0 == t => {
                    carried = observations[i].1;
                    prices.push(carried);
                    gap_mask.push(false);
                    next.next();
                }
                _ => {
                    prices.push(carried);
                    gap_mask.push(true);
                }
            }
        }

        Ok(Self {
            timestamps,
            prices,
            gap_mask,
            base_period,
        })
    }

    /// A gap-free series starting at `start`.
    pub fn regular(start: i64, base_period: i64, prices: Vec<f64>) -> Result<Self> {
        let obs: Vec<(i64, f64)> = prices
            .iter()
            .enumerate()
            .map(|(i, &p)| (start + i as i64 * base_period, p))
            .collect();
        Self::from_observations(&obs, base_period)
    }

    /// Re-runs regularization on the observed (non-filled) slots.
    pub fn regularize(&self) -> Result<Self> {
        let obs: Vec<(i64, f64)> = self
            .timestamps
            .iter()
            .zip(&self.prices)
            .zip(&self.gap_mask)
            .filter(|(_, &gap)| !gap)
            .map(|((&t, &p), _)| (t, p))
            .collect();
        Self::from_observations(&obs, self.base_period)
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn gap_mask(&self) -> &[bool] {
        &self.gap_mask
    }

    pub fn base_period(&self) -> i64 {
        self.base_period
    }

    /// Number of forward-filled slots.
    pub fn filled_count(&self) -> usize {
        self.gap_mask.iter().filter(|&&g| g).count()
    }
}

/// Reads a two-column `(timestamp, price)` file and regularizes it.
///
/// The delimiter (comma or tab) is detected from the first data line, a
/// leading header line is skipped, and lines starting with `#` are ignored.
pub fn load_prices(path: impl AsRef<Path>, base_period: i64) -> Result<PriceSeries> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_prices(&text, base_period)
}

pub fn parse_prices(text: &str, base_period: i64) -> Result<PriceSeries> {
    let records = parse_two_columns(text)?;
    let mut obs = Vec::with_capacity(records.len());
    for (row, ts, price) in records {
        let t = parse_timestamp(&ts).ok_or_else(|| Error::Parse {
            row,
            msg: format!("bad timestamp {ts:?}"),
        })?;
        let p: f64 = price.parse().map_err(|_| Error::Parse {
            row,
            msg: format!("bad price {price:?}"),
        })?;
        obs.push((t, p));
    }
    let series = PriceSeries::from_observations(&obs, base_period)?;
    if series.filled_count() > 0 {
        log::info!("forward-filled {} of {} slots", series.filled_count(), series.len());
    }
    Ok(series)
}

/// Splits delimited text into `(row, first, second)` string triples.
pub(crate) fn parse_two_columns(text: &str) -> Result<Vec<(usize, String, String)>> {
    let first_line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or(Error::Empty)?;
    let delimiter = if first_line.contains('\t') { b'\t' } else { b',' };

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());

    let mut out = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            row,
            msg: e.to_string(),
        })?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rec.len() < 2 {
            return Err(Error::Parse {
                row,
                msg: "expected two columns".into(),
            });
        }
        if out.is_empty() && parse_timestamp(&rec[0]).is_none() {
            // header
            continue;
        }
        out.push((row, rec[0].to_string(), rec[1].to_string()));
    }
    if out.is_empty() {
        return Err(Error::Empty);
    }
    Ok(out)
}

fn parse_timestamp(s: &str) -> Option<i64> {
    if let Ok(t) = s.parse::<i64>() {
        return Some(t);
    }
    let f: f64 = s.parse().ok()?;
    (f.is_finite() && f.fract() == 0.0).then_some(f as i64)
}

/// How returns at a coarser sampling period are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Striding {
    /// Subsample every `k`-th price, then difference.
    #[default]
    NonOverlapping,
    /// `k`-lag differences on the base grid.
    Overlapping,
}

/// Log-returns at a fixed sampling period.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries<T = f64> {
    values: Vec<T>,
    timestamps: Vec<i64>,
    sampling_period: i64,
    scale_factor: T,
    normalized: bool,
}

impl<T: Scalar> ReturnSeries<T> {
    /// Wraps raw values; timestamps are `period, 2·period, ...`.
    pub fn from_values(values: Vec<T>, sampling_period: i64) -> Self {
        let timestamps = (1..=values.len() as i64).map(|i| i * sampling_period).collect();
        Self {
            values,
            timestamps,
            sampling_period,
            scale_factor: T::one(),
            normalized: false,
        }
    }

    pub fn with_timestamps(values: Vec<T>, timestamps: Vec<i64>, sampling_period: i64) -> Result<Self> {
        if values.len() != timestamps.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values but {} timestamps",
                values.len(),
                timestamps.len()
            )));
        }
        Ok(Self {
            values,
            timestamps,
            sampling_period,
            scale_factor: T::one(),
            normalized: false,
        })
    }

    /// Same metadata and timestamps, new values of equal length.
    pub fn replace_values(&self, values: Vec<T>) -> Self {
        assert_eq!(values.len(), self.values.len());
        Self { values, ..self.clone() }
    }

    /// Contiguous sub-range `[start, end)` with metadata preserved.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self {
            values: self.values[start..end].to_vec(),
            timestamps: self.timestamps[start..end].to_vec(),
            ..self.clone()
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn sampling_period(&self) -> i64 {
        self.sampling_period
    }

    pub fn scale_factor(&self) -> T {
        self.scale_factor
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Shifts and scales to zero mean and unit (population) variance.
    pub fn normalize(&self) -> Result<Self> {
        let m = mean(&self.values);
        let sd = variance(&self.values).sqrt();
        if !(sd > T::zero()) {
            return Err(Error::ZeroVariance);
        }
        let values = self.values.iter().map(|&v| (v - m) / sd).collect();
        Ok(Self {
            values,
            normalized: true,
            ..self.clone()
        })
    }
}

/// Non-overlapping log-returns `scale · (ln P(t) − ln P(t − Δt))`.
pub fn compute_returns<T: Scalar>(
    prices: &PriceSeries,
    sampling_period: i64,
    scale: f64,
    normalize: bool,
) -> Result<ReturnSeries<T>> {
    compute_returns_with(prices, sampling_period, scale, normalize, Striding::NonOverlapping)
}

pub fn compute_returns_with<T: Scalar>(
    prices: &PriceSeries,
    sampling_period: i64,
    scale: f64,
    normalize: bool,
    striding: Striding,
) -> Result<ReturnSeries<T>> {
    let base = prices.base_period;
    if sampling_period <= 0 || sampling_period % base != 0 {
        return Err(Error::BadSamplingPeriod {
            period: sampling_period,
            base,
        });
    }
    let k = (sampling_period / base) as usize;
    let p = &prices.prices;
    let ts = &prices.timestamps;

    let (values, timestamps): (Vec<T>, Vec<i64>) = match striding {
        Striding::NonOverlapping => {
            let points = p.len() / k;
            if points < 2 {
                return Err(Error::TooShort {
                    need: 2 * k,
                    got: p.len(),
                });
            }
            (1..points)
                .map(|j| {
                    let (a, b) = ((j - 1) * k, j * k);
                    (T::lit(scale * (p[b].ln() - p[a].ln())), ts[b])
                })
                .unzip()
        }
        Striding::Overlapping => {
            if p.len() <= k {
                return Err(Error::TooShort {
                    need: k + 1,
                    got: p.len(),
                });
            }
            (k..p.len())
                .map(|b| (T::lit(scale * (p[b].ln() - p[b - k].ln())), ts[b]))
                .unzip()
        }
    };

    let series = ReturnSeries {
        values,
        timestamps,
        sampling_period,
        scale_factor: T::lit(scale),
        normalized: false,
    };
    if normalize {
        series.normalize()
    } else {
        Ok(series)
    }
}
