use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed input at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("empty input")]
    Empty,

    #[error("non-positive price {price} at row {row}")]
    NonPositivePrice { row: usize, price: f64 },

    #[error("timestamps not strictly increasing at row {row} (t = {timestamp})")]
    NonMonotone { row: usize, timestamp: i64 },

    #[error("timestamp {timestamp} at row {row} is off the {base_period}s grid")]
    OffGrid {
        row: usize,
        timestamp: i64,
        base_period: i64,
    },

    #[error("sampling period {period}s is not a positive multiple of the base period {base}s")]
    BadSamplingPeriod { period: i64, base: i64 },

    #[error("too few observations: need at least {need}, got {got}")]
    TooShort { need: usize, got: usize },

    #[error("zero-variance input")]
    ZeroVariance,

    #[error("invalid scales (need {min_allowed} <= s <= {max_allowed}): {offending:?}")]
    InvalidScales {
        offending: Vec<usize>,
        min_allowed: usize,
        max_allowed: usize,
    },

    #[error("only {got} usable scales inside fit range [{s_min}, {s_max}], need at least 4")]
    InsufficientScales { got: usize, s_min: usize, s_max: usize },

    #[error("non-positive autocorrelation {value} at lag {lag} inside the fit range")]
    NonPositiveAcf { lag: usize, value: f64 },

    #[error("q-grid is not uniform")]
    NonUniformQGrid,

    #[error("q = {0} is not on the q-grid")]
    OffGridQ(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("MCMC chain produced a non-finite value")]
    NonFiniteChain,

    #[error("simulation aborted at t = {0}: variance denominator stayed non-positive")]
    SimulationAborted(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
