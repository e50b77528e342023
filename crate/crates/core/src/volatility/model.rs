use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::ingest::ReturnSeries;
use crate::scalar::Scalar;

/// Seconds in one trading day; simulated series are stamped on this grid.
pub const DAY: i64 = 86_400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VolModel {
    Garch,
    Gjr,
    Rgarch,
}

impl VolModel {
    /// Number of free parameters.
    pub fn dimension(self) -> usize {
        match self {
            Self::Garch => 3,
            Self::Gjr | Self::Rgarch => 4,
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Self::Garch => &["omega", "alpha", "beta"],
            Self::Gjr => &["omega", "alpha", "beta", "delta"],
            Self::Rgarch => &["omega", "alpha", "beta", "gamma"],
        }
    }
}

impl std::str::FromStr for VolModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "garch" => Ok(Self::Garch),
            "gjr" | "gjr-garch" => Ok(Self::Gjr),
            "rgarch" => Ok(Self::Rgarch),
            other => Err(Error::InvalidArgument(format!("unknown volatility model {other:?}"))),
        }
    }
}

impl std::fmt::Display for VolModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Garch => "garch",
            Self::Gjr => "gjr",
            Self::Rgarch => "rgarch",
        })
    }
}

/// Conditional-variance recursion parameters.
///
/// `Garch`: `σ²_t = ω + α r²_{t−1} + β σ²_{t−1}`.
/// `Gjr`: adds `δ r²_{t−1}` when `r_{t−1} < 0`.
/// `Rgarch`: divides the GARCH numerator by `1 + γ r_{t−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolModelParams<T = f64> {
    Garch { omega: T, alpha: T, beta: T },
    Gjr { omega: T, alpha: T, beta: T, delta: T },
    Rgarch { omega: T, alpha: T, beta: T, gamma: T },
}

impl<T: Scalar> VolModelParams<T> {
    pub fn garch(omega: T, alpha: T, beta: T) -> Self {
        Self::Garch { omega, alpha, beta }
    }

    pub fn model(&self) -> VolModel {
        match self {
            Self::Garch { .. } => VolModel::Garch,
            Self::Gjr { .. } => VolModel::Gjr,
            Self::Rgarch { .. } => VolModel::Rgarch,
        }
    }

    fn core(&self) -> (T, T, T) {
        match *self {
            Self::Garch { omega, alpha, beta }
            | Self::Gjr { omega, alpha, beta, .. }
            | Self::Rgarch { omega, alpha, beta, .. } => (omega, alpha, beta),
        }
    }

    pub fn omega(&self) -> T {
        self.core().0
    }

    pub fn alpha(&self) -> T {
        self.core().1
    }

    pub fn beta(&self) -> T {
        self.core().2
    }

    /// Parameters in `VolModel::param_names` order.
    pub fn to_vec(&self) -> Vec<T> {
        let (o, a, b) = self.core();
        match *self {
            Self::Garch { .. } => vec![o, a, b],
            Self::Gjr { delta, .. } => vec![o, a, b, delta],
            Self::Rgarch { gamma, .. } => vec![o, a, b, gamma],
        }
    }

    pub fn from_slice(model: VolModel, v: &[T]) -> Result<Self> {
        if v.len() != model.dimension() {
            return Err(Error::InvalidParams(format!(
                "{model} takes {} parameters, got {}",
                model.dimension(),
                v.len()
            )));
        }
        Ok(match model {
            VolModel::Garch => Self::Garch {
                omega: v[0],
                alpha: v[1],
                beta: v[2],
            },
            VolModel::Gjr => Self::Gjr {
                omega: v[0],
                alpha: v[1],
                beta: v[2],
                delta: v[3],
            },
            VolModel::Rgarch => Self::Rgarch {
                omega: v[0],
                alpha: v[1],
                beta: v[2],
                gamma: v[3],
            },
        })
    }

    /// `ω > 0`, `α ≥ 0`, `β ≥ 0`, everything finite.
    pub fn validate(&self) -> Result<()> {
        let (o, a, b) = self.core();
        if self.to_vec().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if !(o > T::zero()) || a < T::zero() || b < T::zero() {
            return Err(Error::InvalidParams(format!(
                "need omega > 0, alpha >= 0, beta >= 0; got ({o}, {a}, {b})"
            )));
        }
        Ok(())
    }

    /// Variance given the previous return and variance.
    fn step(&self, r_prev: T, var_prev: T) -> Option<T> {
        let (o, a, b) = self.core();
        let base = o + a * r_prev * r_prev + b * var_prev;
        let v = match *self {
            Self::Garch { .. } => base,
            Self::Gjr { delta, .. } => {
                if r_prev < T::zero() {
                    base + delta * r_prev * r_prev
                } else {
                    base
                }
            }
            Self::Rgarch { gamma, .. } => {
                let denom = T::one() + gamma * r_prev;
                if !(denom > T::zero()) {
                    return None;
                }
                base / denom
            }
        };
        (v > T::zero() && v.is_finite()).then_some(v)
    }
}

/// Conditional variance path `σ²_1, ..., σ²_T`.
///
/// The pre-sample squared return and variance are both backcast by the
/// mean squared return `v`, so `σ²_1 = ω + (α + β)·v`.
pub fn filter_variance<T: Scalar>(params: &VolModelParams<T>, r: &[T]) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(r.len());
    for_each_variance(params, r, |_, s2| out.push(s2))?;
    Ok(out)
}

/// Drives the variance recursion, handing `(t, σ²_t)` to `visit`.
fn for_each_variance<T: Scalar>(params: &VolModelParams<T>, r: &[T], mut visit: impl FnMut(usize, T)) -> Result<()> {
    params.validate()?;
    if r.is_empty() {
        return Err(Error::Empty);
    }
    let v = r.iter().map(|&x| x * x).sum::<T>() / T::from_usize_lossy(r.len());
    let mut s2 = params.omega() + (params.alpha() + params.beta()) * v;
    visit(0, s2);
    for t in 1..r.len() {
        s2 = params
            .step(r[t - 1], s2)
            .ok_or_else(|| Error::InvalidParams(format!("non-positive conditional variance at t = {t}")))?;
        visit(t, s2);
    }
    Ok(())
}

/// Gaussian log-likelihood; `-inf` for parameter points the filter rejects.
pub fn log_likelihood<T: Scalar>(params: &VolModelParams<T>, r: &[T]) -> T {
    let ln_2pi = T::lit((2.0 * std::f64::consts::PI).ln());
    let half = T::lit(0.5);
    let mut acc = T::zero();
    let ok = for_each_variance(params, r, |t, s2| {
        let x = r[t];
        acc = acc - half * (ln_2pi + s2.ln()) - half * x * x / s2;
    });
    if ok.is_err() {
        T::neg_infinity()
    } else {
        acc
    }
}

/// Simulates `len` returns `r_t = σ_t ε_t` with seeded Gaussian `ε_t`.
///
/// The recursion starts from the unconditional variance when it exists and
/// from `ω` otherwise.
pub fn simulate<T: Scalar>(params: &VolModelParams<T>, len: usize, seed: u64) -> Result<ReturnSeries<T>> {
    params.validate()?;
    let (o, a, b) = params.core();
    let persistence = match *params {
        VolModelParams::Gjr { delta, .. } => a + b + delta / T::lit(2.0),
        _ => a + b,
    };
    if persistence >= T::one() {
        log::warn!("simulating a non-stationary parameter point (persistence {persistence})");
    }
    let mut var = if persistence < T::one() {
        o / (T::one() - persistence)
    } else {
        o
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(len);
    for t in 0..len {
        let sd = var.sqrt();
        let mut tries = 0;
        loop {
            let eps: f64 = StandardNormal.sample(&mut rng);
            let r = sd * T::lit(eps);
            if t + 1 == len {
                out.push(r);
                break;
            }
            if let Some(next) = params.step(r, var) {
                out.push(r);
                var = next;
                break;
            }
            tries += 1;
            if tries >= 100 {
                return Err(Error::SimulationAborted(t));
            }
        }
    }
    Ok(ReturnSeries::from_values(out, DAY))
}
