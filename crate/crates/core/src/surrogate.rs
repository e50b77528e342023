//! Shuffled and Fourier phase-randomized surrogates of a return series.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::ingest::ReturnSeries;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateKind {
    Shuffle,
    Phase,
}

impl std::str::FromStr for SurrogateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shuffle" => Ok(Self::Shuffle),
            "phase" => Ok(Self::Phase),
            other => Err(Error::InvalidArgument(format!("unknown surrogate kind {other:?}"))),
        }
    }
}

impl std::fmt::Display for SurrogateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Shuffle => "shuffle",
            Self::Phase => "phase",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurrogateSpec {
    pub kind: SurrogateKind,
    pub seed: u64,
    pub count: usize,
}

/// Uniform random permutation of the returns (Fisher–Yates).
pub fn shuffle<T: Scalar>(r: &ReturnSeries<T>, seed: u64) -> ReturnSeries<T> {
    let mut values = r.values().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    values.shuffle(&mut rng);
    r.replace_values(values)
}

/// Keeps Fourier amplitudes and replaces phases with i.i.d. uniform draws.
///
/// Hermitian symmetry is enforced so the inverse transform is real; the
/// zero-frequency bin and, for even lengths, the Nyquist bin are kept as is.
pub fn phase_surrogate<T: Scalar>(r: &ReturnSeries<T>, seed: u64) -> Result<ReturnSeries<T>> {
    let n = r.len();
    if n < 4 {
        return Err(Error::TooShort { need: 4, got: n });
    }
    let mut planner = FftPlanner::<T>::new();
    let mut spectrum: Vec<Complex<T>> = r.values().iter().map(|&v| Complex::new(v, T::zero())).collect();
    planner.plan_fft_forward(n).process(&mut spectrum);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    for k in 1..=(n - 1) / 2 {
        let amp = spectrum[k].norm();
        let phi = T::lit(rng.random_range(0.0..tau));
        let z = Complex::from_polar(amp, phi);
        spectrum[k] = z;
        spectrum[n - k] = z.conj();
    }
    if n.is_multiple_of(2) {
        spectrum[n / 2].im = T::zero();
    }
    spectrum[0].im = T::zero();

    planner.plan_fft_inverse(n).process(&mut spectrum);
    let scale = T::from_usize_lossy(n);
    Ok(r.replace_values(spectrum.iter().map(|c| c.re / scale).collect()))
}

/// An ensemble of `spec.count` surrogates; member `i` uses seed `spec.seed + i`.
pub fn generate<T: Scalar>(r: &ReturnSeries<T>, spec: SurrogateSpec) -> Result<Vec<ReturnSeries<T>>> {
    if spec.count == 0 {
        return Err(Error::InvalidArgument("surrogate count must be at least 1".into()));
    }
    (0..spec.count as u64)
        .map(|i| {
            let seed = spec.seed.wrapping_add(i);
            match spec.kind {
                SurrogateKind::Shuffle => Ok(shuffle(r, seed)),
                SurrogateKind::Phase => phase_surrogate(r, seed),
            }
        })
        .collect()
}

/// `|X_k|²` of the discrete Fourier transform.
pub fn periodogram<T: Scalar>(x: &[T]) -> Vec<T> {
    let mut buf: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();
    FftPlanner::<T>::new().plan_fft_forward(x.len()).process(&mut buf);
    buf.iter().map(|c| c.norm_sqr()).collect()
}
