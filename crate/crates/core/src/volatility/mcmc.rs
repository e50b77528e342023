//! Random-walk Metropolis estimation of volatility models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::model::{log_likelihood, VolModel, VolModelParams};
use crate::error::{Error, Result};
use crate::scalar::{mean, Scalar};

/// One Metropolis accept/reject decision for a symmetric proposal.
///
/// Returns the new state, its log density and whether the proposal was taken.
/// A proposal with log density `-inf` is always rejected.
pub fn metropolis_step<S, R: Rng + ?Sized>(
    current: S,
    current_log_density: f64,
    proposal: S,
    log_density: impl FnOnce(&S) -> f64,
    rng: &mut R,
) -> (S, f64, bool) {
    let proposed = log_density(&proposal);
    if proposed == f64::NEG_INFINITY || proposed.is_nan() {
        return (current, current_log_density, false);
    }
    let log_ratio = proposed - current_log_density;
    if log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio {
        (proposal, proposed, true)
    } else {
        (current, current_log_density, false)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub burn_in: usize,
    pub draws: usize,
    pub seed: u64,
    /// Initial proposal standard deviations; defaults depend on the data scale.
    pub step_sizes: Option<Vec<f64>>,
    pub target_acceptance: f64,
    /// Sweeps between step-size updates during burn-in.
    pub adapt_interval: usize,
    /// Subtract the sample mean before fitting.
    pub demean: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            burn_in: 20_000,
            draws: 80_000,
            seed: 0,
            step_sizes: None,
            target_acceptance: 0.4,
            adapt_interval: 100,
            demean: false,
        }
    }
}

/// Posterior summary of one volatility model.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityFit<T = f64> {
    pub model: VolModel,
    /// Retained draws, one row per sweep, columns in `model.param_names()` order.
    pub posterior: Vec<Vec<T>>,
    pub mean: Vec<T>,
    pub sd: Vec<T>,
    /// `2k − 2·max log L`, with the maximum taken over every chain state.
    pub aic: T,
    /// `2·D̄ − D(θ̄)`, `D = −2 log L`.
    pub dic: T,
    /// Effective number of parameters `D̄ − D(θ̄)`.
    pub p_d: T,
    pub acceptance_rate: T,
    pub log_likelihood_at_mean: T,
    pub max_log_likelihood: T,
    /// Posterior probability of `α + β < 1`.
    pub stationary_probability: T,
    pub step_sizes: Vec<f64>,
    pub warnings: Vec<String>,
}

impl<T: Scalar> VolatilityFit<T> {
    pub fn mean_params(&self) -> VolModelParams<T> {
        VolModelParams::from_slice(self.model, &self.mean).expect("dimension matches model")
    }
}

/// Componentwise random-walk Metropolis under a flat prior on the valid region.
///
/// Step sizes adapt during burn-in towards `target_acceptance` and are frozen
/// for the retained draws.
pub fn estimate<T: Scalar>(model: VolModel, r: &[T], config: &ChainConfig) -> Result<VolatilityFit<T>> {
    if r.len() < 200 {
        return Err(Error::TooShort {
            need: 200,
            got: r.len(),
        });
    }
    if config.draws < 2 {
        return Err(Error::InvalidArgument("need at least two retained draws".into()));
    }
    let data: Vec<T> = if config.demean {
        let m = mean(r);
        r.iter().map(|&x| x - m).collect()
    } else {
        r.to_vec()
    };
    let k = model.dimension();
    let second_moment = data.iter().map(|&x| x * x).sum::<T>().to_f64_lossy() / data.len() as f64;

    let mut theta: Vec<T> = {
        let mut v = vec![T::lit(0.05 * second_moment), T::lit(0.05), T::lit(0.9)];
        if k == 4 {
            v.push(T::zero());
        }
        v
    };
    let mut steps = match &config.step_sizes {
        Some(s) if s.len() == k => s.clone(),
        Some(s) => {
            return Err(Error::InvalidArgument(format!(
                "{model} needs {k} step sizes, got {}",
                s.len()
            )))
        }
        None => {
            let mut s = vec![0.02 * second_moment, 0.02, 0.02];
            if k == 4 {
                s.push(if model == VolModel::Rgarch {
                    0.02 / second_moment.sqrt().max(1e-12)
                } else {
                    0.02
                });
            }
            s
        }
    };

    let log_target = |v: &Vec<T>| -> f64 {
        match VolModelParams::from_slice(model, v) {
            Ok(p) if p.validate().is_ok() => log_likelihood(&p, &data).to_f64_lossy(),
            _ => f64::NEG_INFINITY,
        }
    };
    let mut lp = log_target(&theta);
    if !lp.is_finite() {
        return Err(Error::InvalidParams(format!(
            "starting point {theta:?} has zero likelihood"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut max_lp = lp;
    let mut batch_accepts = vec![0usize; k];
    let mut accepted = 0usize;
    let mut posterior = Vec::with_capacity(config.draws);
    let mut lls = Vec::with_capacity(config.draws);
    let interval = config.adapt_interval.max(1);

    for sweep in 0..config.burn_in + config.draws {
        for j in 0..k {
            let z: f64 = StandardNormal.sample(&mut rng);
            let mut prop = theta.clone();
            prop[j] = prop[j] + T::lit(steps[j] * z);
            let (next, next_lp, took) = metropolis_step(theta, lp, prop, log_target, &mut rng);
            theta = next;
            lp = next_lp;
            if took {
                if sweep < config.burn_in {
                    batch_accepts[j] += 1;
                } else {
                    accepted += 1;
                }
            }
        }
        if !lp.is_finite() {
            return Err(Error::NonFiniteChain);
        }
        max_lp = max_lp.max(lp);

        if sweep < config.burn_in {
            if (sweep + 1) % interval == 0 {
                for j in 0..k {
                    let rate = batch_accepts[j] as f64 / interval as f64;
                    steps[j] *= (2.0 * (rate - config.target_acceptance)).exp();
                    batch_accepts[j] = 0;
                }
            }
        } else {
            posterior.push(theta.clone());
            lls.push(lp);
        }
    }

    let n = posterior.len() as f64;
    let mean_v: Vec<f64> = (0..k)
        .map(|j| posterior.iter().map(|d| d[j].to_f64_lossy()).sum::<f64>() / n)
        .collect();
    let sd_v: Vec<f64> = (0..k)
        .map(|j| {
            let ss: f64 = posterior
                .iter()
                .map(|d| (d[j].to_f64_lossy() - mean_v[j]).powi(2))
                .sum();
            (ss / (n - 1.0)).sqrt()
        })
        .collect();
    let mean_theta: Vec<T> = mean_v.iter().map(|&v| T::lit(v)).collect();
    let ll_mean = log_target(&mean_theta);
    let d_bar = -2.0 * lls.iter().sum::<f64>() / n;
    let d_at_mean = -2.0 * ll_mean;
    let p_d = d_bar - d_at_mean;
    let dic = 2.0 * d_bar - d_at_mean;
    let aic = 2.0 * k as f64 - 2.0 * max_lp;
    let acceptance_rate = accepted as f64 / (config.draws * k) as f64;
    let stationary = posterior.iter().filter(|d| (d[1] + d[2]).to_f64_lossy() < 1.0).count() as f64 / n;

    let mut warnings = Vec::new();
    if !(0.05..=0.8).contains(&acceptance_rate) {
        warnings.push(format!("acceptance rate {acceptance_rate:.3} outside (0.05, 0.8)"));
    }
    if !ll_mean.is_finite() {
        warnings.push("posterior mean lies outside the valid region; DIC is infinite".into());
    }
    for w in &warnings {
        log::warn!("{model}: {w}");
    }

    Ok(VolatilityFit {
        model,
        posterior,
        mean: mean_theta,
        sd: sd_v.into_iter().map(T::lit).collect(),
        aic: T::lit(aic),
        dic: T::lit(dic),
        p_d: T::lit(p_d),
        acceptance_rate: T::lit(acceptance_rate),
        log_likelihood_at_mean: T::lit(ll_mean),
        max_log_likelihood: T::lit(max_lp),
        stationary_probability: T::lit(stationary),
        step_sizes: steps,
        warnings,
    })
}
