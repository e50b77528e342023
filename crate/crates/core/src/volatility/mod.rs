//! GARCH, GJR–GARCH and rational GARCH volatility models with Bayesian
//! estimation and information criteria.

mod mcmc;
mod model;

pub use mcmc::{estimate, metropolis_step, ChainConfig, VolatilityFit};
pub use model::{filter_variance, log_likelihood, simulate, VolModel, VolModelParams, DAY};
