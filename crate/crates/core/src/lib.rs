//! Monte Carlo engine and analysis toolkit for ergodicity breaking in
//! geometric Brownian motion (GBM).
//!
//! The crate simulates partial ensemble averages (PEAs) `<x(t)>_N` of `N`
//! GBM trajectories, measures the growth-rate estimator
//! `g_est(t, N) = ln(<x(t)>_N) / t` and the times at which a PEA departs from
//! the ensemble average `x0 * exp(mu * t)`, and compares them with the
//! closed-form results in [`theory`].
//!
//! Module map:
//!
//! * [`stochastic`]: parameters, grids, reproducible random streams, Wiener
//!   paths and the exact / Euler-Maruyama GBM samplers.
//! * [`pea`]: partial ensemble averages, growth rates, deviations and
//!   crossing detection.
//! * [`theory`]: closed-form growth rates, densities, extreme-value
//!   probabilities, the deviation scale and the implicit deviation-time
//!   equation.
//! * [`experiments`]: percentile fans, median PEA trajectories across `N`
//!   and deviation-time scaling with a logarithmic fit.
//! * [`stats`]: percentiles, the normal CDF, OLS, Kolmogorov-Smirnov.
//! * [`cli_io`]: configuration parsing and CSV emission for the `ergo` CLI.

pub mod cli_io;
pub mod error;
pub mod experiments;
pub mod pea;
pub mod stats;
pub mod stochastic;
pub mod theory;

pub use error::{Error, Result};
pub use stochastic::{GbmParams, SeedSpec, TimeGrid};
