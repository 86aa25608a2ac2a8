//! Closed-form results for GBM partial ensemble averages.

use crate::error::{Error, Result};
use crate::stats::{normal_cdf, normal_pdf, normal_sf};
use crate::stochastic::{GbmParams, WienerPath};

/// Long-time growth rate of any finite PEA, `mu - sigma^2 / 2`.
pub fn time_average_growth(params: &GbmParams) -> f64 {
    params.time_average_rate()
}

/// Large-ensemble growth rate at any finite time, `mu`.
pub fn ensemble_average_growth(params: &GbmParams) -> f64 {
    params.ensemble_rate()
}

/// Density of `g_est(t, N = 1)`: Gaussian with mean `mu - sigma^2/2` and
/// standard deviation `sigma / sqrt(t)`.
pub fn g_est_density(params: &GbmParams, t: f64, g: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("t", format!("must be > 0, got {t}")));
    }
    if params.sigma() == 0.0 {
        return Err(Error::invalid("sigma", "density is degenerate for sigma = 0"));
    }
    let sd = params.sigma() / t.sqrt();
    Ok(normal_pdf((g - params.time_average_rate()) / sd) / sd)
}

fn check_extreme_inputs(params: &GbmParams, n: u64, t: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("N", "must be >= 1"));
    }
    if !(t > 0.0) {
        return Err(Error::invalid("t", format!("must be > 0, got {t}")));
    }
    if params.sigma() == 0.0 {
        return Err(Error::invalid("sigma", "threshold eps t / sigma is undefined for sigma = 0"));
    }
    Ok(())
}

/// `P(max_i W_i(t) > eps t / sigma) = 1 - Phi(eps sqrt(t) / sigma)^N`.
///
/// Evaluated as `-expm1(N ln(1 - Q))` with `Q` the upper normal tail, which
/// keeps full relative precision when the probability is tiny.
pub fn extreme_exceedance_probability(params: &GbmParams, n: u64, t: f64, epsilon: f64) -> Result<f64> {
    check_extreme_inputs(params, n, t)?;
    let q = normal_sf(epsilon * t.sqrt() / params.sigma());
    Ok(-(n as f64 * (-q).ln_1p()).exp_m1())
}

/// `P(min_i W_i(t) < -eps t / sigma)`; equal to the exceedance probability
/// by the sign symmetry of the Wiener process.
pub fn extreme_deficiency_probability(params: &GbmParams, n: u64, t: f64, epsilon: f64) -> Result<f64> {
    check_extreme_inputs(params, n, t)?;
    // P(min W < -a) = 1 - (1 - P(W_i < -a))^N.
    let q = normal_cdf(-epsilon * t.sqrt() / params.sigma());
    Ok(-(n as f64 * (-q).ln_1p()).exp_m1())
}

/// Predicted scale of the PEA deviation, `sigma exp(mu t) sqrt(t / N)`.
pub fn deviation_scale(params: &GbmParams, n: u64, t: f64) -> f64 {
    debug_assert!(n >= 1);
    params.sigma() * (params.mu() * t).exp() * (t / n as f64).sqrt()
}

/// Solution of the linearised deviation equation
/// `d eps = mu eps dt + sigma exp(mu t) dW`, `eps(0) = 0`, on one path.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedDeviation {
    /// Euler integration driven by the path increments.
    pub euler: Vec<f64>,
    /// Closed form `sigma exp(mu t) W(t)`.
    pub exact: Vec<f64>,
}

pub fn simulate_linearized_deviation(params: &GbmParams, path: &WienerPath) -> LinearizedDeviation {
    let grid = path.grid();
    let dt = grid.dt();
    let (mu, sigma) = (params.mu(), params.sigma());
    let mut euler = Vec::with_capacity(grid.n_points());
    let mut eps = 0.0;
    euler.push(eps);
    for (k, dw) in path.increments().enumerate() {
        eps += mu * eps * dt + sigma * (mu * grid.time(k)).exp() * dw;
        euler.push(eps);
    }
    let exact = path
        .values()
        .iter()
        .enumerate()
        .map(|(k, w)| sigma * (mu * grid.time(k)).exp() * w)
        .collect();
    LinearizedDeviation { euler, exact }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSolution {
    pub tau: f64,
    pub residual: f64,
    pub iterations: usize,
}

pub const TAU_TOLERANCE: f64 = 1e-12;
pub const TAU_MAX_ITERATIONS: usize = 10_000;
pub const TAU_MAX_RESIDUAL: f64 = 1e-10;

/// `|tau - (ln(eps sqrt N) - ln(sigma sqrt tau)) / mu|`.
pub fn tau_residual(params: &GbmParams, n: u64, epsilon: f64, tau: f64) -> f64 {
    let rhs = ((epsilon * (n as f64).sqrt()).ln() - (params.sigma() * tau.sqrt()).ln()) / params.mu();
    (tau - rhs).abs()
}

/// Deviation time `tau` solving `tau = (ln(eps sqrt N) - ln(sigma sqrt tau)) / mu`.
///
/// Works on `s = ln tau`, where the equation reads
/// `h(s) = mu e^s + s/2 + ln sigma - ln(eps sqrt N) = 0`. For `mu > 0` the
/// function `h` is increasing and convex, so the root is unique and Newton
/// iteration converges from any start (after at most one overshoot).
pub fn solve_tau(params: &GbmParams, n: u64, epsilon: f64) -> Result<TauSolution> {
    let (mu, sigma) = (params.mu(), params.sigma());
    if !(mu > 0.0) {
        return Err(Error::invalid("mu", format!("must be > 0, got {mu}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma", format!("must be > 0, got {sigma}")));
    }
    if n == 0 {
        return Err(Error::invalid("N", "must be >= 1"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid("epsilon", format!("must be finite and > 0, got {epsilon}")));
    }
    let target = (epsilon * (n as f64).sqrt()).ln() - sigma.ln();
    let mut s = (target / mu).max(1.0).ln();
    for iterations in 1..=TAU_MAX_ITERATIONS {
        let e = s.exp();
        let h = mu * e + 0.5 * s - target;
        let step = h / (mu * e + 0.5);
        s -= step;
        if !s.is_finite() {
            return Err(Error::NoPositiveSolution(format!(
                "iterate diverged for N = {n}, epsilon = {epsilon}"
            )));
        }
        if step.abs() <= TAU_TOLERANCE * s.abs().max(1.0) {
            let tau = s.exp();
            let residual = tau_residual(params, n, epsilon, tau);
            if residual > TAU_MAX_RESIDUAL {
                return Err(Error::NoConvergence { iterations, residual });
            }
            return Ok(TauSolution {
                tau,
                residual,
                iterations,
            });
        }
    }
    let tau = s.exp();
    Err(Error::NoConvergence {
        iterations: TAU_MAX_ITERATIONS,
        residual: tau_residual(params, n, epsilon, tau),
    })
}
