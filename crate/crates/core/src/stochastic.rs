//! Reproducible sampling of Wiener paths and GBM trajectories.
//!
//! Every random stream is derived from a [`SeedSpec`]: a master seed plus the
//! coordinates of the draw (experiment, ensemble-size index, replicate,
//! trajectory). The coordinates are packed injectively into a ChaCha8 key, so
//! a stream depends only on its coordinates and never on the order in which
//! work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Parameters of `dx = x (mu dt + sigma dW)` with initial value `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbmParams {
    mu: f64,
    sigma: f64,
    sigma2: f64,
    x0: f64,
}

impl GbmParams {
    pub fn new(mu: f64, sigma: f64, x0: f64) -> Result<Self> {
        Self::build(mu, sigma, sigma * sigma, x0)
    }

    fn build(mu: f64, sigma: f64, sigma2: f64, x0: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::invalid("mu", format!("must be finite, got {mu}")));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::invalid(
                "sigma",
                format!("must be finite and >= 0, got {sigma}"),
            ));
        }
        if !(x0.is_finite() && x0 > 0.0) {
            return Err(Error::invalid("x0", format!("must be finite and > 0, got {x0}")));
        }
        if !(mu - 0.5 * sigma2).is_finite() {
            return Err(Error::invalid("sigma", "time-average rate overflows"));
        }
        Ok(GbmParams {
            mu,
            sigma,
            sigma2,
            x0,
        })
    }

    /// Builds parameters from the noise variance `sigma^2`, the form in which
    /// the noise is usually quoted.
    pub fn from_variance(mu: f64, sigma2: f64, x0: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::invalid(
                "sigma2",
                format!("must be finite and >= 0, got {sigma2}"),
            ));
        }
        Self::build(mu, sigma2.sqrt(), sigma2, x0)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// `mu - sigma^2 / 2`.
    pub fn time_average_rate(&self) -> f64 {
        self.mu - 0.5 * self.sigma2
    }

    /// `mu`.
    pub fn ensemble_rate(&self) -> f64 {
        self.mu
    }
}

/// Uniform grid `0, dt, 2 dt, ..., t_max` with `n_steps + 1` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_steps: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::invalid("tmax", format!("must be finite and > 0, got {t_max}")));
        }
        if n_steps == 0 {
            return Err(Error::ZeroSteps);
        }
        Ok(TimeGrid { t_max, n_steps })
    }

    /// Grid with step `dt`; `t_max` must be an integer multiple of `dt` up to
    /// a relative tolerance of `1e-9`.
    pub fn with_step(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid("dt", format!("must be finite and > 0, got {dt}")));
        }
        let ratio = t_max / dt;
        let n = ratio.round();
        if !(n >= 1.0 && (ratio - n).abs() <= 1e-9 * n) {
            return Err(Error::invalid(
                "dt",
                format!("tmax = {t_max} is not an integer multiple of dt = {dt}"),
            ));
        }
        Self::new(t_max, n as usize)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_points(&self) -> usize {
        self.n_steps + 1
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    /// Time of grid point `k`; exact at both ends.
    pub fn time(&self, k: usize) -> f64 {
        debug_assert!(k <= self.n_steps);
        self.t_max * k as f64 / self.n_steps as f64
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points()).map(|k| self.time(k))
    }

    /// Grid with every `factor`-th point of this one.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.n_steps.is_multiple_of(factor) {
            return Err(Error::invalid(
                "factor",
                format!("{factor} does not divide {} steps", self.n_steps),
            ));
        }
        Self::new(self.t_max, self.n_steps / factor)
    }
}

/// Coordinates of a random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub experiment: u32,
    pub size_index: u32,
    pub replicate: u64,
    pub trajectory: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        SeedSpec {
            master_seed,
            ..Default::default()
        }
    }

    pub fn experiment(mut self, experiment: u32) -> Self {
        self.experiment = experiment;
        self
    }

    pub fn size_index(mut self, size_index: u32) -> Self {
        self.size_index = size_index;
        self
    }

    pub fn replicate(mut self, replicate: u64) -> Self {
        self.replicate = replicate;
        self
    }

    pub fn trajectory(mut self, trajectory: u64) -> Self {
        self.trajectory = trajectory;
        self
    }

    fn key(&self) -> [u8; 32] {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..12].copy_from_slice(&self.experiment.to_le_bytes());
        key[12..16].copy_from_slice(&self.size_index.to_le_bytes());
        key[16..24].copy_from_slice(&self.replicate.to_le_bytes());
        key[24..32].copy_from_slice(&self.trajectory.to_le_bytes());
        key
    }
}

/// A stream of standard normal variates.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn next_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for z in out {
            *z = self.next_normal();
        }
    }
}

impl Iterator for RandomStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_normal())
    }
}

pub fn derive_stream(seed: &SeedSpec) -> RandomStream {
    RandomStream {
        rng: ChaCha8Rng::from_seed(seed.key()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WienerPath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl WienerPath {
    pub fn from_values(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: grid.n_points(),
            });
        }
        if values[0] != 0.0 {
            return Err(Error::invalid("values", "W(0) must be 0"));
        }
        Ok(WienerPath { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn endpoint(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn increments(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    /// The same path observed on every `factor`-th grid point.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        let grid = self.grid.coarsen(factor)?;
        let values = self.values.iter().step_by(factor).copied().collect();
        Ok(WienerPath { grid, values })
    }
}

/// `W(k dt) = sum_{j < k} sqrt(dt) z_j`, `W(0) = 0`.
pub fn sample_wiener(grid: &TimeGrid, stream: &mut RandomStream) -> WienerPath {
    let sqrt_dt = grid.dt().sqrt();
    let mut values = Vec::with_capacity(grid.n_points());
    let mut w = 0.0;
    values.push(w);
    for _ in 0..grid.n_steps() {
        w += sqrt_dt * stream.next_normal();
        values.push(w);
    }
    WienerPath {
        grid: *grid,
        values,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl Trajectory {
    pub fn from_values(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: grid.n_points(),
            });
        }
        Ok(Trajectory { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn endpoint(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

#[inline]
fn exact_point(params: &GbmParams, t: f64, w: f64) -> f64 {
    params.x0 * (params.time_average_rate() * t + params.sigma * w).exp()
}

/// `x(t) = x0 exp((mu - sigma^2/2) t + sigma W(t))` at every grid point.
pub fn simulate_exact(params: &GbmParams, path: &WienerPath) -> Trajectory {
    let grid = path.grid;
    let values = path
        .values
        .iter()
        .enumerate()
        .map(|(k, &w)| exact_point(params, grid.time(k), w))
        .collect();
    Trajectory { grid, values }
}

/// Euler-Maruyama: `x_{k+1} = x_k (1 + mu dt + sigma dW_k)`, driven by the
/// increments of `path`. A non-positive iterate invalidates the trajectory.
pub fn simulate_euler(params: &GbmParams, path: &WienerPath) -> Result<Trajectory> {
    let grid = path.grid;
    let dt = grid.dt();
    let mut values = Vec::with_capacity(grid.n_points());
    let mut x = params.x0;
    values.push(x);
    for (k, dw) in path.increments().enumerate() {
        x *= 1.0 + params.mu * dt + params.sigma * dw;
        if x <= 0.0 {
            return Err(Error::EulerNonPositive {
                step: k + 1,
                time: grid.time(k + 1),
                value: x,
            });
        }
        values.push(x);
    }
    Ok(Trajectory { grid, values })
}

/// Adds one exact trajectory, drawn from `stream`, to `sum` pointwise.
///
/// Bit-identical to `simulate_exact(params, &sample_wiener(grid, stream))`
/// followed by an elementwise add, without the intermediate allocations.
pub fn accumulate_exact(
    params: &GbmParams,
    grid: &TimeGrid,
    stream: &mut RandomStream,
    sum: &mut [f64],
) {
    debug_assert_eq!(sum.len(), grid.n_points());
    let sqrt_dt = grid.dt().sqrt();
    let mut w = 0.0;
    sum[0] += exact_point(params, 0.0, 0.0);
    for (k, s) in sum.iter_mut().enumerate().skip(1) {
        w += sqrt_dt * stream.next_normal();
        *s += exact_point(params, grid.time(k), w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_params() -> GbmParams {
        GbmParams::from_variance(0.05, 0.2, 1.0).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(GbmParams::new(0.05, -0.1, 1.0).is_err());
        assert!(GbmParams::new(0.05, 0.1, 0.0).is_err());
        assert!(GbmParams::new(f64::NAN, 0.1, 1.0).is_err());
        assert!(GbmParams::from_variance(0.05, -1.0, 1.0).is_err());
        let p = default_params();
        assert!((p.time_average_rate() + 0.05).abs() < 1e-15);
        assert_eq!(p.ensemble_rate(), 0.05);
    }

    #[test]
    fn grid_points_are_exact() {
        let g = TimeGrid::with_step(60.0, 0.1).unwrap();
        assert_eq!(g.n_steps(), 600);
        assert_eq!(g.time(0), 0.0);
        assert_eq!(g.time(600), 60.0);
        assert_eq!(g.times().len(), 601);
        assert!(matches!(TimeGrid::new(1.0, 0), Err(Error::ZeroSteps)));
        assert!(TimeGrid::with_step(1.0, 0.3).is_err());
        assert!(TimeGrid::with_step(1.0, 0.0).is_err());
    }

    #[test]
    fn stream_is_deterministic() {
        let spec = SeedSpec::new(7).experiment(1).size_index(2).replicate(3).trajectory(4);
        let a: Vec<f64> = derive_stream(&spec).take(1000).collect();
        let b: Vec<f64> = derive_stream(&spec).take(1000).collect();
        assert_eq!(a, b);
        let c: Vec<f64> = derive_stream(&spec.trajectory(5)).take(1000).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn replicate_streams_are_uncorrelated() {
        let n = 10_000u64;
        let base = SeedSpec::new(11).experiment(3);
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let a = derive_stream(&base.trajectory(i).replicate(0)).next_normal();
                let b = derive_stream(&base.trajectory(i).replicate(1)).next_normal();
                (a, b)
            })
            .collect();
        let nf = n as f64;
        let (ma, mb) = pairs
            .iter()
            .fold((0.0, 0.0), |(x, y), &(a, b)| (x + a / nf, y + b / nf));
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for &(a, b) in &pairs {
            sab += (a - ma) * (b - mb);
            saa += (a - ma) * (a - ma);
            sbb += (b - mb) * (b - mb);
        }
        let r = sab / (saa * sbb).sqrt();
        assert!(r.abs() < 4.0 / nf.sqrt(), "correlation {r}");
    }

    #[test]
    fn normal_moments() {
        let n = 1_000_000;
        let mut s = derive_stream(&SeedSpec::new(5));
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..n {
            let z = s.next_normal();
            sum += z;
            sum2 += z * z;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        assert!(mean.abs() < 4e-3, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn wiener_endpoint_moments() {
        let grid = TimeGrid::new(2.0, 20).unwrap();
        let m = 100_000u64;
        let ends: Vec<f64> = (0..m)
            .map(|r| {
                let mut s = derive_stream(&SeedSpec::new(9).replicate(r));
                let p = sample_wiener(&grid, &mut s);
                assert_eq!(p.values()[0], 0.0);
                p.endpoint()
            })
            .collect();
        let mean = ends.iter().sum::<f64>() / m as f64;
        let var = ends.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        assert!(mean.abs() < 4.0 * (2.0 / m as f64).sqrt(), "mean {mean}");
        assert!((var / 2.0 - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn exact_noiseless_is_exponential() {
        let p = GbmParams::new(0.05, 0.0, 1.0).unwrap();
        let grid = TimeGrid::new(10.0, 100).unwrap();
        let path = sample_wiener(&grid, &mut derive_stream(&SeedSpec::new(1)));
        let x = simulate_exact(&p, &path);
        assert!((x.endpoint() - 1.648_721_270_700_128).abs() < 1e-12);
        assert_eq!(x.values()[0], 1.0);
    }

    #[test]
    fn exact_mean_and_log_mean() {
        let p = default_params();
        let grid = TimeGrid::new(5.0, 50).unwrap();
        let m = 100_000u64;
        let ends: Vec<f64> = (0..m)
            .map(|r| {
                let path = sample_wiener(&grid, &mut derive_stream(&SeedSpec::new(2).replicate(r)));
                let x = simulate_exact(&p, &path);
                assert!(x.values().iter().all(|&v| v > 0.0));
                x.endpoint()
            })
            .collect();
        let mf = m as f64;
        let mean = ends.iter().sum::<f64>() / mf;
        let sd = (ends.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (mf - 1.0)).sqrt();
        let expected = (0.25f64).exp();
        assert!((mean - expected).abs() < 3.0 * sd / mf.sqrt(), "mean {mean}");
        let log_mean = ends.iter().map(|x| x.ln()).sum::<f64>() / mf;
        let log_expected = p.time_average_rate() * 5.0;
        assert!((log_mean - log_expected).abs() < 4.0 * p.sigma() * (5.0 / mf).sqrt());
    }

    #[test]
    fn euler_noiseless_error_is_first_order() {
        let p = GbmParams::new(0.05, 0.0, 1.0).unwrap();
        let mut errs = Vec::new();
        for n in [100, 200, 400] {
            let grid = TimeGrid::new(10.0, n).unwrap();
            let path = WienerPath::from_values(grid, vec![0.0; n + 1]).unwrap();
            let x = simulate_euler(&p, &path).unwrap();
            errs.push((x.endpoint() - 0.5f64.exp()).abs());
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 2.0).abs() < 0.05, "ratio {ratio}");
        }
    }

    #[test]
    fn euler_strong_error_shrinks_with_dt() {
        let p = default_params();
        let fine = TimeGrid::with_step(1.0, 0.025).unwrap();
        let m = 10_000u64;
        let mut sq = [0.0; 3];
        for r in 0..m {
            let path = sample_wiener(&fine, &mut derive_stream(&SeedSpec::new(3).replicate(r)));
            let exact = simulate_exact(&p, &path).endpoint();
            for (i, factor) in [4, 2, 1].into_iter().enumerate() {
                let coarse = path.coarsen(factor).unwrap();
                let e = simulate_euler(&p, &coarse).unwrap().endpoint();
                sq[i] += (e - exact).powi(2);
            }
        }
        let rms: Vec<f64> = sq.iter().map(|s| (s / m as f64).sqrt()).collect();
        assert!(rms[0] > rms[1] && rms[1] > rms[2], "{rms:?}");
    }

    #[test]
    fn euler_reports_zero_crossing() {
        let p = GbmParams::new(0.0, 1.0, 1.0).unwrap();
        let grid = TimeGrid::new(1.0, 1).unwrap();
        let path = WienerPath::from_values(grid, vec![0.0, -2.0]).unwrap();
        assert!(matches!(
            simulate_euler(&p, &path),
            Err(Error::EulerNonPositive { step: 1, .. })
        ));
    }

    #[test]
    fn accumulate_matches_two_stage_sampler() {
        let p = default_params();
        let grid = TimeGrid::new(3.0, 30).unwrap();
        let spec = SeedSpec::new(4).trajectory(8);
        let mut sum = vec![0.0; grid.n_points()];
        accumulate_exact(&p, &grid, &mut derive_stream(&spec), &mut sum);
        let x = simulate_exact(&p, &sample_wiener(&grid, &mut derive_stream(&spec)));
        assert_eq!(sum, x.values());
    }
}
