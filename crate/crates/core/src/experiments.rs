//! Data pipelines for the percentile fan, the median PEA trajectories across
//! ensemble sizes and the deviation-time scaling study.
//!
//! Every trajectory draws from its own stream keyed by
//! `(seed, experiment, N, replicate, trajectory)`, and all reductions run in
//! index order after the parallel phase, so outputs do not depend on the
//! number of worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pea::{
    deviation_series, first_deviation_time, unity_crossings, DeviationRecord, PeaSeries,
};
use crate::stats::{ols_line, percentile_sorted, spearman, OlsLine};
use crate::stochastic::{
    accumulate_exact, derive_stream, sample_wiener, simulate_exact, GbmParams, SeedSpec, TimeGrid,
};
use crate::theory::solve_tau;

/// Experiment coordinate of a [`SeedSpec`].
pub mod stream_ids {
    pub const FIG1: u32 = 1;
    /// Shared by the median-trajectory and deviation-time pipelines.
    pub const FIG2: u32 = 2;
    pub const ENDPOINTS: u32 = 3;
    pub const SIMULATE: u32 = 4;
}

pub const DEFAULT_DT: f64 = 0.1;
pub const FIG1_T_MAX: f64 = 100.0;
pub const FIG2_T_MAX: f64 = 60.0;
pub const DEFAULT_REPLICATES: usize = 10_000;

pub fn default_params() -> GbmParams {
    GbmParams::from_variance(0.05, 0.2, 1.0).expect("default parameters are valid")
}

/// Powers of two `1, 2, 4, ..., 1024`.
pub fn default_sizes() -> Vec<u64> {
    (0..=10).map(|k| 1u64 << k).collect()
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    Ok(pool.install(f))
}

fn sorted_column(rows: &[Vec<f64>], k: usize) -> Vec<f64> {
    let mut col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
    col.sort_by(f64::total_cmp);
    col
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Config {
    pub params: GbmParams,
    pub grid: TimeGrid,
    pub n_realizations: usize,
    pub levels: Vec<f64>,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Fig1Config {
            params: default_params(),
            grid: TimeGrid::with_step(FIG1_T_MAX, DEFAULT_DT).expect("valid grid"),
            n_realizations: DEFAULT_REPLICATES,
            levels: (1..=19).map(|k| 5.0 * k as f64).collect(),
        }
    }
}

impl Fig1Config {
    pub fn validate(&self) -> Result<()> {
        if self.n_realizations == 0 {
            return Err(Error::invalid("replicates", "must be >= 1"));
        }
        if self.levels.is_empty() {
            return Err(Error::invalid("levels", "at least one level is required"));
        }
        if self.levels.iter().any(|&l| !(l > 0.0 && l < 100.0)) {
            return Err(Error::invalid("levels", "each level must lie in (0, 100)"));
        }
        if self.levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("levels", "levels must be strictly increasing"));
        }
        Ok(())
    }
}

/// Percentiles of `x(t)` across realizations, plus the two reference
/// exponentials.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Output {
    pub times: Vec<f64>,
    pub levels: Vec<f64>,
    /// `percentiles[k][j]`: level `j` at grid point `k`.
    pub percentiles: Vec<Vec<f64>>,
    /// `x0 exp(mu t)`.
    pub ensemble_average: Vec<f64>,
    /// `x0 exp((mu - sigma^2/2) t)`.
    pub time_average: Vec<f64>,
}

pub fn run_fig1(cfg: &Fig1Config, seed: u64) -> Result<Fig1Output> {
    cfg.validate()?;
    let (params, grid) = (cfg.params, cfg.grid);
    let base = SeedSpec::new(seed).experiment(stream_ids::FIG1);
    let rows: Vec<Vec<f64>> = (0..cfg.n_realizations as u64)
        .into_par_iter()
        .map(|r| {
            let mut stream = derive_stream(&base.replicate(r));
            simulate_exact(&params, &sample_wiener(&grid, &mut stream))
                .values()
                .to_vec()
        })
        .collect();
    let percentiles = (0..grid.n_points())
        .into_par_iter()
        .map(|k| {
            let col = sorted_column(&rows, k);
            cfg.levels.iter().map(|&l| percentile_sorted(&col, l)).collect()
        })
        .collect();
    let times: Vec<f64> = grid.times().collect();
    let x0 = params.x0();
    Ok(Fig1Output {
        ensemble_average: times.iter().map(|t| x0 * (params.mu() * t).exp()).collect(),
        time_average: times
            .iter()
            .map(|t| x0 * (params.time_average_rate() * t).exp())
            .collect(),
        times,
        levels: cfg.levels.clone(),
        percentiles,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Config {
    pub params: GbmParams,
    pub grid: TimeGrid,
    pub sizes: Vec<u64>,
    pub replicates: usize,
    /// Lower and upper band percentiles around the median.
    pub band: [f64; 2],
}

impl Default for Fig2Config {
    fn default() -> Self {
        Fig2Config {
            params: default_params(),
            grid: TimeGrid::with_step(FIG2_T_MAX, DEFAULT_DT).expect("valid grid"),
            sizes: default_sizes(),
            replicates: DEFAULT_REPLICATES,
            band: [49.0, 51.0],
        }
    }
}

impl Fig2Config {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::invalid("nsizes", "at least one ensemble size is required"));
        }
        if self.sizes.iter().any(|&n| n == 0 || n > u32::MAX as u64) {
            return Err(Error::invalid("nsizes", "sizes must lie in 1..=2^32-1"));
        }
        let mut sorted = self.sizes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.sizes.len() {
            return Err(Error::invalid("nsizes", "sizes must be distinct"));
        }
        if self.replicates == 0 {
            return Err(Error::invalid("replicates", "must be >= 1"));
        }
        let [lo, hi] = self.band;
        if !(lo > 0.0 && lo < 50.0 && hi > 50.0 && hi < 100.0) {
            return Err(Error::invalid("band", "need 0 < low < 50 < high < 100"));
        }
        Ok(())
    }
}

/// Pointwise percentiles of `<x(t)>_N` across replicates for one `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeaPercentiles {
    pub n: u64,
    pub low: PeaSeries,
    pub median: PeaSeries,
    pub high: PeaSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Output {
    pub params: GbmParams,
    pub grid: TimeGrid,
    pub curves: Vec<PeaPercentiles>,
}

/// PEA trajectory of replicate `r` for ensemble size `n`.
fn replicate_pea(params: &GbmParams, grid: &TimeGrid, base: SeedSpec, n: u64, r: u64) -> Vec<f64> {
    let mut sum = vec![0.0; grid.n_points()];
    let spec = base.size_index(n as u32).replicate(r);
    for i in 0..n {
        accumulate_exact(params, grid, &mut derive_stream(&spec.trajectory(i)), &mut sum);
    }
    let nf = n as f64;
    for s in &mut sum {
        *s /= nf;
    }
    sum
}

pub fn run_fig2(cfg: &Fig2Config, seed: u64) -> Result<Fig2Output> {
    cfg.validate()?;
    let (params, grid) = (cfg.params, cfg.grid);
    let base = SeedSpec::new(seed).experiment(stream_ids::FIG2);
    let mut curves = Vec::with_capacity(cfg.sizes.len());
    for &n in &cfg.sizes {
        let rows: Vec<Vec<f64>> = (0..cfg.replicates as u64)
            .into_par_iter()
            .map(|r| replicate_pea(&params, &grid, base, n, r))
            .collect();
        let levels = [cfg.band[0], 50.0, cfg.band[1]];
        let per_time: Vec<[f64; 3]> = (0..grid.n_points())
            .into_par_iter()
            .map(|k| {
                let col = sorted_column(&rows, k);
                levels.map(|l| percentile_sorted(&col, l))
            })
            .collect();
        let series = |j: usize| PeaSeries::from_values(grid, per_time.iter().map(|p| p[j]).collect());
        curves.push(PeaPercentiles {
            n,
            low: series(0)?,
            median: series(1)?,
            high: series(2)?,
        });
    }
    Ok(Fig2Output {
        params,
        grid,
        curves,
    })
}

/// `tau = a + b ln N` with percentage residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    /// `(N, 100 (tau - fit) / fit)` for every input point.
    pub residuals: Vec<(u64, f64)>,
}

impl LogFit {
    pub fn predict(&self, n: u64) -> f64 {
        self.a + self.b * (n as f64).ln()
    }
}

pub fn fit_log(points: &[(u64, f64)]) -> Result<LogFit> {
    let x: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let y: Vec<f64> = points.iter().map(|&(_, tau)| tau).collect();
    let OlsLine { intercept, slope } = ols_line(&x, &y)?;
    let fit = LogFit {
        a: intercept,
        b: slope,
        residuals: Vec::new(),
    };
    let residuals = points
        .iter()
        .map(|&(n, tau)| {
            let pred = fit.predict(n);
            (n, 100.0 * (tau - pred) / pred)
        })
        .collect();
    Ok(LogFit { residuals, ..fit })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Config {
    pub fig2: Fig2Config,
    pub thresholds: Vec<f64>,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Fig3Config {
            fig2: Fig2Config::default(),
            thresholds: vec![0.1, 1.0],
        }
    }
}

impl Fig3Config {
    pub fn validate(&self) -> Result<()> {
        self.fig2.validate()?;
        if self.thresholds.is_empty() {
            return Err(Error::invalid("thresholds", "at least one threshold is required"));
        }
        if self.thresholds.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::invalid("thresholds", "thresholds must be finite and > 0"));
        }
        Ok(())
    }
}

/// Measured deviation times against the implicit-equation solution, with the
/// solution mapped onto the data by a least-squares affine fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeOverlay {
    pub sizes: Vec<u64>,
    pub measured: Vec<f64>,
    pub theory: Vec<f64>,
    pub scale: OlsLine,
    pub scaled: Vec<f64>,
    pub rank_correlation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdAnalysis {
    pub threshold: f64,
    pub fit: Option<LogFit>,
    /// Sizes whose median never crossed inside the grid.
    pub excluded: Vec<u64>,
    pub shape: Option<ShapeOverlay>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Output {
    pub curves: Fig2Output,
    pub records: Vec<DeviationRecord>,
    pub analyses: Vec<ThresholdAnalysis>,
    pub warnings: Vec<String>,
}

impl Fig3Output {
    pub fn analysis(&self, threshold: f64) -> Option<&ThresholdAnalysis> {
        self.analyses.iter().find(|a| a.threshold == threshold)
    }
}

fn shape_overlay(params: &GbmParams, threshold: f64, points: &[(u64, f64)]) -> Result<ShapeOverlay> {
    let theory = points
        .iter()
        .map(|&(n, _)| solve_tau(params, n, threshold).map(|s| s.tau))
        .collect::<Result<Vec<f64>>>()?;
    let measured: Vec<f64> = points.iter().map(|p| p.1).collect();
    let scale = ols_line(&theory, &measured)?;
    Ok(ShapeOverlay {
        sizes: points.iter().map(|p| p.0).collect(),
        scaled: theory.iter().map(|&t| scale.predict(t)).collect(),
        rank_correlation: spearman(&measured, &theory)?,
        measured,
        theory,
        scale,
    })
}

/// Deviation records and fits from already simulated median trajectories.
pub fn analyze_fig3(curves: Fig2Output, thresholds: &[f64]) -> Fig3Output {
    let params = curves.params;
    let mut records = Vec::new();
    let mut analyses = Vec::new();
    let mut warnings = Vec::new();
    for &threshold in thresholds {
        let mut points = Vec::new();
        let mut excluded = Vec::new();
        for c in &curves.curves {
            let crossing = |s: &PeaSeries| first_deviation_time(&deviation_series(s, &params), threshold);
            let rec = DeviationRecord::new(c.n, threshold, crossing(&c.median), crossing(&c.low), crossing(&c.high));
            match rec.tau {
                Some(tau) => points.push((c.n, tau)),
                None => {
                    excluded.push(c.n);
                    warnings.push(format!(
                        "N = {}: median never deviates by {threshold} within t <= {}; excluded from fit",
                        c.n,
                        curves.grid.t_max()
                    ));
                }
            }
            records.push(rec);
        }
        let fit = match fit_log(&points) {
            Ok(fit) => Some(fit),
            Err(e) => {
                warnings.push(format!("threshold {threshold}: no fit ({e})"));
                None
            }
        };
        let shape = match shape_overlay(&params, threshold, &points) {
            Ok(s) => Some(s),
            Err(e) => {
                warnings.push(format!("threshold {threshold}: no shape overlay ({e})"));
                None
            }
        };
        analyses.push(ThresholdAnalysis {
            threshold,
            fit,
            excluded,
            shape,
        });
    }
    Fig3Output {
        curves,
        records,
        analyses,
        warnings,
    }
}

pub fn run_fig3(cfg: &Fig3Config, seed: u64) -> Result<Fig3Output> {
    cfg.validate()?;
    let curves = run_fig2(&cfg.fig2, seed)?;
    Ok(analyze_fig3(curves, &cfg.thresholds))
}

/// First unity crossing of each median trajectory and the spacings between
/// consecutive sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingReport {
    pub first_crossings: Vec<(u64, Option<f64>)>,
    /// `(N_from, N_to, t_to - t_from)` between consecutive sizes that cross.
    pub spacings: Vec<(u64, u64, f64)>,
    pub excluded: Vec<u64>,
    /// `max / min` spacing is at most 2.
    pub approximately_constant: bool,
}

pub fn crossing_spacing_report(first_crossings: Vec<(u64, Option<f64>)>) -> CrossingReport {
    let mut present: Vec<(u64, f64)> = first_crossings
        .iter()
        .filter_map(|&(n, t)| t.map(|t| (n, t)))
        .collect();
    present.sort_by_key(|p| p.0);
    let excluded = first_crossings
        .iter()
        .filter(|(_, t)| t.is_none())
        .map(|&(n, _)| n)
        .collect();
    let spacings: Vec<(u64, u64, f64)> = present
        .windows(2)
        .map(|w| (w[0].0, w[1].0, w[1].1 - w[0].1))
        .collect();
    let (lo, hi) = spacings
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.2), hi.max(s.2)));
    CrossingReport {
        first_crossings,
        spacings: spacings.clone(),
        excluded,
        approximately_constant: !spacings.is_empty() && lo > 0.0 && hi / lo <= 2.0,
    }
}

pub fn fig2_crossing_report(fig2: &Fig2Output) -> CrossingReport {
    crossing_spacing_report(
        fig2.curves
            .iter()
            .map(|c| (c.n, unity_crossings(&c.median).first().copied()))
            .collect(),
    )
}

/// `<x(t)>_N` at a single time for `replicates` independent ensembles.
///
/// Uses a one-step grid; the exact sampler is exact in distribution, so no
/// intermediate points are needed.
pub fn pea_endpoints(params: &GbmParams, n: u64, t: f64, replicates: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 || n > u32::MAX as u64 {
        return Err(Error::invalid("N", "must lie in 1..=2^32-1"));
    }
    let grid = TimeGrid::new(t, 1)?;
    let base = SeedSpec::new(seed).experiment(stream_ids::ENDPOINTS);
    Ok((0..replicates as u64)
        .into_par_iter()
        .map(|r| replicate_pea(params, &grid, base, n, r)[1])
        .collect())
}

/// `g_est(t, N)` for `replicates` independent ensembles.
pub fn growth_rate_sample(params: &GbmParams, n: u64, t: f64, replicates: usize, seed: u64) -> Result<Vec<f64>> {
    Ok(pea_endpoints(params, n, t, replicates, seed)?
        .into_iter()
        .map(|x| x.ln() / t)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_fig2() -> Fig2Config {
        Fig2Config {
            grid: TimeGrid::with_step(20.0, 0.5).unwrap(),
            sizes: vec![1, 4, 16],
            replicates: 200,
            ..Default::default()
        }
    }

    #[test]
    fn defaults_match_reference_setup() {
        let f1 = Fig1Config::default();
        assert_eq!(f1.levels.len(), 19);
        assert_eq!((f1.levels[0], f1.levels[18]), (5.0, 95.0));
        assert_eq!(f1.n_realizations, 10_000);
        let f2 = Fig2Config::default();
        assert_eq!(f2.sizes.first(), Some(&1));
        assert_eq!(f2.sizes.last(), Some(&1024));
        assert_eq!(f2.grid.t_max(), 60.0);
        assert_eq!(Fig3Config::default().thresholds, vec![0.1, 1.0]);
    }

    #[test]
    fn config_validation() {
        let mut c = Fig1Config::default();
        c.levels = vec![10.0, 5.0];
        assert!(c.validate().is_err());
        c.levels = vec![0.0, 5.0];
        assert!(c.validate().is_err());
        let mut f = small_fig2();
        f.sizes = vec![2, 2];
        assert!(f.validate().is_err());
        f.sizes = vec![0];
        assert!(f.validate().is_err());
        let mut f3 = Fig3Config::default();
        f3.thresholds = vec![-1.0];
        assert!(f3.validate().is_err());
    }

    #[test]
    fn fig1_small_run() {
        let cfg = Fig1Config {
            grid: TimeGrid::with_step(10.0, 0.5).unwrap(),
            n_realizations: 500,
            ..Default::default()
        };
        let out = run_fig1(&cfg, 3).unwrap();
        assert!(out.percentiles[0].iter().all(|&v| v == 1.0));
        for row in &out.percentiles {
            assert!(row.windows(2).all(|w| w[0] <= w[1]));
        }
        assert_eq!(out.ensemble_average[0], 1.0);
        assert!((out.time_average.last().unwrap() - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn fig1_median_follows_time_average_rate() {
        let cfg = Fig1Config {
            grid: TimeGrid::new(100.0, 100).unwrap(),
            levels: vec![50.0],
            ..Default::default()
        };
        let out = run_fig1(&cfg, 101).unwrap();
        let t = 100.0;
        let g = out.percentiles.last().unwrap()[0].ln() / t;
        let tol = 3.0 * cfg.params.sigma() / (t * cfg.n_realizations as f64).sqrt();
        assert!((g + 0.05).abs() < tol, "g = {g}");
    }

    #[test]
    fn fig2_small_run() {
        let out = run_fig2(&small_fig2(), 9).unwrap();
        assert_eq!(out.curves.len(), 3);
        for c in &out.curves {
            assert_eq!(c.median.values()[0], 1.0);
            for k in 0..c.median.values().len() {
                assert!(c.low.values()[k] <= c.median.values()[k]);
                assert!(c.median.values()[k] <= c.high.values()[k]);
            }
        }
        let single = &out.curves[0].median;
        assert!(*single.values().last().unwrap() < 1.0);
    }

    #[test]
    fn fig2_independent_of_worker_count() {
        let cfg = small_fig2();
        let a = with_workers(1, || run_fig2(&cfg, 5)).unwrap().unwrap();
        let b = with_workers(4, || run_fig2(&cfg, 5)).unwrap().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fig2_curve_does_not_depend_on_ladder() {
        let cfg = small_fig2();
        let full = run_fig2(&cfg, 5).unwrap();
        let only = run_fig2(&Fig2Config { sizes: vec![16], ..cfg }, 5).unwrap();
        assert_eq!(full.curves[2], only.curves[0]);
    }

    #[test]
    fn fit_log_examples() {
        let pts: Vec<(u64, f64)> = [1u64, 2, 8, 64]
            .iter()
            .map(|&n| (n, 2.0 + 3.0 * (n as f64).ln()))
            .collect();
        let fit = fit_log(&pts).unwrap();
        assert!((fit.a - 2.0).abs() < 1e-12 && (fit.b - 3.0).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|r| r.1.abs() < 1e-10));

        let mut doubled = pts.clone();
        doubled.extend_from_slice(&pts[1..3]);
        let fit2 = fit_log(&doubled).unwrap();
        assert!((fit2.a - 2.0).abs() < 1e-12 && (fit2.b - 3.0).abs() < 1e-12);

        assert_eq!(fit_log(&[(4, 1.0)]), Err(Error::Underdetermined(1)));
        assert_eq!(fit_log(&[(4, 1.0), (4, 2.0)]), Err(Error::Underdetermined(1)));
    }

    #[test]
    fn fit_log_residual_percentages() {
        let fit = fit_log(&[(1, 10.0), (2, 12.0), (4, 13.0)]).unwrap();
        for &(n, d) in &fit.residuals {
            let tau = [(1, 10.0), (2, 12.0), (4, 13.0)].iter().find(|p| p.0 == n).unwrap().1;
            assert!((d - 100.0 * (tau - fit.predict(n)) / fit.predict(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn crossing_report_examples() {
        let geometric: Vec<(u64, Option<f64>)> =
            (1..=6).map(|k| (1u64 << k, Some(4.0 * ((1u64 << k) as f64).ln()))).collect();
        let r = crossing_spacing_report(geometric);
        let first = r.spacings[0].2;
        assert!(r.spacings.iter().all(|s| (s.2 - first).abs() < 1e-12));
        assert!((first - 4.0 * 2f64.ln()).abs() < 1e-12);
        assert!(r.approximately_constant);

        let r = crossing_spacing_report(vec![(1, None), (2, Some(3.0)), (4, Some(5.0)), (8, Some(11.0))]);
        assert_eq!(r.excluded, vec![1]);
        assert_eq!(r.spacings.len(), 2);
        assert!(!r.approximately_constant);
    }

    #[test]
    fn fig3_on_synthetic_curves() {
        // Median curves built so that |eps| = 1 exactly at tau_N = 2 + 3 ln N.
        let params = default_params();
        let grid = TimeGrid::new(40.0, 4000).unwrap();
        let curves = [1u64, 2, 4, 8, 16]
            .iter()
            .map(|&n| {
                let tau = 2.0 + 3.0 * (n as f64).ln();
                let s = PeaSeries::from_values(
                    grid,
                    grid.times().map(|t| (0.05 * t).exp() - t / tau).collect(),
                )
                .unwrap();
                PeaPercentiles {
                    n,
                    low: s.clone(),
                    median: s.clone(),
                    high: s,
                }
            })
            .collect();
        let out = analyze_fig3(Fig2Output { params, grid, curves }, &[1.0]);
        let fit = out.analysis(1.0).unwrap().fit.as_ref().unwrap();
        assert!((fit.a - 2.0).abs() < 1e-9 && (fit.b - 3.0).abs() < 1e-9, "{fit:?}");
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn endpoint_samplers() {
        let p = default_params();
        let x = pea_endpoints(&p, 3, 2.0, 10, 1).unwrap();
        assert_eq!(x.len(), 10);
        let g = growth_rate_sample(&p, 3, 2.0, 10, 1).unwrap();
        for (xi, gi) in x.iter().zip(&g) {
            assert_eq!(xi.ln() / 2.0, *gi);
        }
        assert!(pea_endpoints(&p, 0, 1.0, 1, 1).is_err());
    }
}
