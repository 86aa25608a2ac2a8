//! Partial ensemble averages and the quantities measured on them.

use crate::error::{Error, Result};
use crate::stochastic::{GbmParams, TimeGrid, Trajectory};

/// `N` trajectories on a common grid.
#[derive(Debug, Clone)]
pub struct EnsembleRun {
    params: GbmParams,
    grid: TimeGrid,
    trajectories: Vec<Trajectory>,
}

impl EnsembleRun {
    pub fn new(params: GbmParams, trajectories: Vec<Trajectory>) -> Result<Self> {
        let first = trajectories
            .first()
            .ok_or_else(|| Error::invalid("N", "an ensemble needs at least one trajectory"))?;
        let grid = *first.grid();
        if trajectories.iter().any(|t| *t.grid() != grid) {
            return Err(Error::invalid("trajectories", "all trajectories must share one grid"));
        }
        Ok(EnsembleRun {
            params,
            grid,
            trajectories,
        })
    }

    pub fn params(&self) -> &GbmParams {
        &self.params
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn size(&self) -> usize {
        self.trajectories.len()
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }
}

/// One PEA trajectory `<x(t)>_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeaSeries {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl PeaSeries {
    pub fn from_values(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: grid.n_points(),
            });
        }
        Ok(PeaSeries { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The common initial value.
    pub fn x0(&self) -> f64 {
        self.values[0]
    }
}

pub fn pea(run: &EnsembleRun) -> PeaSeries {
    let n = run.size() as f64;
    let mut sum = vec![0.0; run.grid.n_points()];
    for traj in &run.trajectories {
        for (s, x) in sum.iter_mut().zip(traj.values()) {
            *s += x;
        }
    }
    for s in &mut sum {
        *s /= n;
    }
    PeaSeries {
        grid: run.grid,
        values: sum,
    }
}

/// `g_est(t) = ln(pea(t)) / t` on the grid points with `t > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRateSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn growth_rate(pea: &PeaSeries) -> Result<GrowthRateSeries> {
    let n = pea.grid.n_steps();
    let mut times = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for (k, &v) in pea.values.iter().enumerate().skip(1) {
        let t = pea.grid.time(k);
        if !(v > 0.0) {
            return Err(Error::NonPositivePea {
                index: k,
                time: t,
                value: v,
            });
        }
        times.push(t);
        values.push(v.ln() / t);
    }
    Ok(GrowthRateSeries { times, values })
}

/// `eps(t) = pea(t) - x0 exp(mu t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationSeries {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl DeviationSeries {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn deviation_series(pea: &PeaSeries, params: &GbmParams) -> DeviationSeries {
    let values = pea
        .values
        .iter()
        .enumerate()
        .map(|(k, &v)| v - params.x0() * (params.mu() * pea.grid.time(k)).exp())
        .collect();
    DeviationSeries {
        grid: pea.grid,
        values,
    }
}

fn interpolate_crossing(t0: f64, t1: f64, y0: f64, y1: f64, level: f64) -> f64 {
    t0 + (level - y0) / (y1 - y0) * (t1 - t0)
}

/// First time `|eps(t)| >= threshold`, linearly interpolated on `|eps|`
/// between the bracketing grid points; `None` if the grid never gets there.
pub fn first_deviation_time(eps: &DeviationSeries, threshold: f64) -> Option<f64> {
    assert!(threshold > 0.0, "threshold must be positive, got {threshold}");
    let abs: Vec<f64> = eps.values.iter().map(|e| e.abs()).collect();
    let k = abs.iter().position(|&a| a >= threshold)?;
    let t1 = eps.grid.time(k);
    if k == 0 || abs[k] == threshold {
        return Some(t1);
    }
    Some(interpolate_crossing(
        eps.grid.time(k - 1),
        t1,
        abs[k - 1],
        abs[k],
        threshold,
    ))
}

/// Times `t > 0` at which the PEA crosses its initial value.
///
/// Sign changes of `pea - x0` between neighbouring grid points are linearly
/// interpolated. A run of grid points exactly equal to `x0` counts as one
/// crossing at its first point, whether the series passes through or only
/// touches.
pub fn unity_crossings(pea: &PeaSeries) -> Vec<f64> {
    let x0 = pea.x0();
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    let mut in_tie = false;
    for (k, &v) in pea.values.iter().enumerate().skip(1) {
        let t = pea.grid.time(k);
        let d = v - x0;
        if d == 0.0 {
            if !in_tie {
                out.push(t);
                in_tie = true;
            }
            continue;
        }
        if let Some((tp, dp)) = prev {
            if !in_tie && dp.signum() != d.signum() {
                out.push(interpolate_crossing(tp, t, dp, d, 0.0));
            }
        }
        in_tie = false;
        prev = Some((t, d));
    }
    out
}

/// Deviation time of the median PEA for one `N` and threshold, with the
/// crossing times of the band trajectories (49th / 51st percentile).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationRecord {
    pub n: u64,
    pub threshold: f64,
    pub tau: Option<f64>,
    pub band_low: Option<f64>,
    pub band_high: Option<f64>,
}

impl DeviationRecord {
    /// Orders the two band crossings so that `band_low <= band_high`.
    pub fn new(n: u64, threshold: f64, tau: Option<f64>, band_a: Option<f64>, band_b: Option<f64>) -> Self {
        let (band_low, band_high) = match (band_a, band_b) {
            (Some(a), Some(b)) => (Some(a.min(b)), Some(a.max(b))),
            other => other,
        };
        DeviationRecord {
            n,
            threshold,
            tau,
            band_low,
            band_high,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{derive_stream, sample_wiener, simulate_exact, SeedSpec, WienerPath};
    use proptest::prelude::*;

    fn grid(n: usize) -> TimeGrid {
        TimeGrid::new(n as f64, n).unwrap()
    }

    fn series(values: &[f64]) -> PeaSeries {
        PeaSeries::from_values(grid(values.len() - 1), values.to_vec()).unwrap()
    }

    fn constant(g: TimeGrid, v: f64) -> Trajectory {
        Trajectory::from_values(g, vec![v; g.n_points()]).unwrap()
    }

    fn params() -> GbmParams {
        GbmParams::from_variance(0.05, 0.2, 1.0).unwrap()
    }

    #[test]
    fn pea_examples() {
        let g = grid(4);
        let run = EnsembleRun::new(params(), vec![constant(g, 2.0), constant(g, 4.0)]).unwrap();
        assert_eq!(pea(&run).values(), &[3.0; 5]);

        let single = Trajectory::from_values(g, vec![1.0, 1.5, 0.5, 2.0, 3.0]).unwrap();
        let run = EnsembleRun::new(params(), vec![single.clone()]).unwrap();
        assert_eq!(pea(&run).values(), single.values());

        assert!(EnsembleRun::new(params(), vec![]).is_err());
        let other = constant(grid(3), 1.0);
        assert!(EnsembleRun::new(params(), vec![constant(g, 1.0), other]).is_err());
    }

    #[test]
    fn growth_rate_examples() {
        let g = TimeGrid::new(10.0, 10).unwrap();
        let p = PeaSeries::from_values(g, g.times().map(|t| (0.1 * t).exp()).collect()).unwrap();
        let r = growth_rate(&p).unwrap();
        assert_eq!(r.times.len(), 10);
        assert!(r.values.iter().all(|v| (v - 0.1).abs() < 1e-14));

        let r = growth_rate(&series(&[1.0; 5])).unwrap();
        assert!(r.values.iter().all(|&v| v == 0.0));

        let r = growth_rate(&series(&[2.0; 5])).unwrap();
        assert!((r.values[3] - 0.173_286_795_139_986_3).abs() < 1e-15);

        let err = growth_rate(&series(&[1.0, 0.5, -0.1, 0.2])).unwrap_err();
        assert!(matches!(err, Error::NonPositivePea { index: 2, .. }));
    }

    #[test]
    fn deviation_examples() {
        let p = params();
        let g = TimeGrid::new(10.0, 20).unwrap();
        let pe = PeaSeries::from_values(g, g.times().map(|t| (0.05 * t).exp()).collect()).unwrap();
        assert!(deviation_series(&pe, &p).values().iter().all(|e| e.abs() < 1e-15));

        let p0 = GbmParams::new(0.0, 0.3, 1.0).unwrap();
        let pe = PeaSeries::from_values(g, g.times().map(|t| 1.0 + 0.1 * t).collect()).unwrap();
        let eps = deviation_series(&pe, &p0);
        assert_eq!(eps.values()[0], 0.0);
        for (k, e) in eps.values().iter().enumerate() {
            assert!((e - 0.1 * g.time(k)).abs() < 1e-14);
        }
    }

    #[test]
    fn first_deviation_interpolates() {
        let eps = DeviationSeries {
            grid: grid(3),
            values: vec![0.0, 0.08, -0.12, 0.5],
        };
        assert!((first_deviation_time(&eps, 0.1).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(first_deviation_time(&eps, 0.12), Some(2.0));
        assert_eq!(first_deviation_time(&eps, 1.0), None);
    }

    #[test]
    fn unity_crossing_examples() {
        let c = unity_crossings(&series(&[1.0, 1.1, 0.9]));
        assert_eq!(c.len(), 1);
        assert!((c[0] - 1.5).abs() < 1e-12);

        assert!(unity_crossings(&series(&[1.0, 1.1, 1.2, 1.5])).is_empty());

        // Through a grid point.
        assert_eq!(unity_crossings(&series(&[1.0, 1.2, 1.0, 0.8])), vec![2.0]);
        // Touch from above, and a flat run.
        assert_eq!(unity_crossings(&series(&[1.0, 1.2, 1.0, 1.3])), vec![2.0]);
        assert_eq!(unity_crossings(&series(&[1.0, 1.2, 1.0, 1.0, 0.7])), vec![2.0]);
    }

    #[test]
    fn single_member_growth_rate_is_exact_algebra() {
        let p = params();
        let g = TimeGrid::new(50.0, 500).unwrap();
        for r in 0..20 {
            let path = sample_wiener(&g, &mut derive_stream(&SeedSpec::new(31).replicate(r)));
            let run = EnsembleRun::new(p, vec![simulate_exact(&p, &path)]).unwrap();
            let rates = growth_rate(&pea(&run)).unwrap();
            for (k, (&t, &gv)) in rates.times.iter().zip(&rates.values).enumerate() {
                let expected = p.time_average_rate() + p.sigma() * path.values()[k + 1] / t;
                let scale = expected.abs().max(p.sigma() / t);
                assert!((gv - expected).abs() <= 1e-12 * scale, "t={t}: {gv} vs {expected}");
            }
        }
    }

    fn random_run(seed: u64, n: u64) -> (EnsembleRun, Vec<WienerPath>) {
        let p = params();
        let g = TimeGrid::new(20.0, 40).unwrap();
        let paths: Vec<WienerPath> = (0..n)
            .map(|i| sample_wiener(&g, &mut derive_stream(&SeedSpec::new(seed).trajectory(i))))
            .collect();
        let trajs = paths.iter().map(|w| simulate_exact(&p, w)).collect();
        (EnsembleRun::new(p, trajs).unwrap(), paths)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pea_is_permutation_invariant(seed in any::<u64>(), n in 1u64..12, rot in 0usize..12) {
            let (run, _) = random_run(seed, n);
            let mut trajs = run.trajectories().to_vec();
            let len = trajs.len();
            trajs.rotate_left(rot % len);
            trajs.reverse();
            let permuted = EnsembleRun::new(*run.params(), trajs).unwrap();
            for (a, b) in pea(&run).values().iter().zip(pea(&permuted).values()) {
                prop_assert!((a - b).abs() <= 1e-12 * a.abs());
            }
        }

        #[test]
        fn growth_rate_sandwich(seed in any::<u64>(), n in 1u64..20) {
            let (run, paths) = random_run(seed, n);
            let p = *run.params();
            let rates = growth_rate(&pea(&run)).unwrap();
            for (j, (&t, &gv)) in rates.times.iter().zip(&rates.values).enumerate() {
                let k = j + 1;
                let lower = run.trajectories().iter().map(|x| x.values()[k].ln() / t).fold(f64::INFINITY, f64::min);
                let wmax = paths.iter().map(|w| w.values()[k]).fold(f64::NEG_INFINITY, f64::max);
                let upper = p.time_average_rate() + p.sigma() * wmax / t;
                let tol = 1e-12 * (1.0 + gv.abs());
                prop_assert!(lower <= gv + tol && gv <= upper + tol);
            }
            prop_assert_eq!(deviation_series(&pea(&run), &p).values()[0], 0.0);
        }

        #[test]
        fn deviation_time_is_monotone_in_threshold(seed in any::<u64>(), n in 1u64..8) {
            let (run, _) = random_run(seed, n);
            let eps = deviation_series(&pea(&run), run.params());
            if let (Some(a), Some(b)) = (first_deviation_time(&eps, 0.1), first_deviation_time(&eps, 1.0)) {
                prop_assert!(a <= b);
                prop_assert!(a > 0.0);
            }
        }
    }
}
