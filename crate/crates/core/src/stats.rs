//! Small numerical toolbox shared by the analysis and experiment code.

use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Linear-interpolation quantile of an already sorted, non-empty slice.
///
/// Position `p = (level / 100) (n - 1)` (zero based), interpolated between
/// the neighbouring order statistics.
pub fn percentile_sorted(sorted: &[f64], level: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let n = sorted.len();
    let pos = (level / 100.0).clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

pub fn percentile(sample: &[f64], level: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(level > 0.0 && level < 100.0) {
        return Err(Error::invalid("level", format!("must lie in (0, 100), got {level}")));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(percentile_sorted(&sorted, level))
}

/// Standard normal CDF, `Phi(z) = erfc(-z / sqrt 2) / 2`.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Upper tail `1 - Phi(z)`, accurate deep into the tail.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

pub fn normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

pub fn mean(sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(sample.iter().sum::<f64>() / sample.len() as f64)
}

/// Unbiased sample standard deviation; zero for a single value.
pub fn std_dev(sample: &[f64]) -> Result<f64> {
    let m = mean(sample)?;
    if sample.len() < 2 {
        return Ok(0.0);
    }
    let ss: f64 = sample.iter().map(|x| (x - m) * (x - m)).sum();
    Ok((ss / (sample.len() - 1) as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsLine {
    pub intercept: f64,
    pub slope: f64,
}

impl OlsLine {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Ordinary least squares fit of `y = intercept + slope * x`.
pub fn ols_line(x: &[f64], y: &[f64]) -> Result<OlsLine> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let distinct = count_distinct(x);
    if distinct < 2 {
        return Err(Error::Underdetermined(distinct));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = sxy / sxx;
    Ok(OlsLine {
        intercept: my - slope * mx,
        slope,
    })
}

fn count_distinct(x: &[f64]) -> usize {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// Kolmogorov-Smirnov distance `sup |F_n - F|` between the empirical CDF of
/// `sample` and `cdf`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    Ok(d)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

/// Ranks starting at 1, ties sharing their average rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Underdetermined(x.len()));
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let m = (x.len() as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - m) * (b - m);
        sxx += (a - m) * (a - m);
        syy += (b - m) * (b - m);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::invalid("sample", "constant input has no rank correlation"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}
