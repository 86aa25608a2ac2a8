//! Configuration, experiment dispatch and CSV output for the `ergo` binary.

mod config;
mod table;

pub use config::{parse_config, ConfigError, Experiment, RunConfig};
pub use table::{emit_csv, Cell, Table};

use std::fs;
use std::path::PathBuf;

use crate::error::Result;
use crate::experiments::{
    self, fig2_crossing_report, Fig1Config, Fig1Output, Fig2Config, Fig2Output, Fig3Config,
    Fig3Output,
};
use crate::pea::{deviation_series, growth_rate, pea, EnsembleRun};
use crate::stochastic::{derive_stream, sample_wiener, simulate_exact, SeedSpec};
use crate::theory;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Named tables produced by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub files: Vec<(String, Table)>,
    pub warnings: Vec<String>,
}

pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    experiments::with_workers(cfg.workers, || execute_in_pool(cfg))?
}

fn execute_in_pool(cfg: &RunConfig) -> Result<RunOutput> {
    let comment = cfg.provenance();
    let mut warnings = Vec::new();
    let files = match cfg.experiment {
        Experiment::Fig1 => {
            let fig1 = Fig1Config {
                params: cfg.params,
                grid: cfg.grid,
                n_realizations: cfg.replicates,
                ..Default::default()
            };
            fig1_tables(&experiments::run_fig1(&fig1, cfg.seed)?, &comment)
        }
        Experiment::Fig2 => fig2_tables(&experiments::run_fig2(&cfg.fig2_config(), cfg.seed)?, &comment),
        Experiment::Fig3 => {
            let fig3 = Fig3Config {
                fig2: cfg.fig2_config(),
                thresholds: cfg.thresholds.clone(),
            };
            let out = experiments::run_fig3(&fig3, cfg.seed)?;
            warnings.extend(out.warnings.iter().cloned());
            fig3_tables(&out, &comment)
        }
        Experiment::Theory => vec![("theory.csv".to_string(), theory_table(cfg, &comment)?)],
        Experiment::Simulate => vec![("simulate.csv".to_string(), simulate_table(cfg, &comment)?)],
    };
    Ok(RunOutput { files, warnings })
}

/// Writes every table into `dir`, creating it if needed.
pub fn write_outputs(dir: &std::path::Path, out: &RunOutput) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    out.files
        .iter()
        .map(|(name, table)| {
            let path = dir.join(name);
            emit_csv(table, &path)?;
            Ok(path)
        })
        .collect()
}

fn real(v: f64) -> Cell {
    Cell::Real(v)
}

fn opt(v: Option<f64>) -> Cell {
    v.map_or(Cell::Empty, Cell::Real)
}

pub fn fig1_tables(out: &Fig1Output, comment: &str) -> Vec<(String, Table)> {
    let mut main = Table::new(comment, &["t", "level", "value"]);
    for (k, &t) in out.times.iter().enumerate() {
        for (j, &level) in out.levels.iter().enumerate() {
            main.push(vec![real(t), real(level), real(out.percentiles[k][j])]);
        }
    }
    let mut reference = Table::new(comment, &["t", "ensemble_average", "time_average"]);
    for (k, &t) in out.times.iter().enumerate() {
        reference.push(vec![real(t), real(out.ensemble_average[k]), real(out.time_average[k])]);
    }
    vec![
        ("fig1.csv".to_string(), main),
        ("fig1_reference.csv".to_string(), reference),
    ]
}

pub fn fig2_tables(out: &Fig2Output, comment: &str) -> Vec<(String, Table)> {
    let mut main = Table::new(comment, &["N", "t", "pct49", "median", "pct51"]);
    for c in &out.curves {
        for (k, t) in out.grid.times().enumerate() {
            main.push(vec![
                Cell::Int(c.n),
                real(t),
                real(c.low.values()[k]),
                real(c.median.values()[k]),
                real(c.high.values()[k]),
            ]);
        }
    }
    let report = fig2_crossing_report(out);
    let mut crossings = Table::new(comment, &["N", "first_crossing", "spacing"]);
    for &(n, t) in &report.first_crossings {
        let spacing = report.spacings.iter().find(|s| s.1 == n).map(|s| s.2);
        crossings.push(vec![Cell::Int(n), opt(t), opt(spacing)]);
    }
    vec![
        ("fig2.csv".to_string(), main),
        ("fig2_crossings.csv".to_string(), crossings),
    ]
}

pub fn fig3_tables(out: &Fig3Output, comment: &str) -> Vec<(String, Table)> {
    let mut main = Table::new(comment, &["N", "threshold", "tau", "band_low", "band_high"]);
    for r in &out.records {
        main.push(vec![
            Cell::Int(r.n),
            real(r.threshold),
            opt(r.tau),
            opt(r.band_low),
            opt(r.band_high),
        ]);
    }
    let mut fits = Table::new(comment, &["threshold", "a", "b"]);
    let mut residuals = Table::new(comment, &["threshold", "N", "delta_percent"]);
    let mut shape = Table::new(
        comment,
        &["threshold", "N", "tau_measured", "tau_theory", "tau_theory_scaled"],
    );
    for a in &out.analyses {
        if let Some(fit) = &a.fit {
            fits.push(vec![real(a.threshold), real(fit.a), real(fit.b)]);
            for &(n, d) in &fit.residuals {
                residuals.push(vec![real(a.threshold), Cell::Int(n), real(d)]);
            }
        }
        if let Some(s) = &a.shape {
            for i in 0..s.sizes.len() {
                shape.push(vec![
                    real(a.threshold),
                    Cell::Int(s.sizes[i]),
                    real(s.measured[i]),
                    real(s.theory[i]),
                    real(s.scaled[i]),
                ]);
            }
        }
    }
    vec![
        ("fig3.csv".to_string(), main),
        ("fig3_fit.csv".to_string(), fits),
        ("fig3_residuals.csv".to_string(), residuals),
        ("fig3_shape.csv".to_string(), shape),
    ]
}

fn theory_table(cfg: &RunConfig, comment: &str) -> Result<Table> {
    let p = &cfg.params;
    let t = cfg.grid.t_max();
    let mut table = Table::new(comment, &["query", "N", "t", "epsilon", "value"]);
    let text = |s: &str| Cell::Text(s.to_string());
    table.push(vec![
        text("time_average_growth"),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        real(theory::time_average_growth(p)),
    ]);
    table.push(vec![
        text("ensemble_average_growth"),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        real(theory::ensemble_average_growth(p)),
    ]);
    if p.sigma() > 0.0 {
        table.push(vec![
            text("g_est_density_at_mean"),
            Cell::Empty,
            real(t),
            Cell::Empty,
            real(theory::g_est_density(p, t, p.time_average_rate())?),
        ]);
    }
    for &n in &cfg.sizes {
        table.push(vec![
            text("deviation_scale"),
            Cell::Int(n),
            real(t),
            Cell::Empty,
            real(theory::deviation_scale(p, n, t)),
        ]);
        for &eps in &cfg.thresholds {
            if p.sigma() > 0.0 {
                table.push(vec![
                    text("extreme_exceedance_probability"),
                    Cell::Int(n),
                    real(t),
                    real(eps),
                    real(theory::extreme_exceedance_probability(p, n, t, eps)?),
                ]);
            }
            if p.sigma() > 0.0 && p.mu() > 0.0 {
                table.push(vec![
                    text("solve_tau"),
                    Cell::Int(n),
                    Cell::Empty,
                    real(eps),
                    real(theory::solve_tau(p, n, eps)?.tau),
                ]);
            }
        }
    }
    Ok(table)
}

fn simulate_table(cfg: &RunConfig, comment: &str) -> Result<Table> {
    let mut table = Table::new(comment, &["N", "t", "pea", "growth_rate", "deviation"]);
    let base = SeedSpec::new(cfg.seed).experiment(experiments::stream_ids::SIMULATE);
    for &n in &cfg.sizes {
        let spec = base.size_index(n as u32);
        let trajectories = (0..n)
            .map(|i| {
                let mut stream = derive_stream(&spec.trajectory(i));
                simulate_exact(&cfg.params, &sample_wiener(&cfg.grid, &mut stream))
            })
            .collect();
        let run = EnsembleRun::new(cfg.params, trajectories)?;
        let series = pea(&run);
        let rates = growth_rate(&series)?;
        let eps = deviation_series(&series, &cfg.params);
        for (k, t) in cfg.grid.times().enumerate() {
            let g = if k == 0 { Cell::Empty } else { real(rates.values[k - 1]) };
            table.push(vec![
                Cell::Int(n),
                real(t),
                real(series.values()[k]),
                g,
                real(eps.values()[k]),
            ]);
        }
    }
    Ok(table)
}

impl RunConfig {
    fn fig2_config(&self) -> Fig2Config {
        Fig2Config {
            params: self.params,
            grid: self.grid,
            sizes: self.sizes.clone(),
            replicates: self.replicates,
            ..Default::default()
        }
    }
}
