use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Parser;
use thiserror::Error;

use crate::error::Error;
use crate::experiments::{self, DEFAULT_DT, FIG1_T_MAX, FIG2_T_MAX, DEFAULT_REPLICATES};
use crate::stochastic::{GbmParams, TimeGrid};

pub const DEFAULT_SEED: u64 = 20_130_101;
pub const SEED_ENV: &str = "ERGO_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Fig1,
    Fig2,
    Fig3,
    Theory,
    Simulate,
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig1" => Ok(Experiment::Fig1),
            "fig2" => Ok(Experiment::Fig2),
            "fig3" => Ok(Experiment::Fig3),
            "theory" => Ok(Experiment::Theory),
            "simulate" => Ok(Experiment::Simulate),
            other => Err(format!(
                "unknown experiment `{other}` (expected fig1, fig2, fig3, theory or simulate)"
            )),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Theory => "theory",
            Experiment::Simulate => "simulate",
        })
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Cli(#[from] clap::Error),
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    File {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
}

impl ConfigError {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// Name of the offending field, for validation failures.
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Invalid { field, .. } => Some(field),
            _ => None,
        }
    }
}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { name, reason } => ConfigError::invalid(name, reason),
            Error::ZeroSteps => ConfigError::invalid("dt", "grid has zero steps"),
            other => ConfigError::invalid("config", other.to_string()),
        }
    }
}

/// Monte Carlo experiments on geometric Brownian motion.
#[derive(Debug, Parser)]
#[command(name = "ergo", version)]
struct Flags {
    /// fig1 | fig2 | fig3 | theory | simulate
    #[arg(long)]
    experiment: Option<String>,
    /// Drift.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Noise variance sigma^2.
    #[arg(long, allow_hyphen_values = true)]
    sigma2: Option<String>,
    /// Initial value x(0).
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Time horizon.
    #[arg(long, allow_hyphen_values = true)]
    tmax: Option<String>,
    /// Time step.
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
    /// Comma-separated ensemble sizes N.
    #[arg(long, allow_hyphen_values = true)]
    nsizes: Option<String>,
    /// Realizations (fig1) or replicate ensembles per N (fig2, fig3).
    #[arg(long, allow_hyphen_values = true)]
    replicates: Option<String>,
    /// Comma-separated deviation thresholds.
    #[arg(long, allow_hyphen_values = true)]
    thresholds: Option<String>,
    /// Master seed; falls back to $ERGO_SEED.
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads (does not affect results).
    #[arg(long, allow_hyphen_values = true)]
    workers: Option<String>,
    /// Flat `key = value` config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

const KEYS: [&str; 12] = [
    "experiment",
    "mu",
    "sigma2",
    "x0",
    "tmax",
    "dt",
    "nsizes",
    "replicates",
    "thresholds",
    "seed",
    "out",
    "workers",
];

impl Flags {
    fn get(&self, key: &str) -> Option<&String> {
        match key {
            "experiment" => self.experiment.as_ref(),
            "mu" => self.mu.as_ref(),
            "sigma2" => self.sigma2.as_ref(),
            "x0" => self.x0.as_ref(),
            "tmax" => self.tmax.as_ref(),
            "dt" => self.dt.as_ref(),
            "nsizes" => self.nsizes.as_ref(),
            "replicates" => self.replicates.as_ref(),
            "thresholds" => self.thresholds.as_ref(),
            "seed" => self.seed.as_ref(),
            "out" => self.out.as_ref(),
            "workers" => self.workers.as_ref(),
            _ => None,
        }
    }
}

fn read_config_file(path: &PathBuf) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.clone(),
        source,
    })?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let file_err = |message: String| ConfigError::File {
            path: path.clone(),
            line: i + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| file_err(format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(file_err(format!("unknown key `{key}`")));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: FromStr>(field: &str, raw: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    raw.parse()
        .map_err(|e| ConfigError::invalid(field, format!("cannot parse `{raw}`: {e}")))
}

fn parse_list<T: FromStr>(field: &str, raw: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    let items = raw
        .split(',')
        .map(|s| parse_value(field, s.trim()))
        .collect::<Result<Vec<T>, _>>()?;
    if items.is_empty() {
        return Err(ConfigError::invalid(field, "list is empty"));
    }
    Ok(items)
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub params: GbmParams,
    pub grid: TimeGrid,
    pub sizes: Vec<u64>,
    pub replicates: usize,
    pub thresholds: Vec<f64>,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: usize,
}

impl RunConfig {
    /// One-line record of everything that determines the output (not the
    /// output directory or worker count).
    pub fn provenance(&self) -> String {
        let list = |v: Vec<String>| v.join(",");
        format!(
            "ergo experiment={} mu={:?} sigma2={:?} x0={:?} tmax={:?} dt={:?} nsizes={} replicates={} thresholds={} seed={}",
            self.experiment,
            self.params.mu(),
            self.params.sigma2(),
            self.params.x0(),
            self.grid.t_max(),
            self.grid.dt(),
            list(self.sizes.iter().map(|n| n.to_string()).collect()),
            self.replicates,
            list(self.thresholds.iter().map(|t| format!("{t:?}")).collect()),
            self.seed,
        )
    }
}

/// Parses command-line arguments (including the program name) into a
/// [`RunConfig`]. Precedence: flags, then the config file, then defaults;
/// the seed additionally falls back to `env_seed` before its default.
pub fn parse_config<I, S>(args: I, env_seed: Option<String>) -> Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let flags = Flags::try_parse_from(args)?;
    let file = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let lookup = |key: &str| flags.get(key).or_else(|| file.get(key)).cloned();

    let experiment: Experiment = match lookup("experiment") {
        Some(raw) => parse_value("experiment", &raw)?,
        None => Experiment::Fig1,
    };
    let mu: f64 = lookup("mu").map_or(Ok(0.05), |r| parse_value("mu", &r))?;
    let sigma2: f64 = lookup("sigma2").map_or(Ok(0.2), |r| parse_value("sigma2", &r))?;
    let x0: f64 = lookup("x0").map_or(Ok(1.0), |r| parse_value("x0", &r))?;
    let params = GbmParams::from_variance(mu, sigma2, x0)?;

    let default_tmax = match experiment {
        Experiment::Fig2 | Experiment::Fig3 => FIG2_T_MAX,
        _ => FIG1_T_MAX,
    };
    let tmax: f64 = lookup("tmax").map_or(Ok(default_tmax), |r| parse_value("tmax", &r))?;
    let dt: f64 = lookup("dt").map_or(Ok(DEFAULT_DT), |r| parse_value("dt", &r))?;
    let grid = TimeGrid::with_step(tmax, dt)?;

    let sizes: Vec<u64> = match lookup("nsizes") {
        Some(raw) => parse_list("nsizes", &raw)?,
        None if experiment == Experiment::Simulate => vec![1, 16, 256],
        None => experiments::default_sizes(),
    };
    if sizes.iter().any(|&n| n == 0 || n > u32::MAX as u64) {
        return Err(ConfigError::invalid("nsizes", "sizes must lie in 1..=4294967295"));
    }
    let replicates: usize =
        lookup("replicates").map_or(Ok(DEFAULT_REPLICATES), |r| parse_value("replicates", &r))?;
    if replicates == 0 {
        return Err(ConfigError::invalid("replicates", "must be >= 1"));
    }
    let thresholds: Vec<f64> = match lookup("thresholds") {
        Some(raw) => parse_list("thresholds", &raw)?,
        None => vec![0.1, 1.0],
    };
    if thresholds.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(ConfigError::invalid("thresholds", "thresholds must be finite and > 0"));
    }

    let seed: u64 = match lookup("seed") {
        Some(raw) => parse_value("seed", &raw)?,
        None => match env_seed {
            Some(raw) => parse_value(SEED_ENV, &raw)?,
            None => DEFAULT_SEED,
        },
    };
    let out = PathBuf::from(lookup("out").unwrap_or_else(|| "out".to_string()));
    let workers: usize = match lookup("workers") {
        Some(raw) => parse_value("workers", &raw)?,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    if workers == 0 {
        return Err(ConfigError::invalid("workers", "must be >= 1"));
    }

    let cfg = RunConfig {
        experiment,
        params,
        grid,
        sizes,
        replicates,
        thresholds,
        seed,
        out,
        workers,
    };
    cfg.validate_for_experiment()?;
    Ok(cfg)
}

impl RunConfig {
    fn validate_for_experiment(&self) -> Result<(), ConfigError> {
        match self.experiment {
            Experiment::Fig2 | Experiment::Fig3 => {
                let mut s = self.sizes.clone();
                s.sort_unstable();
                s.dedup();
                if s.len() != self.sizes.len() {
                    return Err(ConfigError::invalid("nsizes", "sizes must be distinct"));
                }
            }
            Experiment::Theory => {
                if self.params.sigma() > 0.0 && !(self.params.mu() > 0.0) {
                    return Err(ConfigError::invalid(
                        "mu",
                        "theory queries solve for tau, which needs mu > 0",
                    ));
                }
            }
            Experiment::Fig1 | Experiment::Simulate => {}
        }
        Ok(())
    }
}
