//! Run configuration: a JSON file merged with command-line flags, flags winning.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Constants,
    Spectral,
    Simulate,
    Score,
    Trace,
    TraceSweep,
    OpfSweep,
    Mc,
    Degeneracy,
    LanCheck,
    Accept,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Spectral => "spectral",
            Command::Simulate => "simulate",
            Command::Score => "score",
            Command::Trace => "trace",
            Command::TraceSweep => "trace-sweep",
            Command::OpfSweep => "opf-sweep",
            Command::Mc => "mc",
            Command::Degeneracy => "degeneracy",
            Command::LanCheck => "lan-check",
            Command::Accept => "accept",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    #[default]
    Printed,
    DensityConsistent,
}

impl From<Convention> for mfbm_core::constants::AmplitudeConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Printed => Self::Printed,
            Convention::DensityConsistent => Self::DensityConsistent,
        }
    }
}

/// Every setting is optional here; commands check what they need.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Hurst index H.
    #[arg(long = "H")]
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
    /// Fractional amplitude sigma.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Sampling exponent: Delta = n^-alpha.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Sample size.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Comma-separated ascending sample sizes for sweeps.
    #[arg(long = "n-list", value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    /// Monte Carlo replications.
    #[arg(long = "R")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Replication index of a single simulated path.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replication: Option<u64>,
    /// Local direction h1,h2; a single value sets both components.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    /// Amplitude convention for the supercritical constants.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,
    /// Largest lag for the spectral command.
    #[arg(long = "k-max")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<i64>,
    /// Increments CSV for the score command (sidecar JSON next to it).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Output directory; without it results go to stdout.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Worker threads for Monte Carlo loops.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overlay(mut self, flags: &Settings) -> Self {
        overlay!(
            self, flags, hurst, sigma, alpha, n, n_list, replications, seed, replication, h, convention, k_max,
            input, out, format, workers
        );
        self
    }
}

/// Fully resolved configuration, embedded in every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(flatten)]
    pub settings: Settings,
}

fn missing(cmd: Command, what: &str) -> CliError {
    CliError::Config(format!("`{}` requires {what}", cmd.name()))
}

impl RunConfig {
    pub fn hurst(&self) -> Result<f64, CliError> {
        self.settings.hurst.ok_or_else(|| missing(self.command, "--H"))
    }

    pub fn sigma(&self) -> f64 {
        self.settings.sigma.unwrap_or(1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.settings.alpha.unwrap_or(0.3)
    }

    pub fn n(&self) -> Result<usize, CliError> {
        self.settings.n.ok_or_else(|| missing(self.command, "--n"))
    }

    pub fn n_list(&self) -> Result<Vec<usize>, CliError> {
        self.settings.n_list.clone().ok_or_else(|| missing(self.command, "--n-list"))
    }

    pub fn replications(&self) -> usize {
        self.settings.replications.unwrap_or(2000)
    }

    pub fn seed(&self) -> u64 {
        self.settings.seed.unwrap_or(mfbm_core::acceptance::SEED)
    }

    pub fn h(&self) -> Result<[f64; 2], CliError> {
        match self.settings.h.as_deref() {
            None => Err(missing(self.command, "--h")),
            Some([x]) => Ok([*x, *x]),
            Some([a, b]) => Ok([*a, *b]),
            Some(v) => Err(CliError::Config(format!("--h takes one or two values, got {}", v.len()))),
        }
    }

    pub fn format(&self) -> Format {
        self.settings.format.unwrap_or_default()
    }

    pub fn convention(&self) -> Convention {
        self.settings.convention.unwrap_or_default()
    }
}
