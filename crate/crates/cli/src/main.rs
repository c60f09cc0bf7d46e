//! `mfbm`: command-line front end for mixed fBm score inference.
//!
//! Exit codes: 0 success, 1 invalid configuration or I/O, 2 parameter or
//! regime error, 3 numerical failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mfbm_core::ErrorKind;

use config::{Command, RunConfig, Settings};

#[derive(Debug, Parser)]
#[command(name = "mfbm", version, about = "Exact scores, trace asymptotics and Monte Carlo checks for mixed fBm")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON file with default settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Core(mfbm_core::Error),
}

impl From<mfbm_core::Error> for CliError {
    fn from(e: mfbm_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Parameter => 2,
                ErrorKind::Numerical => 3,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let base = match &cli.config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    Ok(RunConfig { command: cli.command, settings: base.overlay(&cli.settings) })
}

fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    if let Some(w) = cfg.settings.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {w} workers: {e}")))?;
    }
    let report = commands::run(cfg)?;
    output::emit(cfg, &report)
}

fn diagnostic(cfg: &RunConfig, e: &CliError) {
    let body = serde_json::json!({
        "error": e.to_string(),
        "kind": "numerical",
        "version": output::VERSION,
        "config": output::to_value(cfg).unwrap_or_default(),
    });
    let text = serde_json::to_string_pretty(&body).unwrap_or_default();
    eprintln!("{text}");
    if let Some(dir) = &cfg.settings.out {
        let _ = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(dir.join("diagnostic.json"), text));
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code());
        }
    };
    match execute(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.exit_code() == 3 {
                diagnostic(&cfg, &e);
            } else {
                eprintln!("{e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
