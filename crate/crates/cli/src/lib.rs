//! Batch driver for the radio-over-copper models.
//!
//! A run loads a TOML config (a file or a shipped preset), applies
//! `--set` overrides, validates it, runs one experiment and writes
//! `<output_dir>/<command>.csv` and `<output_dir>/<command>.summary.json`.
//! Results are computed completely before anything is written, and each file
//! is written to a temporary name and renamed into place.

pub mod commands;
pub mod config;
pub mod overrides;
pub mod presets;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

pub use commands::{Artifacts, Strategy};
pub use config::{validate_config, Diagnostic, ExperimentConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Calibrate,
    Plan,
    OptimizeMapping,
    SinrSweep,
    EvmSweep,
    Throughput,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Calibrate => "calibrate",
            Command::Plan => "plan",
            Command::OptimizeMapping => "optimize-mapping",
            Command::SinrSweep => "sinr-sweep",
            Command::EvmSweep => "evm-sweep",
            Command::Throughput => "throughput",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed configuration. Exit code 2.
    Config(String),
    /// Configuration or mapping rejected by validation. Exit code 1.
    Invalid(Vec<String>),
    /// The experiment itself failed. Exit code 1.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Invalid(_) | CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Invalid(v) => {
                write!(f, "validation failed:")?;
                for line in v {
                    write!(f, "\n  {line}")?;
                }
                Ok(())
            }
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<roc_core::Error> for CliError {
    fn from(e: roc_core::Error) -> Self {
        match e {
            roc_core::Error::InvalidMapping(v) => CliError::Invalid(v.iter().map(|x| x.to_string()).collect()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

/// Where the config text comes from.
#[derive(Clone, Debug)]
pub enum Source {
    File(PathBuf),
    Preset(String),
}

/// Reads, overrides and deserializes a config. Unknown keys are rejected.
pub fn load_config(source: &Source, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let text = match source {
        Source::File(p) => {
            std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?
        }
        Source::Preset(name) => presets::preset(name)
            .ok_or_else(|| {
                CliError::Config(format!("unknown preset `{name}`; available: {}", presets::names().join(", ")))
            })?
            .to_string(),
    };
    parse_config(&text, overrides)
}

pub fn parse_config(text: &str, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    for o in overrides {
        overrides::apply_override(&mut doc, o).map_err(CliError::Config)?;
    }
    toml::Value::Table(doc).try_into().map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))
}

/// Validates `cfg` and runs `command` without writing anything.
pub fn execute(command: Command, strategy: Strategy, cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let diags = validate_config(cfg);
    if !diags.is_empty() {
        return Err(CliError::Invalid(diags.iter().map(|d| d.to_string()).collect()));
    }
    for s in &cfg.signals {
        if s.power_dbm > roc_core::link_algebra::RECOMMENDED_RF_INPUT_DBM {
            log::warn!("signal power {} dBm is above the recommended 0 dBm", s.power_dbm);
        }
    }
    match command {
        Command::Calibrate => commands::calibrate(cfg),
        Command::Plan => commands::plan(cfg),
        Command::OptimizeMapping => commands::optimize_mapping(cfg, strategy),
        Command::SinrSweep => commands::sinr_sweep(cfg),
        Command::EvmSweep => commands::evm(cfg),
        Command::Throughput => commands::throughput(cfg),
    }
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> std::io::Result<PathBuf> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| e.error)?;
    Ok(path)
}

/// Writes `<command>.csv` and `<command>.summary.json` into `dir`.
pub fn write_artifacts(dir: &Path, command: Command, a: &Artifacts) -> Result<(PathBuf, PathBuf), CliError> {
    let io = |e: std::io::Error| CliError::Failed(format!("cannot write into {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut summary = serde_json::to_vec_pretty(&a.summary).map_err(|e| CliError::Failed(e.to_string()))?;
    summary.push(b'\n');
    let csv = write_atomic(dir, &format!("{}.csv", command.name()), &a.csv).map_err(io)?;
    let json = write_atomic(dir, &format!("{}.summary.json", command.name()), &summary).map_err(io)?;
    Ok((csv, json))
}
