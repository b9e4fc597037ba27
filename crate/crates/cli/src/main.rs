//! rkbslab: batch experiment runner for the RKBS laboratory.
//!
//! Usage: rkbslab <assemble|norm|train|verify|spectrum> --config <path> [--out <dir>]
//!
//! Exit codes: 0 success (for verify: all suites pass), 1 suite failure,
//! 2 bad configuration or usage, 3 solver infeasibility.

mod commands;
mod config;
mod jsonfmt;

use config::{build_instance, ExperimentConfig};
use rkbslab_core::Error as CoreError;
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Infeasible(String),
    Internal(String),
}

impl CliError {
    pub fn from_core(err: CoreError) -> Self {
        match err {
            CoreError::NotRepresentable { .. } => CliError::Infeasible(err.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Internal(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            CliError::Internal(msg) => write!(f, "{msg}"),
        }
    }
}

const USAGE: &str =
    "usage: rkbslab <assemble|norm|train|verify|spectrum> --config <path> [--out <dir>]";

struct Args {
    subcommand: String,
    config: PathBuf,
    out: PathBuf,
}

fn parse_args(mut argv: impl Iterator<Item = String>) -> Result<Args, CliError> {
    let subcommand = argv.next().ok_or_else(|| CliError::Usage(USAGE.into()))?;
    let mut config: Option<PathBuf> = None;
    let mut out = PathBuf::from(".");
    while let Some(flag) = argv.next() {
        match flag.as_str() {
            "--config" => {
                let value = argv
                    .next()
                    .ok_or_else(|| CliError::Usage("--config needs a path".into()))?;
                config = Some(PathBuf::from(value));
            }
            "--out" => {
                let value = argv
                    .next()
                    .ok_or_else(|| CliError::Usage("--out needs a directory".into()))?;
                out = PathBuf::from(value);
            }
            other => return Err(CliError::Usage(format!("unknown flag `{other}`\n{USAGE}"))),
        }
    }
    let config = config.ok_or_else(|| CliError::Usage(format!("--config is required\n{USAGE}")))?;
    Ok(Args {
        subcommand,
        config,
        out,
    })
}

fn run() -> Result<i32, CliError> {
    let args = parse_args(std::env::args().skip(1))?;
    let (config, raw) = ExperimentConfig::load(&args.config)?;
    let digest = jsonfmt::config_digest(&raw);
    let config_dir = args
        .config
        .parent()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    let ctx = commands::Context {
        config: &config,
        digest,
        out_dir: &args.out,
    };
    match args.subcommand.as_str() {
        "assemble" => {
            let instance = build_instance(&config, &config_dir)?;
            commands::assemble(&ctx, &instance)
        }
        "spectrum" => {
            let instance = build_instance(&config, &config_dir)?;
            commands::spectrum_cmd(&ctx, &instance)
        }
        "norm" => {
            let instance = build_instance(&config, &config_dir)?;
            commands::norm(&ctx, &instance)
        }
        "train" => {
            let instance = build_instance(&config, &config_dir)?;
            commands::train(&ctx, &instance)
        }
        "verify" => commands::verify(&ctx),
        other => Err(CliError::Usage(format!(
            "unknown subcommand `{other}`\n{USAGE}"
        ))),
    }
}

fn main() {
    let code = match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("rkbslab: {err}");
            err.exit_code()
        }
    };
    std::process::exit(code);
}
