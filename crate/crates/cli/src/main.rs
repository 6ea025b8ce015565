//! `qramwb`: build, verify, noise, bounds and cost front end.
//!
//! Exit codes: 0 success, 1 a verification or lemma check failed, 2 bad
//! usage or invalid parameters.

mod bounds;
mod circuits;
mod cost;
mod noise;

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "qramwb", version, about = "Circuit QRAM workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a lookup circuit and report its resources.
    Build(circuits::BuildArgs),
    /// Simulate a builder (or a saved circuit) against direct table lookup.
    Verify(circuits::VerifyArgs),
    /// Monte-Carlo noise sweeps and error-accumulation models.
    Noise(noise::NoiseArgs),
    /// Lower-bound and fidelity calculators.
    #[command(subcommand)]
    Bounds(bounds::BoundsCommand),
    /// Parallel matrix-vector cost models and the polynomial transform.
    #[command(subcommand)]
    Cost(cost::CostCommand),
}

/// `true` when every check passed.
type Status = Result<bool>;

/// Parses a snake_case or kebab-case enum through its serde names.
pub(crate) fn parse_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown value `{s}`"))
}

pub(crate) fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("QRAMWB_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).with_context(|| format!("QRAMWB_THREADS={raw:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Status {
    configure_threads()?;
    match cli.command {
        Command::Build(a) => circuits::build(a),
        Command::Verify(a) => circuits::verify(a),
        Command::Noise(a) => noise::run(a),
        Command::Bounds(c) => bounds::run(c),
        Command::Cost(c) => cost::run(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

pub(crate) fn require<T>(value: Option<T>, flag: &str, why: &str) -> Result<T> {
    match value {
        Some(v) => Ok(v),
        None => bail!("--{flag} is required {why}"),
    }
}
