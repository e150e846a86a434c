//! Batch front end: parses a command and its parameters, runs the computation,
//! and writes `<name>.csv` plus a `<name>.meta.json` provenance sidecar.

pub mod commands;
pub mod config;
pub mod error;
pub mod grammar;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

pub use commands::Command;
pub use config::Params;
pub use error::{CliError, CliResult};
pub use output::Written;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SHAPING_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "shaping",
    version,
    about = "Shaping-rate requirements and achievable-rate bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Conditional limit distribution of an input pmf under a constraint.
    Project(Params),
    /// Shaping rate and every achievable-rate bound for one channel.
    Bounds(Params),
    /// PAM over quantized AWGN across an SNR grid.
    SweepAwgn(Params),
    /// Binary symmetric channel across a grid of hamming budgets.
    SweepBsc(Params),
    /// Binary non-symmetric channel across a grid of hamming budgets.
    SweepBnsc(Params),
    /// Gaussian codebook rate against its large-power approximation.
    Gaussian(Params),
    /// Monte Carlo estimate of the set-selection success probability.
    McPs(Params),
    /// Monte Carlo matched and mismatched decoding error rates.
    McDecode(Params),
    /// Constrained capacity by Blahut-Arimoto iterations.
    Baa(Params),
}

impl Cmd {
    pub fn split(self) -> (Command, Params) {
        match self {
            Cmd::Project(p) => (Command::Project, p),
            Cmd::Bounds(p) => (Command::Bounds, p),
            Cmd::SweepAwgn(p) => (Command::SweepAwgn, p),
            Cmd::SweepBsc(p) => (Command::SweepBsc, p),
            Cmd::SweepBnsc(p) => (Command::SweepBnsc, p),
            Cmd::Gaussian(p) => (Command::Gaussian, p),
            Cmd::McPs(p) => (Command::McPs, p),
            Cmd::McDecode(p) => (Command::McDecode, p),
            Cmd::Baa(p) => (Command::Baa, p),
        }
    }
}

fn output_name(cmd: Command, p: &Params) -> CliResult<String> {
    let name = p.name.clone().unwrap_or_else(|| cmd.name().to_string());
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        return Err(CliError::validation(
            "name",
            format!("`{name}` is not a plain file stem"),
        ));
    }
    Ok(name)
}

/// Resolves the config file under `flags`, runs `cmd` and writes its outputs.
pub fn run(cmd: Command, flags: Params) -> CliResult<Written> {
    let params = flags.resolve(cmd.name())?;
    let name = output_name(cmd, &params)?;
    let dir = params
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    if params.threads == Some(0) {
        return Err(CliError::validation("threads", "must be positive"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(params.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::validation("threads", e.to_string()))?;
    let outcome = pool.install(|| commands::execute(cmd, &params))?;
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": cmd.name(),
        "seed": outcome.seed,
        "rng": outcome.rng,
        "grid": outcome.grid,
        "threads": pool.current_num_threads(),
        "columns": outcome.table.header,
        "config": params,
    });
    output::write(&dir, &name, &outcome.table, &meta)
}
