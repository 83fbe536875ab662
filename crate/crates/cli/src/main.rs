//! `fsonet` — sweep runner for the uplink/optical network toolkit.
//!
//! Each subcommand executes one parameter sweep and writes a CSV table
//! with a provenance footer. Configuration layers, lowest priority first:
//! built-in defaults, `--preset`, `--config` file, then the flag
//! overrides `--seed`, `--mc-budget`, and `--out`.
//!
//! Exit codes: 0 success, 2 configuration error (nothing written),
//! 3 runtime failure (numerical or I/O).

mod config;
mod runner;

use clap::{Parser, Subcommand};
use config::{defaults, preset, RawConfig, Scenario};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fsonet", version, about = "Uplink + optical-backhaul network sweeps")]
struct Cli {
    /// Scenario file (sections of `key = value`; see the project README).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Named parameter preset applied beneath the config file
    /// (tableIII, tableI, clear_air, moderate_fog, moderate_rain).
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,

    /// Master seed for every random stream (overrides `sweep.seed`).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Monte Carlo budget per sweep point (overrides `sweep.mc_budget`).
    #[arg(long, global = true, value_name = "N")]
    mc_budget: Option<usize>,

    /// Output CSV path; stdout when omitted (overrides `output.path`).
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Uplink coverage vs SINR threshold (analytic + Monte Carlo).
    Coverage,
    /// Mean uplink spectral efficiency vs user density, three ways.
    Rate,
    /// Optical-link outage vs SNR threshold (quadrature + sampling).
    Fso,
    /// Relayed end-to-end coverage vs SINR threshold.
    Hybrid,
    /// Reflecting-surface spectral efficiency vs element count.
    Irs,
    /// End-to-end outage vs SNR offset with a decay-order fit.
    Diversity,
    /// Outage vs transmit beam waist at fixed jitter-to-aperture ratio.
    Beamwaist,
    /// Serving-distance CCDF under each interferer-distance model.
    Distances,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Coverage => "coverage",
            Command::Rate => "rate",
            Command::Fso => "fso",
            Command::Hybrid => "hybrid",
            Command::Irs => "irs",
            Command::Diversity => "diversity",
            Command::Beamwaist => "beamwaist",
            Command::Distances => "distances",
        }
    }
}

/// Layers defaults → preset → file → flags and builds the typed scenario.
/// Every failure here is a configuration error (exit 2) and happens
/// before any output file is touched.
fn assemble(cli: &Cli) -> Result<Scenario, config::ConfigError> {
    let mut raw = defaults();
    if let Some(name) = &cli.preset {
        raw.merge_from(&preset(name)?);
    }
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            config::ConfigError(format!("cannot read config file `{}`: {e}", path.display()))
        })?;
        raw.merge_from(&RawConfig::parse(&text)?);
    }
    let mut flags = RawConfig::default();
    let mut flag_text = String::new();
    if let Some(seed) = cli.seed {
        flag_text.push_str(&format!("[sweep]\nseed = {seed}\n"));
    }
    if let Some(budget) = cli.mc_budget {
        flag_text.push_str(&format!("[sweep]\nmc_budget = {budget}\n"));
    }
    if let Some(out) = &cli.out {
        flag_text.push_str(&format!("[output]\npath = {}\n", out.display()));
    }
    if !flag_text.is_empty() {
        flags = RawConfig::parse(&flag_text)?;
    }
    raw.merge_from(&flags);
    Scenario::build(&raw, cli.command.name())
}

/// Writes atomically: render to a temporary file in the destination
/// directory, then persist over the final name, so a failed run never
/// leaves a truncated CSV behind.
fn write_output(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let scenario = match assemble(&cli) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("fsonet: {e}");
            return ExitCode::from(2);
        }
    };
    let table = match runner::run(cli.command.name(), &scenario) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("fsonet: {e}");
            return ExitCode::from(3);
        }
    };
    let text = runner::render(&table, scenario.sweep.seed, &scenario.config_sha256);
    match &scenario.out {
        Some(path) => {
            if let Err(e) = write_output(path, &text) {
                eprintln!("fsonet: cannot write `{}`: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
