// Copyright 2026 The pcz Authors
// SPDX-License-Identifier: Apache-2.0

//! `pcz`: run parametric-CZ experiments from a JSON config and write
//! CSV/JSON artifacts.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pcz_core::config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "pcz",
    version,
    about = "Parametric CZ gate simulator and optimizer"
)]
struct Cli {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out` in the config; default `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed (overrides `seed` in the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScanKindArg {
    Swap,
    Phase,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the coupling-vs-flux curve.
    Gcurve,
    /// Synthesize the flux pulse, the coupling it produces and its spectrum.
    Pulse,
    /// Swap-population or control-phase map over amplitude and carrier.
    Scan {
        #[arg(long, value_enum)]
        kind: ScanKindArg,
    },
    /// Nelder-Mead pulse optimization.
    Optimize,
    /// Re-optimize across qubit detunings.
    SweepDelta,
    /// Simulated XEB/SPB experiments and their error budget.
    Xeb,
    /// Error budget from decay constants or decay CSV files.
    Budget,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let out = cli
        .out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let written = match cli.command {
        Command::Gcurve => commands::gcurve(&cfg, &out)?,
        Command::Pulse => commands::pulse(&cfg, &out)?,
        Command::Scan { kind } => commands::scan(&cfg, &out, matches!(kind, ScanKindArg::Swap))?,
        Command::Optimize => commands::optimize(&cfg, &out)?,
        Command::SweepDelta => commands::sweep_delta(&cfg, &out)?,
        Command::Xeb => commands::xeb(&cfg, &out)?,
        Command::Budget => commands::budget(&cfg, &out)?,
    };
    for p in written {
        log::info!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
