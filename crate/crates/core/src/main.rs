use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use polariton::config::{parse_config, Mode};
use polariton::run::run;

/// Light/spin polariton input-output simulator.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Readout scan: variances of output light modes versus κc.
    Readout(Common),
    /// Memory scan: variances of stored spin modes versus κc.
    Memory(Common),
    /// Paired wavenumber and group velocity for a detection frequency.
    Dispersion(Common),
    /// Kernel solution versus lattice oracle on random profiles.
    OracleCompare(Common),
    /// Commutator-form residual of the lattice transfer matrix.
    SymplecticCheck(Common),
    /// Measured wavepacket speed versus the group velocity.
    PacketVelocity(Common),
    /// Residual of the Laplace-mode relation at the exit face.
    LaplaceCheck(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path (a .meta.json sidecar is written beside it).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use n bins on both axes instead of the configured grid.
    #[arg(long, value_name = "N")]
    grid_override: Option<usize>,
}

impl Command {
    fn split(self) -> (Mode, Common) {
        match self {
            Command::Readout(c) => (Mode::Readout, c),
            Command::Memory(c) => (Mode::Memory, c),
            Command::Dispersion(c) => (Mode::Dispersion, c),
            Command::OracleCompare(c) => (Mode::OracleCompare, c),
            Command::SymplecticCheck(c) => (Mode::SymplecticCheck, c),
            Command::PacketVelocity(c) => (Mode::PacketVelocity, c),
            Command::LaplaceCheck(c) => (Mode::LaplaceCheck, c),
        }
    }
}

fn execute(mode: Mode, args: Common) -> anyhow::Result<bool> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("cannot read {}", args.config.display()))?;
    let mut config = parse_config(&text)?;
    if config.mode != mode {
        anyhow::bail!(
            "config mode `{}` does not match subcommand `{}`",
            config.mode.name(),
            mode.name()
        );
    }
    if let Some(n) = args.grid_override {
        config.override_grid(n)?;
    }
    let out = args
        .out
        .or_else(|| config.output.clone())
        .context("no output path: pass --out or set \"output\" in the config")?;
    let report = run(&config, &out)?;
    for line in &report.lines {
        println!("{line}");
    }
    println!("wrote {} and {}", report.csv_path.display(), report.meta_path.display());
    Ok(report.passed)
}

fn main() -> ExitCode {
    let (mode, args) = Cli::parse().command.split();
    match execute(mode, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
