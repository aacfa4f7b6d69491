//! `qkt`: command-line front end for the quantum kicked top toolkit.
//!
//! All angles (κ, p, θ, φ) are in radians. Defaults: p = π/2, 8192 shots
//! per tomography basis, exact mode, seed 0.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::CommonArgs;

const AFTER_HELP: &str = "All angles are in radians. Defaults: p = π/2 (1.5707963267948966), \
8192 shots per basis, p1 = 0.001, p2 = 0.01, seed 0. Precedence: flags > --config file > defaults.";

#[derive(Parser, Debug)]
#[command(name = "qkt", version, about = "Quantum kicked top simulation via fixed-size two-qubit circuits", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical stroboscopic map trajectories [defaults: κ = 2.5, 17×17 grid, 150 kicks]
    #[command(after_help = AFTER_HELP)]
    ClassicalMap(CommonArgs),
    /// Compile U^N(κ) into a gate netlist with a verification report [defaults: κ = 2.5, N = 1, rotation level]
    #[command(after_help = AFTER_HELP)]
    Compile(CompileArgs),
    /// Time-averaged concurrence versus κ [defaults: κ = 0..12 step 0.5, (θ, φ) = (2.25, 2.0), 200 kicks]
    #[command(after_help = AFTER_HELP)]
    KappaSweep(CommonArgs),
    /// Time-averaged concurrence over a grid of initial points [defaults: κ = 2.5, 17×17 grid, 200 kicks]
    #[command(after_help = AFTER_HELP)]
    PhaseGrid(CommonArgs),
    /// Coherent-state overlap O_SCS per kick [defaults: κ = 2.5, points (π/2, 0) and (2.25, 1), 50 kicks]
    #[command(after_help = AFTER_HELP)]
    Oscs(CommonArgs),
    /// Simulated tomography of the evolved state [defaults: κ = 2.5, (θ, φ) = (2.25, 2.0), 1 kick, 8192 shots]
    #[command(after_help = AFTER_HELP)]
    TomoDemo(CommonArgs),
}

#[derive(Args, Debug)]
struct CompileArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Drop gates that act as the identity (breaks the fixed gate count)
    #[arg(long)]
    prune: bool,
    /// Verify an existing netlist against U^N instead of compiling; κ, p and N
    /// come from its header unless given as flags
    #[arg(long, value_name = "NETLIST")]
    check: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ClassicalMap(a) => commands::classical_map(&a),
        Command::Compile(a) => commands::compile(&a.common, a.prune, a.check.as_deref()),
        Command::KappaSweep(a) => commands::kappa_sweep(&a),
        Command::PhaseGrid(a) => commands::phase_grid(&a),
        Command::Oscs(a) => commands::oscs(&a),
        Command::TomoDemo(a) => commands::tomo_demo(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
