//! `mwrc`: analyse correlated sources for exchange over a finite-field
//! multi-way relay channel, and simulate the binning scheme.
//!
//! Exit status is 0 on success, 1 on a negative verdict (ABCMI fails, rate
//! conditions fail, regions do not intersect) and 2 on any error.

mod commands;
mod error;
mod problem;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mwrc_core::par;
use mwrc_core::simulator::{RateScaling, SimMode};
use mwrc_core::Execution;

use commands::{Outcome, SimulateArgs};
use error::CliError;

const THREADS_VAR: &str = "MWRC_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "mwrc",
    version,
    about = "Source analysis and simulation for multi-way relay channels"
)]
struct Cli {
    /// Write the machine-readable JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropies, atoms, ABCMI, rates, conditions and kappa*.
    Analyze { problem: PathBuf },
    /// ABCMI test; exit 1 when it fails.
    Abcmi { problem: PathBuf },
    /// Atom-based rates and their rate conditions; exit 1 when they fail.
    Rates { problem: PathBuf },
    /// kappa* and the smallest kappa at which the regions intersect.
    Kappa { problem: PathBuf },
    /// Whether source and channel regions intersect at kappa; exit 1 if not.
    Feasible {
        problem: PathBuf,
        #[arg(long)]
        kappa: f64,
        /// Read kappa as a multiple of kappa*.
        #[arg(long)]
        relative: bool,
    },
    /// Monte Carlo simulation at one or more kappa values.
    Simulate {
        problem: PathBuf,
        /// Comma-separated list, e.g. 0.8,1,1.3.
        #[arg(long, value_parser = parse_kappas)]
        kappa: Option<KappaList>,
        /// Read kappa values as multiples of kappa*.
        #[arg(long)]
        relative: bool,
        /// Source block length.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Rate scaling; fill-channel in ideal mode, fixed in symbol-level mode
        /// unless given.
        #[arg(long, value_enum)]
        scaling: Option<ScalingArg>,
        /// Send bin indices without dithering.
        #[arg(long)]
        no_dither: bool,
        /// Run trials on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Debug, Clone)]
struct KappaList(Vec<f64>);

fn parse_kappas(s: &str) -> Result<KappaList, String> {
    commands::parse_kappa_list(s).map(KappaList)
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Ideal,
    SymbolLevel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScalingArg {
    Fixed,
    FillChannel,
}

const DEFAULT_M: usize = 6;
const DEFAULT_TRIALS: u64 = 2000;
const DEFAULT_SEED: u64 = 2024;

fn configure_threads() -> Result<(), CliError> {
    if let Ok(value) = std::env::var(THREADS_VAR) {
        let threads = value
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "{THREADS_VAR}: expected a positive integer, got {value:?}"
                ))
            })?;
        par::limit_threads(threads);
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Analyze { problem } => commands::analyze(&problem::load(problem)?),
        Command::Abcmi { problem } => commands::abcmi(&problem::load(problem)?),
        Command::Rates { problem } => commands::rates(&problem::load(problem)?),
        Command::Kappa { problem } => commands::kappa(&problem::load(problem)?),
        Command::Feasible {
            problem,
            kappa,
            relative,
        } => commands::feasible(&problem::load(problem)?, *kappa, *relative),
        Command::Simulate {
            problem,
            kappa,
            relative,
            m,
            trials,
            seed,
            mode,
            scaling,
            no_dither,
            sequential,
        } => {
            let problem = problem::load(problem)?;
            let defaults = &problem.simulation;
            let kappas = kappa
                .as_ref()
                .map(|k| k.0.clone())
                .or_else(|| defaults.kappa.clone())
                .ok_or_else(|| CliError::Usage("simulate: --kappa is required".into()))?;
            let mode = match mode {
                Some(ModeArg::Ideal) => SimMode::Ideal,
                Some(ModeArg::SymbolLevel) => SimMode::SymbolLevel,
                None => match defaults.mode.as_deref() {
                    None | Some("ideal") => SimMode::Ideal,
                    Some("symbol-level") => SimMode::SymbolLevel,
                    Some(other) => return Err(CliError::Schema(format!(
                        "simulation.mode: expected \"ideal\" or \"symbol-level\", found {other:?}"
                    ))),
                },
            };
            let args = SimulateArgs {
                kappas,
                relative: *relative || defaults.relative.unwrap_or(false),
                m: m.or(defaults.m).unwrap_or(DEFAULT_M),
                trials: trials.or(defaults.trials).unwrap_or(DEFAULT_TRIALS),
                seed: seed.or(defaults.seed).unwrap_or(DEFAULT_SEED),
                mode,
                scaling: match (scaling, mode) {
                    (Some(ScalingArg::Fixed), _) | (None, SimMode::SymbolLevel) => {
                        RateScaling::Fixed
                    }
                    (Some(ScalingArg::FillChannel), _) | (None, SimMode::Ideal) => {
                        RateScaling::FillChannel
                    }
                },
                dither: !no_dither,
                execution: if *sequential {
                    Execution::Sequential
                } else {
                    Execution::Parallel
                },
            };
            commands::simulate(&problem, &args)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let json = report::to_json_text(&outcome.json);
            if cli.json {
                print!("{json}");
            } else {
                print!("{}", outcome.text);
            }
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, json) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(outcome.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
