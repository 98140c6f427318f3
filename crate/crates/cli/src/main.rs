use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use plopt_cli::commands::{cmd_check_instance, cmd_plot, cmd_run, cmd_spectral, problem_from_args, Report};
use plopt_cli::config::ExperimentConfig;
use plopt_cli::CliError;

/// Decentralized PL optimization experiments.
#[derive(Parser)]
#[command(name = "plopt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solvers of a config and write one metrics CSV per solver.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Fill unset solver parameters from the DRONE default rule.
        #[arg(long)]
        auto: bool,
    },
    /// Print λ2, the spectral gap and the mixing-matrix checks of a topology.
    Spectral {
        /// linear:n, ring:n, complete:n, gap:<γ> or edges:<path>.
        topology: String,
        /// Gap the matrix must reach (defaults to the measured gap).
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Run the property suite on a problem preset.
    CheckInstance {
        /// Preset name; taken from the config's [problem] when omitted.
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Preset parameter, e.g. --set n=8 or --set declared_l=5.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Plot the gap of one or more metrics CSVs on a log scale.
    Plot {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        #[arg(long, default_value = "iter")]
        x_axis: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn dispatch(cli: Cli) -> Result<Report> {
    let report = match cli.command {
        Command::Run { config, out, seed, auto } => cmd_run(&config, out.as_deref(), seed, auto)?,
        Command::Spectral { topology, gamma } => cmd_spectral(&topology, gamma)?,
        Command::CheckInstance { preset, config, sets, seed } => {
            let problem = match (preset, config) {
                (Some(p), None) => problem_from_args(&p, &sets)?,
                (None, Some(c)) if sets.is_empty() => ExperimentConfig::load(&c)?.problem,
                _ => {
                    return Err(CliError::Usage("give either a preset (with optional --set) or --config".into()).into())
                }
            };
            cmd_check_instance(&problem, seed)?
        }
        Command::Plot { csv, x_axis, out } => cmd_plot(&csv, &x_axis, &out)?,
    };
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(r) => {
            print!("{}", r.text);
            if r.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.downcast_ref::<CliError>().map_or(1, CliError::exit_code))
        }
    }
}
