//! `acdc-mopf`: power flow, optimization, decision support and case studies
//! for hybrid AC/DC grids from the command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! non-convergence.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "acdc-mopf", version, about = "Multi-objective optimal power flow for hybrid AC/DC grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Cmopso,
    Nsga2,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one sequential AC/DC power flow and report objectives and violations.
    Pf {
        /// Case file, or the name of a bundled case (e.g. case14_2t).
        #[arg(long)]
        case: String,
        /// Override a set-point, e.g. `converter.1.p_s=0.3` or `vg.2=1.04`.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
        /// Directory for state.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Optimize generation cost and voltage deviation.
    Optimize {
        #[arg(long)]
        case: String,
        #[arg(long, value_enum, default_value_t = Algorithm::Cmopso)]
        algo: Algorithm,
        /// Population size.
        #[arg(long, default_value_t = 100)]
        pop: usize,
        /// Iterations (generations); defaults to 50, or 100 above 50 buses.
        #[arg(long)]
        iters: Option<usize>,
        /// Number of cooperating subswarms.
        #[arg(long, default_value_t = 4)]
        subswarms: usize,
        /// Iterations between subswarm exchanges.
        #[arg(long, default_value_t = 5)]
        exchange: usize,
        #[arg(long, default_value_t = 100)]
        archive: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Measure voltage deviation on AC buses only.
        #[arg(long)]
        ac_only_dev: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Cluster a Pareto front and pick one compromise per cluster.
    Decide {
        /// pareto.csv written by `optimize`.
        #[arg(long)]
        pareto: PathBuf,
        #[arg(long, default_value_t = 2)]
        clusters: usize,
        /// Objective weights (cost, deviation).
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.5")]
        weights: Vec<f64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a bundled comparison study (case14-modes, case118-terminals).
    Study {
        name: String,
        /// Number of seeds per case variant (seeds 42, 43, ...).
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// Override the iteration count of every run.
        #[arg(long)]
        iters: Option<usize>,
        /// Optional directory for study.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a case file against the model invariants.
    Validate {
        #[arg(long)]
        case: String,
    },
}

/// Failure classes mapped to exit codes.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NonConvergence(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::NonConvergence(_) => 2,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Usage(format!("{e:#}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Pf { case, set, out } => commands::pf(&case, &set, &out),
        Command::Optimize { case, algo, pop, iters, subswarms, exchange, archive, seed, ac_only_dev, out } => {
            let opts = commands::OptimizeArgs {
                algo,
                pop,
                iters,
                subswarms,
                exchange,
                archive,
                seed,
                include_dc: !ac_only_dev,
            };
            commands::optimize(&case, &opts, &out)
        }
        Command::Decide { pareto, clusters, weights, seed, out } => {
            commands::decide(&pareto, clusters, &weights, seed, &out)
        }
        Command::Study { name, seeds, iters, out } => commands::study(&name, seeds, iters, out.as_deref()),
        Command::Validate { case } => commands::validate(&case),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
