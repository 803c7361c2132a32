//! gmadlab — build, verify, and probe generalized multilevel amplitude
//! damping channels from JSON configs.
//!
//! Exit codes: 0 success, 1 property failure (the config describes something
//! that is not a valid channel, or a verified invariant is violated),
//! 2 config / usage / I-O error.

mod config;
mod runner;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use gmad_core::{Constraint, FunctionalKind};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The run reached a state that violates a physical invariant: exit 1.
    #[error("{0}")]
    Property(String),
    /// Bad config, bad flags, or I/O trouble: exit 2.
    #[error("{0}")]
    Config(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Property(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "gmadlab",
    version,
    about = "GMAD channel construction, verification, and work-extraction experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum KindArg {
    Ergotropy,
    Incoherent,
    Coherent,
    Total,
}

impl From<KindArg> for FunctionalKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Ergotropy => FunctionalKind::Ergotropy,
            KindArg::Incoherent => FunctionalKind::Incoherent,
            KindArg::Coherent => FunctionalKind::Coherent,
            KindArg::Total => FunctionalKind::Total,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ConstraintArg {
    Shell,
    Ball,
}

impl From<ConstraintArg> for Constraint {
    fn from(c: ConstraintArg) -> Self {
        match c {
            ConstraintArg::Shell => Constraint::Shell,
            ConstraintArg::Ball => Constraint::Ball,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the channel and print a JSON report of all structural residuals.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Tabulate a maximal-extractable-functional curve against shell energy.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_enum)]
        constraint: ConstraintArg,
        /// Grid resolution (overrides the config's `grid`).
        #[arg(long)]
        grid: Option<usize>,
        /// Comma-separated inverse temperatures, e.g. "0.1,1,10,inf"
        /// (overrides the config's `beta`).
        #[arg(long)]
        betas: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Work capacitance χ and its ingredient curves, plus a MAWER sidecar.
    Capacitance {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the small-shell work-extraction ratio (MAWER) as JSON.
    Mawer {
        #[arg(long)]
        config: PathBuf,
    },
    /// Iterate the channel on a dephase-matched state pair and tabulate
    /// coherent-ergotropy ratios.
    Mpemba {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        states: PathBuf,
        #[arg(long, default_value_t = 10)]
        iters: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Verify { config } => runner::run_verify(&config),
        Command::Sweep {
            config,
            kind,
            constraint,
            grid,
            betas,
            out,
        } => runner::run_sweep(
            &config,
            kind.into(),
            constraint.into(),
            grid,
            betas.as_deref(),
            &out,
        ),
        Command::Capacitance { config, out } => runner::run_capacitance(&config, &out),
        Command::Mawer { config } => runner::run_mawer(&config),
        Command::Mpemba {
            config,
            states,
            iters,
            out,
        } => runner::run_mpemba(&config, &states, iters, &out),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
