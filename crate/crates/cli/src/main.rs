//! `nivp`: certified solving of first-order ODE systems whose initial values
//! are nonlinear functionals of the whole solution.

mod commands;
mod config;
mod report;

use clap::{Parser, Subcommand};
use config::Overrides;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "nivp",
    version,
    about = "Certified solver for ODE systems with nonlinear nonlocal initial conditions",
    after_help = "Exit codes: 0 success, 1 config error, 2 hypotheses fail, 3 non-convergence."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the solvability hypotheses declared in a problem config.
    Check {
        /// Problem configuration (TOML).
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Solve the problem; writes solution.csv and report.txt.
    Solve {
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Independent reference run: integrate from trial initial values and
    /// root-find the nonlocal conditions; writes oracle_solution.csv and
    /// oracle_report.txt.
    Oracle {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Analyze a nonnegative matrix from a JSON array-of-arrays file.
    Matrix {
        matrix: PathBuf,
    },
    /// Run a built-in example (ex1 or ex2) end to end: check, solve,
    /// oracle, and a comparison of the two solutions.
    Example {
        /// Example name: ex1 (Lipschitz, certified) or ex2 (growth only).
        name: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Forcing expression g(t) added to the first equation (default t).
        #[arg(long)]
        g: Option<String>,
        /// Forcing expression h(t) added to the second equation (default 1).
        #[arg(long)]
        h: Option<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check { config, overrides } => commands::cmd_check(config, overrides),
        Command::Solve {
            config,
            out,
            overrides,
        } => commands::cmd_solve(config, out, overrides),
        Command::Oracle {
            config,
            out,
            overrides,
        } => commands::cmd_oracle(config, out, overrides),
        Command::Matrix { matrix } => commands::cmd_matrix(matrix),
        Command::Example {
            name,
            out,
            g,
            h,
            overrides,
        } => commands::cmd_example(name, out, g.as_deref(), h.as_deref(), overrides),
    };
    let code = match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            commands::EXIT_CONFIG
        }
    };
    std::process::exit(code);
}
