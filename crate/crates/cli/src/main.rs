//! `singpde` command-line front end.

mod commands;
mod problem;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "singpde", version, about = "Classify, solve, trace and audit singular first-order PDEs t u_t = F(t, x, u, v)")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Global {
    /// Per-step tolerance of the characteristic integrator (overrides the problem file).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Multiplies the audit sample counts (times, circles, angles).
    #[arg(long, global = true, default_value_t = 1)]
    pub grid_density: usize,

    /// Assert that no random numbers are used. Always true for this tool.
    #[arg(long, global = true)]
    pub seedless: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the case classification of the equation.
    Classify {
        file: PathBuf,
    },
    /// Build the formal double series u0 = sum u_ij t^i x^j.
    Solve {
        file: PathBuf,
        /// Truncation orders M (in t) and N (in x).
        #[arg(long, num_args = 2, value_names = ["M", "N"], default_values_t = [4, 4])]
        order: Vec<usize>,
    },
    /// Integrate one characteristic and emit it as CSV.
    Trace(commands::TraceArgs),
    /// Audit the uniqueness criterion for a named solution.
    Audit {
        file: PathBuf,
        #[arg(long)]
        solution: String,
        /// Compare against this named solution instead of the series u0.
        #[arg(long)]
        against: Option<String>,
    },
    /// Run the built-in example gallery.
    Gallery {
        /// Entry id such as G2.
        id: Option<String>,
        #[arg(long, conflicts_with = "id")]
        all: bool,
        /// Also write the full per-entry reports as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Classification, series and an audit of every solution in one JSON document.
    Report {
        file: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    let res = match cli.cmd {
        Command::Classify { file } => commands::classify(&file, &g),
        Command::Solve { file, order } => commands::solve(&file, order[0], order[1], &g),
        Command::Trace(args) => commands::trace(&args, &g),
        Command::Audit { file, solution, against } => commands::audit(&file, &solution, against.as_deref(), &g),
        Command::Gallery { id, all, json } => commands::gallery(id.as_deref(), all, json.as_deref(), &g),
        Command::Report { file } => commands::report(&file, &g),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, err }) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
