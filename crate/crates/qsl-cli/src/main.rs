//! `qsl` — quantum-speed-limit bounds, time evolution and control grading
//! for time-independent Hamiltonians, driven by JSON problem files.

mod commands;
mod emit;
mod problem;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "qsl",
    version,
    about = "Minimum-time bounds and performance grading for quantum state transitions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum BoundKindArg {
    Bhattacharyya,
    Orthogonal,
    Offset,
    General,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum EtaKindArg {
    Bhattacharyya,
    Orthogonal,
    General,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form minimum-time lower bound for a problem file
    Bound {
        /// Problem file (JSON)
        problem: PathBuf,
        /// Which bound to compute
        #[arg(long, value_enum)]
        kind: BoundKindArg,
        /// Target probability for the bhattacharyya bound
        #[arg(long)]
        level: Option<f64>,
        /// Override the reduced Planck constant
        #[arg(long)]
        hbar: Option<f64>,
    },
    /// Evolve the initial state to a single time or a CSV series
    Evolve {
        problem: PathBuf,
        /// Evolve to this time and print the state
        #[arg(long)]
        t: Option<f64>,
        /// Write a `t,p_target,p_survival,mt_envelope` series to this path
        #[arg(long, conflicts_with = "t")]
        csv: Option<PathBuf>,
        /// Series horizon (defaults to four bound-periods)
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        /// Series grid points
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        hbar: Option<f64>,
    },
    /// First time the target transition probability reaches a level
    Hit {
        problem: PathBuf,
        /// Probability level; 0 searches for the first vanishing point
        #[arg(long)]
        level: Option<f64>,
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        hbar: Option<f64>,
    },
    /// Grade control runs with the minimum-time performance measure
    Eta {
        problem: PathBuf,
        /// Runs file: JSON array of {label, t_cqs, achieved_fidelity?}
        #[arg(long)]
        runs: PathBuf,
        #[arg(long, value_enum)]
        kind: EtaKindArg,
        #[arg(long)]
        hbar: Option<f64>,
    },
    /// Two-state model report: derived constants, peak probability, minimum time
    Fg {
        /// Energy of the initial-state projector
        #[arg(long = "e-a")]
        e_a: f64,
        /// Energy of the target-state projector
        #[arg(long = "e-b")]
        e_b: f64,
        /// Overlap between initial and target states, in (0, 1]
        #[arg(long)]
        s: f64,
        /// Grade a run that took this long
        #[arg(long = "t-cqs")]
        t_cqs: Option<f64>,
        #[arg(long)]
        hbar: Option<f64>,
    },
    /// Run the seeded randomized self-check suites
    Check {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bound {
            problem,
            kind,
            level,
            hbar,
        } => commands::cmd_bound(&problem, kind, level, hbar),
        Command::Evolve {
            problem,
            t,
            csv,
            t_max,
            grid,
            hbar,
        } => commands::cmd_evolve(&problem, t, csv.as_deref(), t_max, grid, hbar),
        Command::Hit {
            problem,
            level,
            t_max,
            grid,
            hbar,
        } => commands::cmd_hit(&problem, level, t_max, grid, hbar),
        Command::Eta {
            problem,
            runs,
            kind,
            hbar,
        } => commands::cmd_eta(&problem, &runs, kind, hbar),
        Command::Fg {
            e_a,
            e_b,
            s,
            t_cqs,
            hbar,
        } => commands::cmd_fg(e_a, e_b, s, t_cqs, hbar),
        Command::Check { seed, cases } => commands::cmd_check(seed, cases),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
