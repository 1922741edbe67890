//! `ncframe`: generate, verify, factorize and decompose tight frames over
//! finite-dimensional C*-algebras.
//!
//! Exit codes: 0 success (or tight / converged / passed), 1 the checked
//! property fails, 2 I/O or parse error, 3 invalid arguments.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncframe::AlgebraSpec;

#[derive(Parser, Debug)]
#[command(name = "ncframe", version, about = "Tight frames in Hilbert modules over finite-dimensional C*-algebras")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Relative numerical tolerance.
    #[arg(long, global = true, default_value_t = ncframe::DEFAULT_TOL)]
    pub tol: f64,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    pub output: Output,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Output {
    Json,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleArg {
    Quick,
    Full,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a random tight frame `√b · W_{k,n} · U`.
    Gen {
        /// Summand sizes, e.g. `2,1` for M₂(C) ⊕ C.
        #[arg(long, default_value = "1")]
        algebra: AlgebraSpec,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check `F F* = b I`; exit 1 if the frame is not tight.
    Verify { path: PathBuf },
    /// Tightness, sphericity, finest orthogonal splitting and divisibility.
    Analyze { path: PathBuf },
    /// Write a tight frame as `√b · W_{k,n} · U`.
    Factorize {
        path: PathBuf,
        /// Where to write `b` and `U`; printed when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partitions of {1..k} into blocks whose sizes are multiples of k′.
    Partitions {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        kprime: usize,
        /// Print only the number of partitions.
        #[arg(long)]
        count: bool,
    },
    /// Search for a strict-spherical tight frame by potential descent.
    Minimize {
        #[arg(long, default_value = "1")]
        algebra: AlgebraSpec,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        step_size: f64,
        #[arg(long, default_value_t = 20_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-8)]
        tight_tol: f64,
        /// Column normalization `⟨fᵢ, fᵢ⟩ = r · 1`; defaults to n/k.
        #[arg(long)]
        radius: Option<f64>,
        /// Frame file for the final iterate.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optimizer trace (decimated iterate log).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Built-in consistency suites.
    Selftest {
        #[arg(long, value_enum, default_value_t = ScaleArg::Quick)]
        scale: ScaleArg,
        /// Perturb one Gram entry of a fixture to check failures are reported.
        #[arg(long)]
        inject_fault: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
