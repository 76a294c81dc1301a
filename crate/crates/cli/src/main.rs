//! `entroscope` — entropy and dimension experiments on subshifts.
//!
//! Exit codes: 0 success, 2 configuration error, 3 inconclusive
//! computation (partial results written), 4 internal limit.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod output;
mod runner;

use output::{emit, Format};
use runner::RunError;

#[derive(Parser)]
#[command(name = "entroscope", version, about = "Entropy and dimension toolkit for subshifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Covering-entropy grid of a subset: spanning/separated counts and
    /// slope fits per scale.
    Entropy {
        /// System description (JSON).
        #[arg(long)]
        system: PathBuf,
        /// Subset schedule (JSON); whole space when omitted.
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long, default_value_t = 24)]
        nmax: usize,
        /// Comma-separated scales, finest last.
        #[arg(long, default_value = "0.5,0.25,0.125")]
        eps: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dimensional (Bowen) entropy bracket by certified bisection.
    DimEntropy {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 26)]
        depth_cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Hausdorff dimension of a digit Cantor set on the circle.
    Hausdorff {
        #[arg(long)]
        base: usize,
        /// Comma-separated allowed digits (0-indexed).
        #[arg(long)]
        digits: String,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dimension-entropy bridge: Hausdorff dimension against dimensional
    /// entropy over log base, via independent pipelines.
    Bridge {
        #[arg(long)]
        base: usize,
        #[arg(long)]
        digits: Option<String>,
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Construct a subset achieving a target entropy.
    Lower {
        #[arg(long)]
        system: PathBuf,
        /// Lower inside this schedule instead of the whole system.
        #[arg(long)]
        within: Option<PathBuf>,
        #[arg(long)]
        target: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Write the constructed schedule (JSON) here.
        #[arg(long)]
        emit: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Diagonal entropy estimates in the product T x T^2 x .. x T^N.
    Diagonal {
        /// Base system description (JSON).
        #[arg(long)]
        base: PathBuf,
        #[arg(long = "N", default_value_t = 3)]
        factors: usize,
        #[arg(long, default_value_t = 12)]
        nmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Local-entropy estimates on a cyclic tower system.
    Tower {
        #[arg(long)]
        n: usize,
        /// Base full-shift alphabet; 2^(2n+1) when omitted.
        #[arg(long)]
        base_alphabet: Option<usize>,
        #[arg(long, default_value_t = 8)]
        centers: usize,
        /// "auto" or a comma-separated list of scales.
        #[arg(long, default_value = "auto")]
        eps: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sup local-entropy profile over an assembly of towers.
    Hstar {
        /// Towers 1..=n are assembled.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        centers: usize,
        #[arg(long, default_value = "auto")]
        eps: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, out_path) = dispatch(cli.command);
    match result {
        Ok(artifact) => {
            if let Err(e) = emit(out_path.as_deref(), &artifact.contents) {
                eprintln!("write failed: {e}");
                return ExitCode::from(2);
            }
            println!("{}", artifact.summary);
            ExitCode::SUCCESS
        }
        Err(err) => {
            if let RunError::Inconclusive { partial, .. } = &err {
                // Partial results still land in the output artifact.
                let _ = emit(out_path.as_deref(), partial);
            }
            eprintln!("{}", err.message());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> (Result<runner::Artifact, RunError>, Option<PathBuf>) {
    match command {
        Command::Entropy {
            system,
            subset,
            nmax,
            eps,
            out,
            format,
            seed: _,
        } => (
            runner::run_entropy(&system, subset.as_deref(), nmax, &eps, format),
            out,
        ),
        Command::DimEntropy {
            system,
            subset,
            tol,
            depth_cap,
            out,
            format,
            seed: _,
        } => (
            runner::run_dim_entropy(&system, subset.as_deref(), tol, depth_cap, format),
            out,
        ),
        Command::Hausdorff {
            base,
            digits,
            tol,
            out,
            seed: _,
        } => (runner::run_hausdorff(base, &digits, tol), out),
        Command::Bridge {
            base,
            digits,
            schedule,
            tol,
            out,
            seed: _,
        } => (
            runner::run_bridge(base, digits.as_deref(), schedule.as_deref(), tol),
            out,
        ),
        Command::Lower {
            system,
            within,
            target,
            tol,
            emit,
            out,
            seed: _,
        } => (
            runner::run_lower(&system, within.as_deref(), target, tol, emit.as_deref()),
            out,
        ),
        Command::Diagonal {
            base,
            factors,
            nmax,
            out,
            seed: _,
        } => (runner::run_diagonal(&base, factors, nmax), out),
        Command::Tower {
            n,
            base_alphabet,
            centers,
            eps,
            out,
            seed,
        } => (
            runner::run_tower(n, base_alphabet, centers, &eps, seed),
            out,
        ),
        Command::Hstar {
            n,
            centers,
            eps,
            out,
            seed,
        } => (runner::run_hstar(n, centers, &eps, seed), out),
    }
}
