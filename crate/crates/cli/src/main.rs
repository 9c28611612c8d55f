use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use swipt_core::allocation::{solve, upper_bound_c, upper_bound_q, Problem, SolveOptions, DEFAULT_RESOLUTION};
use swipt_core::sim::{emit_csv_with, plot_script, run_sweep_threads, SimConfig};
use swipt_core::Error;

mod channels;

#[derive(Debug, Parser)]
#[command(name = "swipt", version, about = "Frequency-switching SWIPT subcarrier allocation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep and write the per-point means as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Append the per-trial feedback bit count column.
        #[arg(long)]
        verbose: bool,
        /// Also write a matplotlib script that plots the CSV.
        #[arg(long, value_name = "PATH")]
        plot_script: Option<PathBuf>,
    },
    /// Solve one instance exactly and print the allocation.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        /// DP weight bins across the knapsack capacity.
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: u64,
    },
    /// Print the continuous-relaxation upper bound of one instance.
    Bound {
        #[command(flatten)]
        instance: InstanceArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProblemArg {
    /// Maximize capacity under a harvest floor.
    P1,
    /// Maximize harvest under a capacity floor.
    P2,
}

#[derive(Debug, clap::Args)]
struct InstanceArgs {
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long)]
    channels: PathBuf,
    /// Harvest floor in W (p1).
    #[arg(long, value_name = "W")]
    q_min: Option<f64>,
    /// Capacity floor in bit/s (p2).
    #[arg(long, value_name = "BPS")]
    c_min: Option<f64>,
}

impl InstanceArgs {
    fn problem_and_threshold(&self) -> swipt_core::Result<(Problem, f64)> {
        match (self.problem, self.q_min, self.c_min) {
            (ProblemArg::P1, Some(q), None) => Ok((Problem::P1, q)),
            (ProblemArg::P2, None, Some(c)) => Ok((Problem::P2, c)),
            (ProblemArg::P1, _, _) => Err(Error::InvalidParameter("p1 takes --q-min and no --c-min".into())),
            (ProblemArg::P2, _, _) => Err(Error::InvalidParameter("p2 takes --c-min and no --q-min".into())),
        }
    }
}

fn threads_from_env() -> swipt_core::Result<usize> {
    match std::env::var("SWIPT_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("SWIPT_THREADS must be a non-negative integer, got `{v}`"))),
        Err(_) => Ok(0),
    }
}

fn sweep(config: &Path, out: &Path, verbose: bool, script: Option<&Path>) -> swipt_core::Result<()> {
    let cfg = SimConfig::load(config)?;
    let threads = threads_from_env()?;
    let records = run_sweep_threads(&cfg, threads)?;
    emit_csv_with(&records, out, verbose.then_some(cfg.num_subcarriers))?;
    if let Some(script) = script {
        std::fs::write(script, plot_script(out)).map_err(|source| Error::Io { path: script.to_owned(), source })?;
    }
    eprintln!("wrote {} records to {}", records.len(), out.display());
    Ok(())
}

fn run(cli: Cli) -> swipt_core::Result<()> {
    match cli.command {
        Command::Sweep { config, out, verbose, plot_script } => sweep(&config, &out, verbose, plot_script.as_deref()),
        Command::Solve { instance, resolution } => {
            let (problem, threshold) = instance.problem_and_threshold()?;
            let m = channels::load(&instance.channels)?;
            let outcome = solve(problem, &m, threshold, &SolveOptions::with_resolution(resolution))?;
            let (objective, constraint) = match problem {
                Problem::P1 => ("C_T", "Q_T"),
                Problem::P2 => ("Q_T", "C_T"),
            };
            println!("mask {}", outcome.mask);
            println!("{objective} {}", outcome.objective);
            println!("{constraint} {}", outcome.constraint_used);
            match outcome.upper_bound {
                Some(b) => println!("bound {b}"),
                None => println!("bound none"),
            }
            println!("feasible {}", outcome.feasible);
            Ok(())
        }
        Command::Bound { instance } => {
            let (problem, threshold) = instance.problem_and_threshold()?;
            let m = channels::load(&instance.channels)?;
            match problem {
                Problem::P1 => println!("C_up {}", upper_bound_c(&m, threshold)?.value),
                Problem::P2 => println!("Q_up {}", upper_bound_q(&m, threshold)?.value),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
