//! `greedyshift` command-line tool.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use greedyshift::harness::{
    cmd_fit, cmd_rate_sweep, cmd_simulate, cmd_weights_diag, save_fit, save_sweep, save_weights_diag,
    CommandOptions, HarnessConfig, Method,
};
use greedyshift::{Error, Execution};

#[derive(Parser)]
#[command(name = "greedyshift", version, about = "Importance-weighted greedy model selection under covariate shift")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one dataset and select the iteration count
    Fit(Common),
    /// Replicated runs over a grid of sample sizes
    RateSweep(Common),
    /// Compare estimated and exact importance weights
    WeightsDiag(Common),
    /// Write a simulated dataset as CSV
    Simulate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file
    #[arg(long)]
    config: PathBuf,
    /// Overrides the scenario seed
    #[arg(long)]
    seed: Option<u64>,
    /// iwoga+hdiwic, iwoga+hdiwic_s or oga+hdic
    #[arg(long)]
    method: Option<Method>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 lets the runtime decide)
    #[arg(long, env = "GREEDYSHIFT_THREADS")]
    threads: Option<usize>,
}

fn execution() -> Execution {
    if cfg!(feature = "parallel") {
        Execution::Parallel
    } else {
        Execution::Serial
    }
}

fn run(command: Command) -> Result<(), Error> {
    let (Command::Fit(c) | Command::RateSweep(c) | Command::WeightsDiag(c) | Command::Simulate(c)) = &command;
    let cfg = HarnessConfig::load(&c.config)?;
    let opts = CommandOptions {
        seed: c.seed,
        method: c.method,
        execution: execution(),
    };
    let out: &Path = &c.out;
    match command {
        Command::Fit(_) => {
            let record = cmd_fit(&cfg, &opts)?;
            save_fit(&record, out)?;
            println!(
                "{}: selected k = {} of K_n = {}",
                record.method, record.selected_k, record.schedule.k_n
            );
            if let Some(m) = record.mcpe {
                println!("mcpe = {m:.6}");
            }
        }
        Command::RateSweep(_) => {
            let result = cmd_rate_sweep(&cfg, &opts)?;
            save_sweep(&result, out)?;
            for (cell, mean) in result.cells.iter().zip(result.metric_means()) {
                println!("n = {:>6}  p = {:>6}  {} = {:.6}  mean error = {mean:.6}", cell.n, cell.p, result.rate_axis, cell.rate);
            }
            match (&result.slope, &result.slope_skipped) {
                (Some(s), _) => println!(
                    "slope = {:.4} ± {:.4} (target {:.4})",
                    s.slope, s.std_error, result.target_exponent
                ),
                (None, Some(reason)) => println!("slope skipped: {reason}"),
                _ => {}
            }
        }
        Command::WeightsDiag(_) => {
            let report = cmd_weights_diag(&cfg, &opts)?;
            save_weights_diag(&report, out)?;
            for s in &report.summaries {
                println!(
                    "n_est = {:>7}  max|w-ŵ| = {:.4}  gram/d_n = {:.4}  noise/d_n = {:.4}",
                    s.n_estimation, s.median_max_weight_diff, s.median_gram_over_dn, s.median_noise_over_dn
                );
            }
        }
        Command::Simulate(_) => {
            let summary = cmd_simulate(&cfg, &opts, out)?;
            println!("wrote {} rows, p = {}, to {}", summary.n, summary.p, out.display());
        }
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T: Send>(_threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Error> {
    Ok(f())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (Command::Fit(c) | Command::RateSweep(c) | Command::WeightsDiag(c) | Command::Simulate(c)) = &cli.command;
    let threads = c.threads;
    match with_threads(threads, || run(cli.command)).and_then(|r| r) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
