use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ma_outage::experiment::{self, exit_code, RunOptions};

#[derive(Parser)]
#[command(version, about = "Outage-aware movable-antenna optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multi-start gradient ascent at one configuration.
    Optimize(Flags),
    /// Monte Carlo check of the SINR and rate approximations.
    Validate(Flags),
    /// Run an experiment spec over a parameter grid.
    Sweep(Flags),
    /// Compare the optimized layout with the benchmark arrays.
    Benchmark(Flags),
}

#[derive(Args)]
struct Flags {
    /// JSON scenario (or experiment spec, for `sweep`).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials.
    #[arg(long)]
    trials: Option<u64>,
    /// Random optimization starts.
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Armijo backtracking instead of a fixed step.
    #[arg(long)]
    line_search: bool,
}

impl Flags {
    fn options(&self) -> RunOptions {
        RunOptions {
            config: self.config.clone(),
            seed: self.seed.unwrap_or(0),
            trials: self.trials,
            starts: self.starts,
            out: self.out.clone(),
            line_search: self.line_search,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Optimize(f) => experiment::cmd_optimize(&f.options()),
        Command::Validate(f) => experiment::cmd_validate(&f.options()),
        Command::Sweep(f) => experiment::cmd_sweep(&f.options(), f.seed.is_some()),
        Command::Benchmark(f) => experiment::cmd_benchmark(&f.options()),
    };
    match result {
        Ok(o) => {
            println!("{}", o.summary);
            println!("wrote {} to {}", o.files.join(", "), o.dir.display());
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category().as_str());
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
