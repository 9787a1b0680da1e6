use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use rdsym::cli::{run, RunOptions};
use rdsym::config::parse_config;

/// Conditional-symmetry verification and exact solutions for two-component
/// reaction-diffusion systems with power diffusivities.
#[derive(Parser)]
#[command(name = "rdsym", version, about)]
struct Args {
    /// Run configuration file (line-oriented `key = value`)
    #[arg(long)]
    config: PathBuf,

    /// Output directory for CSV artifacts and the report
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for random sampling (overrides the config)
    #[arg(long)]
    seed: Option<u64>,

    /// Tolerance override for residual checks
    #[arg(long)]
    tol: Option<f64>,

    /// Suppress the report on stdout
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.category().exit_code() as u8);
        }
    };
    let opts = RunOptions {
        out: args.out,
        seed: args.seed,
        tol: args.tol,
        quiet: args.quiet,
    };
    match run(&cfg, &opts) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.category().exit_code() as u8)
        }
    }
}
