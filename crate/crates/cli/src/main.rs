use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};
use nilskew_cli::commands::{execute, Command};
use nilskew_cli::config::{ExperimentConfig, Format, Overrides};

#[derive(Parser)]
#[command(
    name = "nilskew",
    version,
    about = "Experiments with skew products over the Heisenberg nilmanifold"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output path; standard output when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Log-log chart of the main series
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    #[arg(long = "N", global = true)]
    n: Option<u64>,
    /// Rotation number: golden, p/q, quad:d:p:q, cf:a1,a2,... or a decimal
    #[arg(long, global = true)]
    alpha: Option<String>,
    #[arg(long = "B", global = true)]
    b: Option<f64>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Mobius table written by `sieve`
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    /// Record wall-clock seconds (outputs are then not reproducible)
    #[arg(long, global = true)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = cli.common;
    let run = || -> anyhow::Result<i32> {
        let mut cfg = match &c.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        cfg.apply(Overrides {
            seed: c.seed,
            out: c.out.clone(),
            format: c.format,
            svg: c.svg.clone(),
            n: c.n,
            alpha: c.alpha.clone(),
            b: c.b,
            epsilon: c.epsilon,
            k: c.k,
            table: c.table.clone(),
            timing: c.timing,
        })?;
        execute(cli.command, &cfg, &mut std::io::stdout().lock())
    };
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
