//! `tmasim`: runs the named simulation experiments and writes their CSV
//! artifacts and summary report.

mod config;
mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use config::Config;
use experiments::Experiment;

#[derive(Debug, Parser)]
#[command(
    name = "tmasim",
    version,
    about = "Time-modulated array transmitter simulations"
)]
struct Args {
    #[arg(long, value_enum)]
    experiment: Experiment,
    /// TOML configuration; defaults apply to every missing key.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if needed.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides `stream.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `stream.quantized`.
    #[arg(long, value_name = "BOOL", action = clap::ArgAction::Set)]
    quantized: Option<bool>,
    /// Overrides both register widths.
    #[arg(long, value_name = "N")]
    bits: Option<u32>,
}

fn run(args: &Args) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = args.seed {
        cfg.stream.seed = s;
    }
    if let Some(q) = args.quantized {
        cfg.stream.quantized = q;
    }
    if let Some(b) = args.bits {
        cfg.hardware.phase_bits = b;
        cfg.hardware.amp_bits = b;
    }
    let written = experiments::run(args.experiment, &cfg, &args.out)?;
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
