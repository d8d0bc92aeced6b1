//! Batch driver: every command reads a JSON config and writes one report.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;
use crate::output::Format;

#[derive(Parser)]
#[command(name = "vortex-ladder", version, about = "Vortex sectors, spectra and reflection checks on Kitaev-type ladders")]
struct Cli {
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; all cores by default.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the command's comparison tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Eigenvalues from one of the registered methods.
    Spectrum,
    /// Ground energy of every vortex sector.
    Sweep,
    /// Vortex gaps over a range of ladder sizes.
    GapScan,
    /// Spin spectrum against the union of fermionic sector spectra.
    Compare,
    /// Perturbative vortex gaps against exact diagonalization.
    Perturb,
    /// Reflection positivity checks on a small ladder.
    RpVerify,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = config::load(path)?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    let tolerance = cli.tolerance.or(cfg.tolerance);
    if tolerance.is_some_and(|t| !(t > 0.0) || !t.is_finite()) {
        return Err(CliError::Config("tolerance must be positive".into()));
    }
    let default_format = match cli.command {
        Command::Sweep | Command::GapScan => Format::Csv,
        _ => Format::Json,
    };
    let format = cli.format.unwrap_or(default_format);
    let bytes = match cli.command {
        Command::Spectrum => commands::spectrum(&cfg, format)?,
        Command::Sweep => commands::sweep(&cfg, format, tolerance)?,
        Command::GapScan => commands::gap_scan_cmd(&cfg, format)?,
        Command::Compare => commands::compare(&cfg, format, tolerance)?,
        Command::Perturb => commands::perturb(&cfg, format, tolerance)?,
        Command::RpVerify => commands::rp_verify(&cfg, format)?,
    };
    output::write_output(cli.out.as_deref(), &bytes)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vortex-ladder: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
