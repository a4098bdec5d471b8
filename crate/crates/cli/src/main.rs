//! Command-line front end for near-field beam design, channel evaluation
//! and rate sweeps.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime error.

mod config;
mod output;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{validate_config, BeamKind, RunConfig};

#[derive(Parser)]
#[command(
    name = "nfbeam",
    about = "Near-field wideband beamforming: misfocus-robust designs, channel curves and rate sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Path to the key-value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV files.
    #[arg(long, default_value = "out", global = true)]
    out: PathBuf,

    /// Override the configured beam list (comma separated).
    #[arg(long, global = true)]
    beams: Option<String>,

    /// Shrink the aperture to 2.5 cm for quick runs.
    #[arg(long, global = true)]
    fast: bool,

    /// Worker thread count (default: all cores). Outputs are byte-identical
    /// for any setting.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Design the selected beams and dump phase profiles plus the channel
    /// response curve.
    Design,
    /// Evaluate the configured sweep and write one record per point and
    /// beam.
    Sweep,
    /// Parse and validate the configuration, printing the resolved values.
    Validate,
}

fn load_config(cli: &Cli) -> Result<RunConfig, Vec<String>> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| vec!["--config <path> is required".to_string()])?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| vec![format!("cannot read {}: {e}", path.display())])?;
    let mut cfg = validate_config(&text)?;
    if let Some(beams) = &cli.beams {
        let mut parsed = Vec::new();
        let mut errs = Vec::new();
        for part in beams.split(',') {
            match BeamKind::parse(part) {
                Ok(b) => parsed.push(b),
                Err(e) => errs.push(format!("--beams: {e}")),
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        cfg.beams = parsed;
    }
    if cli.fast {
        cfg.radius_m = cfg.radius_m.min(0.025);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }

    let cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(diags) => {
            eprintln!("configuration errors:");
            for d in &diags {
                eprintln!("  - {d}");
            }
            return ExitCode::from(1);
        }
    };

    let result = match cli.command {
        Command::Validate => {
            print!("{cfg}");
            Ok(())
        }
        Command::Design => runner::run_design(&cfg, &cli.out),
        Command::Sweep => runner::run_sweep(&cfg, &cli.out),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
