use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use dimerqd::cli::{exit_code, parse_config_with, run, RunOptions};
use dimerqd::Error;

/// Steady states, sweeps and protocol runs for two driven quantum dots in a
/// photonic-crystal dimer.
#[derive(Debug, Parser)]
#[command(name = "dimerqd", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Output directory, overriding [output] dir.
    #[arg(long, value_name = "DIR")]
    output: Option<PathBuf>,

    /// Fock cutoff for both modes, overriding [system] truncation.
    #[arg(long, value_name = "N")]
    truncation: Option<usize>,

    /// Worker threads for sweeps.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    /// Accepted for interface stability; every computation is deterministic.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Suppress the summary on stdout.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn execute(args: &Args) -> dimerqd::Result<()> {
    let text = std::fs::read_to_string(&args.config).map_err(|source| Error::Io {
        path: args.config.display().to_string(),
        source,
    })?;
    let config = parse_config_with(&text, args.truncation)?;
    let opts = RunOptions {
        output_dir: args.output.clone(),
        threads: args.threads,
    };
    let report = run(&config, &opts)?;
    if !args.quiet {
        println!("{}", report.summary);
        for f in &report.files {
            println!("wrote {}", f.display());
        }
        println!("wrote {}", report.manifest.display());
        println!("run sha256:{}", report.run_hash);
    }
    Ok(())
}
