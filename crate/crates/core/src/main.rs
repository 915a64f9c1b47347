use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use twophoton::cli::{load_config, run_cli, CliError};

/// Simulate a delay scan of a two-photon interference experiment.
#[derive(Parser, Debug)]
#[command(name = "twophoton", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long, short)]
    config: PathBuf,
    /// Output CSV path; overrides `[output].path`.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Sampling seed; overrides `[sampling].seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Do not print the summary.
    #[arg(long, short)]
    quiet: bool,
}

fn run(args: &Args) -> Result<(), CliError> {
    let mut config = load_config(&args.config)?;
    if let Some(out) = &args.out {
        config.output = out.clone();
    }
    if let Some(seed) = args.seed {
        config.sampling.seed = seed;
    }
    let (_, summary) = run_cli(&config)?;
    if !args.quiet {
        print!("{summary}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
