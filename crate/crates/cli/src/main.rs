use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tubenorm_cli::config::{RunConfig, OUT_ENV};
use tubenorm_cli::{run, CliError, Command};

/// H⁻¹ norms of tubular neighbourhoods of plane curves.
#[derive(Debug, Parser)]
#[command(name = "tubenorm", version)]
struct Args {
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config and the environment).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for ε sweeps.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tubenorm {}: {e}", args.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<Vec<PathBuf>, CliError> {
    let cfg = RunConfig::load(&args.config)?;
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::ConfigInvalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let out = args
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let base = args.config.parent().map(PathBuf::from).unwrap_or_default();
    run(args.command, &cfg, &out, &base)
}
