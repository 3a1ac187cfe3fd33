use std::path::PathBuf;
use std::process::ExitCode;

use bandprufer::{load, run, write_outputs, CliError, Meta};
use clap::Parser;
use log::{error, info, LevelFilter};

/// Band structure, Prüfer analysis and embedded-eigenvalue bounds for
/// periodic Schrödinger and Jacobi operators.
#[derive(Debug, Parser)]
#[command(name = "bandprufer", version)]
struct Args {
    /// Run configuration (`key = value` lines).
    config: PathBuf,
    /// Directory for the CSV and JSON outputs.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for energy scans (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Recorded in the summary metadata.
    #[arg(long)]
    seed: Option<u64>,
}

fn init_logging() {
    let level = match std::env::var("BANDPRUFER_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("debug") => LevelFilter::Debug,
        Ok("info") | Err(_) => LevelFilter::Info,
        Ok(other) => {
            eprintln!("BANDPRUFER_LOG={other} is not quiet, info or debug; using info");
            LevelFilter::Info
        }
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn main() -> ExitCode {
    let args = Args::parse();
    init_logging();
    if let Some(n) = args.threads {
        if n == 0 {
            error!("--threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            error!("cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = (|| -> Result<i32, CliError> {
        let cfg = load(&args.config)?;
        let out = run(&cfg)?;
        let meta = Meta {
            seed: args.seed,
            threads: args.threads,
            ..Meta::new(cfg.mode)
        };
        let (csv, json) = write_outputs(&args.out, &cfg, &out, &meta)?;
        info!("wrote {} and {}", csv.display(), json.display());
        Ok(out.exit_code())
    })();
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
