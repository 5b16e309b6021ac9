//! `quasimass` command-line front end.

mod commands;
mod config;
mod failure;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use failure::{CliResult, Failure};

#[derive(Parser)]
#[command(name = "quasimass", version, about = "Mass and quasi-local mass integrals on model manifolds")]
struct Cli {
    /// Worker threads for the parallel parts.
    #[arg(long, global = true, env = "QUASIMASS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Catalog metrics, surface families and estimators.
    List,
    /// All requested estimators at a single radius.
    Compute(RunArgs),
    /// A radius sweep with rate fits and optional acceptance bands.
    Sweep(RunArgs),
    /// Jet, Gauss-equation, Gauss–Bonnet and grid-doubling diagnostics.
    Check(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory, overriding `output.dir`.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> CliResult<Vec<String>> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::List => Ok(vec![commands::list()]),
        Command::Compute(a) => commands::compute(&config::load(&a.config, a.out.as_deref())?),
        Command::Sweep(a) => commands::sweep(&config::load(&a.config, a.out.as_deref())?),
        Command::Check(a) => commands::check(&config::load(&a.config, a.out.as_deref())?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(lines) => {
            let mut out = std::io::stdout().lock();
            for l in lines {
                // a closed pipe (e.g. `| head`) is not an error
                if writeln!(out, "{}", l.trim_end()).is_err() {
                    break;
                }
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("quasimass: {f}");
            ExitCode::from(f.code())
        }
    }
}
