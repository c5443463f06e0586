//! `tickchain`: command-line front end to the clock-chain crates.
//!
//! Exit codes: 0 on success, 1 on domain errors and failed acceptance
//! checks, 2 on usage errors (bad flags, unreadable configs, output
//! collisions without `--force`).

mod args;
mod commands;
mod error;
mod grid;
mod run;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, EXIT_USAGE};
use run::Run;

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let common = &cli.common;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {:?} worker threads: {e}", common.threads)))?;
    let threads = pool.current_num_threads();
    let name = cli.command.name();
    let out_dir = common.out.clone().unwrap_or_else(|| common.output_root.join(name));
    let mut run = Run::open(name, std::env::args().collect(), out_dir, common.force)?;
    let seed = common.seed;
    let done = pool.install(|| match &cli.command {
        Command::Optimize(a) => commands::optimize(a, seed, &mut run),
        Command::Transport(a) => commands::transport(a, &mut run),
        Command::Simulate(a) => commands::simulate(a, seed, &mut run),
        Command::Variance(a) => commands::variance(a, &mut run),
        Command::Asymptotics(a) => commands::asymptotics(a, &mut run),
        Command::Experiment(a) => commands::experiment(a, seed, &mut run),
        Command::Validate(a) => commands::validate(a, seed, &mut run),
    })?;
    let manifest = run.finish(done.config_hash, threads)?;
    eprintln!("wrote {} files and the manifest to {}", manifest.outputs.len(), common.out.as_deref().unwrap_or(&common.output_root.join(name)).display());
    match done.failed_checks {
        Some((failed, total)) => Err(CliError::ChecksFailed { failed, total }),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
