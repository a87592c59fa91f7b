mod args;
mod commands;
mod config;
mod error;
mod oracle;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

/// Environment variable capping the worker thread count.
const THREADS_ENV: &str = "POTD_THREADS";

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage("invalid_input", format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::internal("threads", e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let table = cli.config.as_deref().map(config::load).transpose()?;
    let table = table.as_ref();
    let name = cli.command.name();
    match cli.command {
        Command::Fit(a) => commands::fit(&config::apply(a, table, name)?),
        Command::Embed(a) => commands::embed(&config::apply(a, table, name)?),
        Command::BenchSynthetic(a) => commands::bench_synthetic(&config::apply(a, table, name)?),
        Command::BenchReal(a) => commands::bench_real(&config::apply(a, table, name)?),
        Command::OracleCheck(a) => commands::oracle_check(&config::apply(a, table, name)?),
        Command::Generate(a) => commands::generate(&config::apply(a, table, name)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(cli.log_level.filter())
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code)
        }
    }
}
