mod args;
mod commands;
mod grid;
mod output;

use std::io;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

pub enum CliError {
    Usage(String),
    Lib(gelkit::Error),
    Io(String, io::Error),
}

impl From<gelkit::Error> for CliError {
    fn from(e: gelkit::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(gelkit::Error::Domain(_) | gelkit::Error::Parse(_)) => 3,
            CliError::Lib(_) => 4,
            CliError::Io(..) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("usage error: {m}"),
            CliError::Lib(e) => e.to_string(),
            CliError::Io(ctx, e) => format!("i/o error: {ctx}: {e}"),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GELKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("GELKIT_THREADS must be a positive integer, got `{raw}`")))?;
    // only fails if a pool already exists, which cannot happen this early
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Degree(c) => commands::degree(c),
        Command::Moments(c) => commands::moments(c),
        Command::Gel(c) => commands::gel(c),
        Command::Sizedist(c) => commands::sizedist(c),
        Command::Stats(c) => commands::stats(c),
        Command::Asymptote(c) => commands::asymptote_cmd(c),
        Command::Mc(c) => commands::mc(c),
        Command::Validate(c) => commands::validate(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gelkit: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
