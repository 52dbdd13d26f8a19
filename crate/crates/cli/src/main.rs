mod args;
mod commands;
mod files;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

/// Exit status 2 for bad input (usage, parse, validation), 1 for failures
/// while computing or writing results.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(anyhow::anyhow!(msg.into()))
    }
}

impl From<ctxcent::Error> for Failure {
    fn from(e: ctxcent::Error) -> Self {
        use ctxcent::Error::*;
        match e {
            NonConvergence { .. } | Overflow { .. } | Io(_) => Self::Runtime(e.into()),
            _ => Self::Usage(e.into()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CTXCENT_LOG", "info"))
        .format_timestamp(None)
        .init();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
