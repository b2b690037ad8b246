mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Usage errors exit with 2, numerical or I/O failures with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<witsenhausen::Error> for CliError {
    fn from(e: witsenhausen::Error) -> Self {
        use witsenhausen::Error as E;
        match e {
            E::Quadrature { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds(a) => commands::bounds(a).map(|_| true),
        Command::Sweep(a) => commands::sweep(a).map(|_| true),
        Command::Simulate(a) => commands::simulate_cmd(a).map(|_| true),
        Command::ScalarExact(a) => commands::scalar_exact(a).map(|_| true),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                CliError::Failure(_) => 1,
            })
        }
    }
}
