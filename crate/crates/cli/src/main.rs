//! `stellar`: command-line access to the stellar representation library.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Failures of a CLI run, mapped onto exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] stellar_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("{0} of the verify checks failed")]
    VerifyFailed(usize),
}

impl CliError {
    /// 1 for invalid input, 2 for numerical failure.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(stellar_core::Error::Numerical(_)) | CliError::VerifyFailed(_) => 2,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stellar: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use stellar_core::Error;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Core(Error::Numerical("x".into())).exit_code(), 2);
        assert_eq!(CliError::VerifyFailed(1).exit_code(), 2);
        assert_eq!(CliError::Core(Error::Parse("x".into())).exit_code(), 1);
        assert_eq!(CliError::Core(Error::InvalidSpin(0)).exit_code(), 1);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
    }
}
