use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write output: {0}")]
    Write(String),

    /// The reader closed stdout early (e.g. `| head`); not reported.
    #[error("broken pipe")]
    BrokenPipe,

    #[error("numerical failure: {0}")]
    Numerical(#[from] cdsopt_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe => CliError::BrokenPipe,
            _ => CliError::Write(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            CliError::BrokenPipe
        } else {
            CliError::Write(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Core errors raised while building inputs from the config are config errors.
pub trait ConfigContext<T> {
    fn in_config(self, field: &str) -> CliResult<T>;
}

impl<T> ConfigContext<T> for cdsopt_core::Result<T> {
    fn in_config(self, field: &str) -> CliResult<T> {
        self.map_err(|e| CliError::Config(format!("{field}: {e}")))
    }
}
