use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid flag, config-file entry or parameter combination.
    #[error("{0}")]
    Config(String),

    #[error(
        "refusing to run: tau = {tau} exceeds the stability limit tau_limit = {limit} \
         (sigma_max = {sigma}); pass --force to run anyway"
    )]
    Refused { tau: f64, limit: f64, sigma: f64 },

    #[error("numerical overflow at step {step} (t = {time}); reduce --tau")]
    Overflow { step: usize, time: f64 },

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Refused { .. } => 3,
            CliError::Overflow { .. } => 4,
            CliError::Io { .. } | CliError::Solver(_) => 1,
        }
    }
}

impl From<logkg_core::Error> for CliError {
    fn from(e: logkg_core::Error) -> Self {
        use logkg_core::Error as E;
        match e {
            E::Argument(_) | E::Domain(_) => CliError::Config(e.to_string()),
            E::Unstable { tau, limit, sigma } => CliError::Refused { tau, limit, sigma },
            E::Overflow { step, time } => CliError::Overflow { step, time },
            E::Solver(_) => CliError::Solver(e.to_string()),
        }
    }
}
