//! Command-line front end for the `logkg-core` solvers: single evolutions,
//! the three convergence studies and a stability pre-check, with
//! deterministic CSV/JSON outputs written atomically.
//!
//! Exit codes: `0` success, `1` I/O or solver failure, `2` configuration
//! error, `3` stability refusal, `4` numerical overflow.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{Command, OutputFormat, RunConfig};
pub use error::{CliError, Result};

/// Environment variable overriding the worker-thread count.
pub const THREADS_ENV: &str = "LOGKG_THREADS";
