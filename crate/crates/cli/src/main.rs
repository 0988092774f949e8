use std::process::ExitCode;

use clap::Parser;
use logkg_cli::config::Cli;
use logkg_cli::run::{configure_threads, execute};
use logkg_cli::RunConfig;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| RunConfig::resolve(&cli)).and_then(|c| execute(&c));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("logkg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
