use std::process::ExitCode;

use clap::Parser;
use sumrank_cli::{run_and_emit, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_and_emit(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
