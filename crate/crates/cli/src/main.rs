mod args;
mod commands;
mod error;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Args;

/// Sizes the global pool from `JACSPEC_THREADS`; results do not depend on it.
fn init_threads() -> Result<(), error::CliError> {
    let Ok(raw) = std::env::var("JACSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| error::usage(format!("JACSPEC_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| error::usage(e.to_string()))
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = init_threads()
        .and_then(|()| args.resolve())
        .and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jacspec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
