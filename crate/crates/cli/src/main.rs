//! `cardwave`: build, evaluate, verify and apply orthonormal spline wavelets.
//!
//! Exit status: 0 success, 1 verification failed, 2 usage, 3 numerical failure, 4 I/O or cache.

mod args;
mod cache;
mod commands;
mod failure;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(failure::Failure::Closed) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}
