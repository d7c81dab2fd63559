//! `couplex`: command-line front end to the coupling toolkit.
//!
//! Exit codes: 0 success, 2 validation failure (error JSON on stderr),
//! 64 unknown subcommand, 66 unreadable input, 69 size cap exceeded,
//! 73 unwritable output.

mod args;
mod run;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use run::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                ErrorKind::InvalidSubcommand | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
                | ErrorKind::MissingSubcommand => {
                    let _ = e.print();
                    ExitCode::from(64)
                }
                _ => Failure::usage(e.to_string().lines().next().unwrap_or("bad arguments")).report(),
            };
        }
    };
    match run::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
