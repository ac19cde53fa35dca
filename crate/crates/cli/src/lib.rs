//! Command-line front end for trace synthesis and Hurst estimation.
//!
//! [`run`] parses arguments, dispatches one subcommand and returns the
//! process exit status: 0 on success, 1 when a computation fails, 2 for
//! invalid usage or unreadable input.

mod args;
mod clock;
mod commands;
mod failure;
mod report;

use std::ffi::OsString;

use clap::Parser;

pub use clock::{Clock, FIXED_CLOCK_VAR};
pub use report::{FILES as REPORT_FILES, MANIFEST_FORMAT};

use args::{Cli, Command};

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, clock: &Clock) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let verbose = cli.verbose;
    let outcome = match cli.command {
        Command::Generate(a) => commands::generate(&a, clock),
        Command::Aggregate(a) => commands::aggregate(&a, clock, verbose),
        Command::Cumulants(a) => commands::cumulants(&a, verbose),
        Command::Hurst(a) => commands::hurst(&a, verbose),
        Command::Locality(a) => commands::locality(&a, verbose),
        Command::Wavelet(a) => commands::wavelet(&a, verbose),
        Command::Report(a) => report::run(&a, clock, verbose),
    };
    match outcome {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}
