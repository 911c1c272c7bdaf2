//! Command-line front end: constructs curves, surfaces, ambient frames,
//! matrix orbits and potential solutions, and writes CSV, OBJ and JSON
//! verification reports.

mod args;
mod commands;
pub mod config;
pub mod export;
pub mod report;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::Projection;
pub use commands::CliError;

/// All requested verifications passed.
pub const EXIT_OK: i32 = 0;
/// A verification failed; reports are still written.
pub const EXIT_VERIFICATION: i32 = 1;
/// Invalid flags or configuration.
pub const EXIT_USAGE: i32 = 2;

/// Runs the command line `argv` (program name first) and returns the exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv = match config::expand(argv.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli.command) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("verification failed");
            EXIT_VERIFICATION
        }
        Err(e @ CliError::Usage(_)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_VERIFICATION
        }
    }
}
