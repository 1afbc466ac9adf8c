//! Command-line front end for `funscan-core`.
//!
//! [`run`] parses arguments, executes one subcommand on a bounded rayon pool
//! and maps failures to exit codes: 2 for invalid input, 3 for degenerate data.

pub mod args;
pub mod bench;
pub mod generate;
pub mod output;
pub mod scan;
pub mod simulate;

use std::ffi::OsString;

use anyhow::Result;
use clap::Parser;
use funscan_core::ScanError;

pub use args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

/// Bumped whenever a field of the JSON or CSV outputs changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

pub fn exit_code(err: &anyhow::Error) -> i32 {
    let degenerate = err
        .chain()
        .filter_map(|e| e.downcast_ref::<ScanError>())
        .any(ScanError::is_degenerate);
    if degenerate {
        EXIT_DEGENERATE
    } else {
        EXIT_INVALID
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.threads {
        anyhow::ensure!(k >= 1, "--threads must be at least 1");
        pool = pool.num_threads(k);
    }
    let pool = pool.build()?;
    pool.install(|| match cli.command {
        Command::Scan(a) => scan::run(&a),
        Command::Simulate(a) => simulate::run(&a),
        Command::Bench(a) => bench::run(&a),
        Command::Generate(a) => generate::run(&a),
    })
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
