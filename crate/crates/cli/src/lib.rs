//! Command-line front end for the `khalimsky` crate.
//!
//! The binary is `ktopo`. Exit codes: 0 analysis ok, 1 verification found a
//! counterexample, 2 parse or schema error, 3 invalid space, 4 enumeration
//! budget exceeded.

pub mod commands;
mod error;
pub mod manifest;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{EnumerateOptions, Format, Status, SuiteArg};
pub use error::CliError;
pub use manifest::Manifest;

#[derive(Debug, Parser)]
#[command(
    name = "ktopo",
    version,
    about = "Maps on Khalimsky spaces: classification, census, chains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report constancy, continuity, quasi-continuity and closed graph of a map.
    Classify {
        manifest: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Count the self-maps of a finite space in each ring of the diagram.
    Enumerate {
        manifest: PathBuf,
        /// Largest number of tables to enumerate exhaustively.
        #[arg(long, default_value_t = khalimsky::DEFAULT_LIMIT)]
        limit: u64,
        /// Classify this many random tables (plus every constant) instead.
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Compare the closed-graph maps with the constants at closed points.
        #[arg(long)]
        verify: bool,
    },
    /// Print a chain between two lattice points and one overlap point per link.
    #[command(allow_negative_numbers = true)]
    Chain {
        x: String,
        y: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the built-in verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Status, CliError> {
    match cli.command {
        Command::Classify { manifest, format } => {
            commands::cmd_classify(&Manifest::load(&manifest)?, format, out)
        }
        Command::Enumerate {
            manifest,
            limit,
            sample,
            seed,
            format,
            verify,
        } => {
            let opts = EnumerateOptions {
                limit,
                sample,
                seed,
                format,
                verify,
            };
            commands::cmd_enumerate(&Manifest::load(&manifest)?, &opts, out)
        }
        Command::Chain { x, y, format } => commands::cmd_chain(&x, &y, format, out),
        Command::Verify { suite, format } => commands::cmd_verify(suite, format, out),
    }
}
