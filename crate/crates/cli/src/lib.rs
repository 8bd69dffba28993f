//! Batch driver: lifetimes, extraction, ecosystem analysis, mitigation and
//! resolver evaluation over on-disk inputs.

mod commands;
mod config;
pub mod sources;

use std::io::Write;

use thiserror::Error;

pub use commands::{cmd_analyze, cmd_eval, cmd_eval_with, cmd_extract, cmd_lifetimes, cmd_mitigate};
pub use config::{ConfigLayer, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_DIAGNOSTICS: u8 = 2;
pub const EXIT_NO_COMPATIBLE: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_NOT_FOUND: u8 = 65;
pub const EXIT_INTERNAL: u8 = 70;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NotFound(String),
    /// Input that was found but could not be parsed.
    #[error("{0}")]
    Diagnostics(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::NotFound(_) => EXIT_NOT_FOUND,
            CliError::Diagnostics(_) => EXIT_DIAGNOSTICS,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

/// Where a command writes human-readable output and diagnostics.
pub struct Streams<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

impl<'a> Streams<'a> {
    pub fn new(out: &'a mut dyn Write, err: &'a mut dyn Write) -> Self {
        Self { out, err }
    }
}

/// Run a command and turn its error, if any, into an exit status with a
/// message on the error stream.
pub fn run<F>(streams: &mut Streams<'_>, command: F) -> u8
where
    F: FnOnce(&mut Streams<'_>) -> Result<u8, CliError>,
{
    match command(streams) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(streams.err, "error: {e}");
            e.exit_code()
        }
    }
}
