//! Command-line front end of the half-plane Dirac toolkit.
//!
//! The binary `dirac-halfplane` exposes `classify`, `spectrum`,
//! `winding {chern|levinson|infinity}`, `verify` and `sweep`.  All outputs are
//! machine readable (JSON, or CSV for spectra and traces) with floats written
//! to 17 significant digits, so identical settings give byte-identical files.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::{chern_loop, cmd_classify, cmd_spectrum, cmd_sweep, cmd_verify, cmd_winding, write_file, Outcome};
use crate::config::{Overrides, RunConfig};
use crate::error::{CliError, EXIT_IO, EXIT_OK, EXIT_USAGE};

/// Resolve the configuration of a parsed command line: flags and
/// environment first, then the config file, then the defaults.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.global.config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    RunConfig::resolve(cli.global.overrides().or(file))
}

/// Run a parsed command.
pub fn execute(cli: &Cli) -> Result<(RunConfig, Outcome), CliError> {
    let cfg = resolve_config(cli)?;
    let outcome = match &cli.command {
        Command::Classify { bc } => cmd_classify(&cfg, bc),
        Command::Spectrum { bc } => cmd_spectrum(&cfg, bc),
        Command::Winding { kind, bc, trace, loop_radius, loop_semi_axes } => {
            let lp = chern_loop(*loop_radius, loop_semi_axes.as_deref())?;
            cmd_winding(&cfg, *kind, bc, trace.as_deref(), lp)
        }
        Command::Verify { bc, corrupt_prediction } => cmd_verify(&cfg, bc, *corrupt_prediction),
        Command::Sweep => cmd_sweep(&cfg),
    }?;
    Ok((cfg, outcome))
}

/// Full program: parse `args`, run, write the output and return the exit
/// code.  Errors are reported on standard error.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let result = execute(&cli).and_then(|(cfg, outcome)| {
        match &cfg.out {
            Some(path) => write_file(path, &outcome.output)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(&outcome.output)
                    .and_then(|_| stdout.flush())
                    .map_err(|e| CliError { code: EXIT_IO, message: format!("cannot write output: {e}") })?;
            }
        }
        Ok(outcome.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
