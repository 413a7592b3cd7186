//! Exit codes and the error type of the command-line front end.

use std::fmt;

use dirac_halfplane::Error;

/// Success.
pub const EXIT_OK: u8 = 0;
/// `verify` ran but the identity or the prediction check failed.
pub const EXIT_INCONSISTENT: u8 = 1;
/// The boundary condition is not self-adjoint.
pub const EXIT_NOT_SELF_ADJOINT: u8 = 2;
/// The boundary condition is not of rank 2.
pub const EXIT_NOT_RANK2: u8 = 3;
/// Invalid command line, configuration or input data.
pub const EXIT_USAGE: u8 = 4;
/// A numerical computation failed or did not converge.
pub const EXIT_NUMERICAL: u8 = 5;
/// Reading or writing a file failed.
pub const EXIT_IO: u8 = 6;

/// Exit code table shown in `--help`.
pub const EXIT_CODE_HELP: &str = "\
Exit codes:
  0  success
  1  verify: identity or prediction check failed
  2  boundary condition is not self-adjoint
  3  boundary condition is not of rank 2
  4  invalid arguments, configuration or input data
  5  numerical failure (no convergence, winding did not snap to an integer)
  6  I/O error";

/// Error carrying the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    /// Process exit code.
    pub code: u8,
    /// Message printed to standard error.
    pub message: String,
}

impl CliError {
    /// Invalid arguments or input.
    pub fn usage(message: String) -> Self {
        CliError { code: EXIT_USAGE, message }
    }

    /// Numerical failure.
    pub fn numerical(message: String) -> Self {
        CliError { code: EXIT_NUMERICAL, message }
    }

    /// I/O failure.
    pub fn io(message: String) -> Self {
        CliError { code: EXIT_IO, message }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotSelfAdjoint { .. } => EXIT_NOT_SELF_ADJOINT,
            Error::NotRank2 => EXIT_NOT_RANK2,
            Error::InvalidParams(_)
            | Error::ConstraintViolation(_)
            | Error::MalformedBoundary(_)
            | Error::UnknownClass(_)
            | Error::NotAWorkedExample => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        CliError { code, message: e.to_string() }
    }
}
