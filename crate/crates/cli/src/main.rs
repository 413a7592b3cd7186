//! `dirac-halfplane` binary.

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(dirac_halfplane_cli::main_with_args(std::env::args_os()))
}
