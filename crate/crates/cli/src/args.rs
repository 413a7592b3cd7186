//! Command-line grammar.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::config::{Format, Overrides};

const ENV_HELP: &str = "\
Environment:
  Every global option can also be set through an environment variable with
  the prefix DHP_ followed by the option name in upper case, e.g. DHP_M,
  DHP_EPS, DHP_DELTA_SEQ=1e-5,1e-6, DHP_CONFIG. Precedence: flags >
  environment > config file > built-in defaults (m = 1, eps = 0.1).

Config file:
  Flat TOML, one `key = value` per line, keys as the option names with
  underscores: m, eps, kx_window, n_kx, n_scan, snap_tol, accept_tol,
  rank_tol, delta_seq, lambda_seq, kappa_seq, cutoff, seed, samples, out,
  format.";

/// Regularised massive Dirac Hamiltonian on the half-plane: boundary
/// condition classification, edge spectra, scattering windings and the
/// bulk-edge identity C+ = n_b + w_inf.
#[derive(Debug, Parser)]
#[command(name = "dirac-halfplane", version, after_help = help_footer())]
pub struct Cli {
    /// Global settings.
    #[command(flatten)]
    pub global: GlobalArgs,
    /// Command to run.
    #[command(subcommand)]
    pub command: Command,
}

fn help_footer() -> String {
    format!("{ENV_HELP}\n\n{}", crate::error::EXIT_CODE_HELP)
}

/// Settings shared by every command.
#[derive(Debug, Default, Args)]
pub struct GlobalArgs {
    /// Flat TOML config file.
    #[arg(long, global = true, env = "DHP_CONFIG", value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Mass m > 0.
    #[arg(long, global = true, env = "DHP_M", allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// Regulator 0 < eps < 1/(2m).
    #[arg(long, global = true, env = "DHP_EPS", allow_hyphen_values = true)]
    pub eps: Option<f64>,
    /// Half-width K of the spectrum window [-K, K] [default: 3 max(sqrt(m/eps), 10)].
    #[arg(long, global = true, env = "DHP_KX_WINDOW")]
    pub kx_window: Option<f64>,
    /// Number of kx samples of the spectrum [default: 801].
    #[arg(long, global = true, env = "DHP_N_KX")]
    pub n_kx: Option<usize>,
    /// Number of energy samples per kx [default: 2000].
    #[arg(long, global = true, env = "DHP_N_SCAN")]
    pub n_scan: Option<usize>,
    /// Winding snapping tolerance [default: 0.1].
    #[arg(long, global = true, env = "DHP_SNAP_TOL")]
    pub snap_tol: Option<f64>,
    /// Edge eigenvalue acceptance threshold on sigma_min [default: 1e-7].
    #[arg(long, global = true, env = "DHP_ACCEPT_TOL")]
    pub accept_tol: Option<f64>,
    /// Relative rank / classification tolerance [default: 1e-9].
    #[arg(long, global = true, env = "DHP_RANK_TOL")]
    pub rank_tol: Option<f64>,
    /// Decreasing delta sequence of the asymptotic winding [default: 1e-5,1e-6,1e-7].
    #[arg(long, global = true, env = "DHP_DELTA_SEQ", value_delimiter = ',')]
    pub delta_seq: Option<Vec<f64>>,
    /// Decreasing lambda sequence of the asymptotic winding [default: 0.04,0.02,0.01].
    #[arg(long, global = true, env = "DHP_LAMBDA_SEQ", value_delimiter = ',')]
    pub lambda_seq: Option<Vec<f64>>,
    /// Decreasing heights of the Levinson path [default: 1e-2,3e-3,1e-3].
    #[arg(long, global = true, env = "DHP_KAPPA_SEQ", value_delimiter = ',')]
    pub kappa_seq: Option<Vec<f64>>,
    /// Levinson cutoff [default: max(30, 1/last lambda)].
    #[arg(long, global = true, env = "DHP_CUTOFF")]
    pub cutoff: Option<f64>,
    /// Sweep seed [default: 42].
    #[arg(long, global = true, env = "DHP_SEED")]
    pub seed: Option<u64>,
    /// Sweep samples per class [default: 5].
    #[arg(long, global = true, env = "DHP_SAMPLES")]
    pub samples: Option<usize>,
    /// Output file; standard output when absent or `-`.
    #[arg(long, global = true, env = "DHP_OUT", value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Output format [default: csv for spectrum, json otherwise].
    #[arg(long, global = true, env = "DHP_FORMAT", value_enum)]
    pub format: Option<Format>,
}

impl GlobalArgs {
    /// The options set on the command line or in the environment.
    pub fn overrides(&self) -> Overrides {
        Overrides {
            m: self.m,
            eps: self.eps,
            kx_window: self.kx_window,
            n_kx: self.n_kx,
            n_scan: self.n_scan,
            snap_tol: self.snap_tol,
            accept_tol: self.accept_tol,
            rank_tol: self.rank_tol,
            delta_seq: self.delta_seq.clone(),
            lambda_seq: self.lambda_seq.clone(),
            kappa_seq: self.kappa_seq.clone(),
            cutoff: self.cutoff,
            seed: self.seed,
            samples: self.samples,
            out: self.out.clone(),
            format: self.format,
        }
    }
}

/// Built-in reference boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    /// Dirichlet condition psi = 0.
    Dirichlet,
    /// Condition (a).
    A,
    /// Condition (a) with +i (no edge modes).
    APlus,
    /// Condition (b).
    B,
}

/// Boundary condition input: a JSON file, a class label or a built-in example.
#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["bc", "class", "example"])))]
pub struct BcArgs {
    /// Boundary condition JSON `{"A0": [[[re,im] x4] x2], "A1": ...}`.
    #[arg(long, value_name = "FILE")]
    pub bc: Option<PathBuf>,
    /// Class tag (A12, A14, A23, A24, A34, B, C); parameters via --param.
    #[arg(long = "class", value_name = "TAG")]
    pub class: Option<String>,
    /// Class parameter `name=value`; complex values as `1.5-0.3i`.
    #[arg(long = "param", value_name = "K=V", requires = "class", allow_hyphen_values = true)]
    pub params: Vec<String>,
    /// Built-in example condition.
    #[arg(long, value_enum)]
    pub example: Option<Example>,
}

/// Winding to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindingKind {
    /// Bulk winding C+ along a loop through the origin.
    Chern,
    /// Edge count n_b from the Levinson path.
    Levinson,
    /// Asymptotic winding w_inf along the arcs Gamma_delta(lambda).
    Infinity,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a self-adjoint boundary condition into one of the seven classes.
    Classify {
        #[command(flatten)]
        bc: BcArgs,
    },
    /// Export the edge spectrum (branches plus band boundary).
    Spectrum {
        #[command(flatten)]
        bc: BcArgs,
    },
    /// Compute one winding number of the scattering amplitude.
    Winding {
        /// Which winding.
        #[arg(value_enum)]
        kind: WindingKind,
        #[command(flatten)]
        bc: BcArgs,
        /// Write the finest-level samples as CSV (t,kx,kappa,re_s,im_s,cumulative_arg).
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        /// Radius of the tangent circle (chern).
        #[arg(long, default_value_t = 1.0, conflicts_with = "loop_semi_axes")]
        loop_radius: f64,
        /// Semi-axes `a,b` of a tangent ellipse instead of a circle (chern).
        #[arg(long, value_delimiter = ',', value_name = "A,B")]
        loop_semi_axes: Option<Vec<f64>>,
    },
    /// Check C+ = n_b + w_inf and compare w_inf with the anomaly table.
    Verify {
        #[command(flatten)]
        bc: BcArgs,
        /// Negative control: shift every definite prediction by one.
        #[arg(long, hide = true)]
        corrupt_prediction: bool,
    },
    /// Randomised sweep over all seven classes.
    Sweep,
}
