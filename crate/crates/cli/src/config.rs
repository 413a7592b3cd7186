//! Run configuration: built-in defaults, an optional flat TOML file and
//! command-line / environment overrides.
//!
//! Precedence is flags > environment (`DHP_*`) > config file > defaults.
//! Flags and environment variables are resolved by the argument parser; the
//! file only fills what neither of them set.

use std::path::{Path, PathBuf};

use dirac_halfplane::boundary::DEFAULT_TOL;
use dirac_halfplane::edge::{uniform_grid, EdgeOptions, TraceOptions};
use dirac_halfplane::scattering::{
    default_cutoff, WindingOptions, DEFAULT_DELTA_SEQ, DEFAULT_KAPPA_SEQ, DEFAULT_LAMBDA_SEQ,
};
use dirac_halfplane::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Comma-separated values (spectrum only).
    Csv,
    /// Pretty-printed JSON.
    Json,
}

/// Options that may appear in the config file, in the environment or on the
/// command line.  Every field is optional; `None` means "not set here".
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Mass `m`.
    pub m: Option<f64>,
    /// Regulator `ε`.
    pub eps: Option<f64>,
    /// Half-width `K` of the spectrum window `[−K, K]`.
    pub kx_window: Option<f64>,
    /// Number of `kx` samples of the spectrum.
    pub n_kx: Option<usize>,
    /// Number of energy samples per `kx`.
    pub n_scan: Option<usize>,
    /// Winding snapping tolerance.
    pub snap_tol: Option<f64>,
    /// Edge eigenvalue acceptance threshold on `σ_min`.
    pub accept_tol: Option<f64>,
    /// Relative rank / classification tolerance.
    pub rank_tol: Option<f64>,
    /// `δ` sequence of the asymptotic winding.
    pub delta_seq: Option<Vec<f64>>,
    /// `λ` sequence of the asymptotic winding.
    pub lambda_seq: Option<Vec<f64>>,
    /// Heights of the Levinson path.
    pub kappa_seq: Option<Vec<f64>>,
    /// Levinson cutoff.
    pub cutoff: Option<f64>,
    /// Sweep seed.
    pub seed: Option<u64>,
    /// Sweep samples per class.
    pub samples: Option<usize>,
    /// Output path (`-` or absent for standard output).
    pub out: Option<PathBuf>,
    /// Output format.
    pub format: Option<Format>,
}

impl Overrides {
    /// Parse a flat TOML config file.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }

    /// Parse flat TOML text.
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Field-wise `self.or(lower)`.
    pub fn or(self, lower: Overrides) -> Overrides {
        Overrides {
            m: self.m.or(lower.m),
            eps: self.eps.or(lower.eps),
            kx_window: self.kx_window.or(lower.kx_window),
            n_kx: self.n_kx.or(lower.n_kx),
            n_scan: self.n_scan.or(lower.n_scan),
            snap_tol: self.snap_tol.or(lower.snap_tol),
            accept_tol: self.accept_tol.or(lower.accept_tol),
            rank_tol: self.rank_tol.or(lower.rank_tol),
            delta_seq: self.delta_seq.or(lower.delta_seq),
            lambda_seq: self.lambda_seq.or(lower.lambda_seq),
            kappa_seq: self.kappa_seq.or(lower.kappa_seq),
            cutoff: self.cutoff.or(lower.cutoff),
            seed: self.seed.or(lower.seed),
            samples: self.samples.or(lower.samples),
            out: self.out.or(lower.out),
            format: self.format.or(lower.format),
        }
    }
}

/// Fully resolved and validated settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// Model parameters.
    pub model: ModelParams,
    /// Half-width of the spectrum window.
    pub kx_window: f64,
    /// Number of `kx` samples of the spectrum.
    pub n_kx: usize,
    /// Number of energy samples per `kx`.
    pub n_scan: usize,
    /// Winding snapping tolerance.
    pub snap_tol: f64,
    /// Edge eigenvalue acceptance threshold.
    pub accept_tol: f64,
    /// Rank / classification tolerance.
    pub rank_tol: f64,
    /// `δ` sequence.
    pub delta_seq: Vec<f64>,
    /// `λ` sequence.
    pub lambda_seq: Vec<f64>,
    /// Levinson heights.
    pub kappa_seq: Vec<f64>,
    /// Levinson cutoff; `None` matches it to `lambda_seq`.
    pub cutoff: Option<f64>,
    /// Sweep seed.
    pub seed: u64,
    /// Sweep samples per class.
    pub samples: usize,
    /// Output path; `None` writes to standard output.
    pub out: Option<PathBuf>,
    /// Output format; `None` picks the command's default.
    pub format: Option<Format>,
}

/// Default sweep seed.
pub const DEFAULT_SEED: u64 = 42;
/// Default number of sweep samples per class.
pub const DEFAULT_SAMPLES: usize = 5;
/// Default number of `kx` samples of the spectrum.
pub const DEFAULT_N_KX: usize = 801;

impl RunConfig {
    /// Resolve defaults and validate.
    pub fn resolve(o: Overrides) -> Result<Self, CliError> {
        let model = ModelParams::new(o.m.unwrap_or(1.0), o.eps.unwrap_or(0.1))?;
        let scan = EdgeOptions::default();
        let cfg = RunConfig {
            model,
            kx_window: o.kx_window.unwrap_or_else(|| default_cutoff(&model)),
            n_kx: o.n_kx.unwrap_or(DEFAULT_N_KX),
            n_scan: o.n_scan.unwrap_or(scan.n_scan),
            snap_tol: o.snap_tol.unwrap_or(WindingOptions::default().snap_tol),
            accept_tol: o.accept_tol.unwrap_or(scan.accept_tol),
            rank_tol: o.rank_tol.unwrap_or(DEFAULT_TOL),
            delta_seq: o.delta_seq.unwrap_or_else(|| DEFAULT_DELTA_SEQ.to_vec()),
            lambda_seq: o.lambda_seq.unwrap_or_else(|| DEFAULT_LAMBDA_SEQ.to_vec()),
            kappa_seq: o.kappa_seq.unwrap_or_else(|| DEFAULT_KAPPA_SEQ.to_vec()),
            cutoff: o.cutoff,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            samples: o.samples.unwrap_or(DEFAULT_SAMPLES),
            out: o.out.filter(|p| p.as_os_str() != "-"),
            format: o.format,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("kx_window", self.kx_window),
            ("snap_tol", self.snap_tol),
            ("accept_tol", self.accept_tol),
            ("rank_tol", self.rank_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::usage(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(k) = self.cutoff {
            if !(k.is_finite() && k > 0.0) {
                return Err(CliError::usage(format!("cutoff must be positive, got {k}")));
            }
        }
        if self.snap_tol >= 0.5 {
            return Err(CliError::usage("snap_tol must be below 0.5".into()));
        }
        for (name, seq) in [("delta_seq", &self.delta_seq), ("lambda_seq", &self.lambda_seq), ("kappa_seq", &self.kappa_seq)] {
            let ok = !seq.is_empty()
                && seq.iter().all(|x| x.is_finite() && *x > 0.0)
                && seq.windows(2).all(|w| w[1] < w[0]);
            if !ok {
                return Err(CliError::usage(format!("{name} must be a non-empty strictly decreasing positive sequence")));
            }
        }
        if self.n_kx < 2 {
            return Err(CliError::usage("n_kx must be at least 2".into()));
        }
        if self.n_scan < 3 {
            return Err(CliError::usage("n_scan must be at least 3".into()));
        }
        if self.samples == 0 {
            return Err(CliError::usage("samples must be at least 1".into()));
        }
        Ok(())
    }

    /// Integrator settings.
    pub fn winding(&self) -> WindingOptions {
        WindingOptions { snap_tol: self.snap_tol, ..WindingOptions::default() }
    }

    /// Edge tracing settings.
    pub fn trace(&self) -> TraceOptions {
        let scan = EdgeOptions { n_scan: self.n_scan, accept_tol: self.accept_tol, ..EdgeOptions::default() };
        TraceOptions { scan, ..TraceOptions::default() }
    }

    /// Spectrum grid `[−K, K]` with `n_kx` points.
    pub fn kx_grid(&self) -> Vec<f64> {
        uniform_grid(-self.kx_window, self.kx_window, self.n_kx)
    }
}
