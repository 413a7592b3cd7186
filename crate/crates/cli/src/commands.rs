//! Command implementations.  Each returns the bytes of the main output and
//! the process exit code.

use std::path::Path;
use std::str::FromStr;

use dirac_halfplane::anomaly::{
    predict_w_infinity, sweep, verify_identity, verify_identity_with, AnomalyPrediction, AnomalyValue, VerifyOptions,
};
use dirac_halfplane::boundary::{classify, make_class};
use dirac_halfplane::edge::spectrum;
use dirac_halfplane::scattering::{chern_via_scattering, matched_cutoff, n_b_levinson, w_infinity, Loop};
use dirac_halfplane::{BoundaryCondition, ClassLabel, ClassTag, Complex64, ModelParams};

use crate::args::{BcArgs, Example, WindingKind};
use crate::config::{Format, RunConfig};
use crate::error::{CliError, EXIT_INCONSISTENT, EXIT_NUMERICAL, EXIT_OK};
use crate::output::{spectrum_csv, to_json, trace_csv};

/// Main output and exit code of a command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// Bytes for `--out` / standard output.
    pub output: Vec<u8>,
    /// Exit code.
    pub code: u8,
}

impl Outcome {
    fn ok(output: Vec<u8>) -> Self {
        Outcome { output, code: EXIT_OK }
    }
}

fn json<T: serde::Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CliError> {
    to_json(value).map_err(|e| CliError::numerical(format!("serialisation failed: {e}")))
}

fn json_only(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    match cfg.format {
        Some(Format::Csv) => Err(CliError::usage(format!("`{command}` only supports --format json"))),
        _ => Ok(()),
    }
}

/// Parse one `name=value` class parameter.
pub fn parse_param(s: &str) -> Result<(String, Complex64), CliError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::usage(format!("parameter `{s}` is not of the form name=value")))?;
    let v = v.trim();
    let z = Complex64::from_str(v).map_err(|_| CliError::usage(format!("cannot parse `{v}` as a number")))?;
    Ok((k.trim().to_string(), z))
}

/// Boundary condition selected by the input arguments.
pub fn load_bc(p: &ModelParams, args: &BcArgs) -> Result<BoundaryCondition, CliError> {
    if let Some(path) = &args.bc {
        return read_bc(path);
    }
    if let Some(tag) = &args.class {
        let mut label = ClassLabel::new(ClassTag::from_str(tag)?);
        for s in &args.params {
            let (k, v) = parse_param(s)?;
            label = label.with(&k, v);
        }
        return Ok(make_class(&label, p)?);
    }
    Ok(match args.example {
        Some(Example::Dirichlet) => BoundaryCondition::dirichlet(),
        Some(Example::A) => BoundaryCondition::condition_a(),
        Some(Example::APlus) => BoundaryCondition::condition_a_plus(),
        Some(Example::B) => BoundaryCondition::condition_b(),
        None => return Err(CliError::usage("one of --bc, --class or --example is required".into())),
    })
}

fn read_bc(path: &Path) -> Result<BoundaryCondition, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("invalid boundary condition {}: {e}", path.display())))
}

/// `classify`: canonical class label as JSON.
pub fn cmd_classify(cfg: &RunConfig, args: &BcArgs) -> Result<Outcome, CliError> {
    json_only(cfg, "classify")?;
    let bc = load_bc(&cfg.model, args)?;
    let label = classify(&cfg.model, &bc, cfg.rank_tol)?;
    Ok(Outcome::ok(json(&label)?))
}

/// `spectrum`: traced edge branches and the band boundary.
pub fn cmd_spectrum(cfg: &RunConfig, args: &BcArgs) -> Result<Outcome, CliError> {
    let bc = load_bc(&cfg.model, args)?;
    let spec = spectrum(&cfg.model, &bc, &cfg.kx_grid(), &cfg.trace())?;
    let output = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => spectrum_csv(&spec).map_err(|e| CliError::io(e.to_string()))?,
        Format::Json => json(&spec)?,
    };
    Ok(Outcome::ok(output))
}

/// Loop of the `chern` winding.
pub fn chern_loop(radius: f64, semi_axes: Option<&[f64]>) -> Result<Loop, CliError> {
    let lp = match semi_axes {
        Some(&[a, b]) => Loop::TangentEllipse { a, b },
        Some(_) => return Err(CliError::usage("--loop-semi-axes takes two values".into())),
        None => Loop::TangentCircle { radius },
    };
    let ok = match lp {
        Loop::TangentEllipse { a, b } => a > 0.0 && b > 0.0,
        Loop::TangentCircle { radius } => radius > 0.0,
        Loop::Interior { .. } => true,
    };
    if !ok {
        return Err(CliError::usage("loop dimensions must be positive".into()));
    }
    Ok(lp)
}

/// `winding`: one winding number as JSON, the trace optionally as CSV.
///
/// A winding that does not snap to a stable integer is still written but
/// exits with the numerical-failure code.
pub fn cmd_winding(
    cfg: &RunConfig,
    kind: WindingKind,
    args: &BcArgs,
    trace: Option<&Path>,
    lp: Loop,
) -> Result<Outcome, CliError> {
    json_only(cfg, "winding")?;
    let p = &cfg.model;
    let bc = load_bc(p, args)?;
    let mut opts = cfg.winding();
    opts.record_trace = trace.is_some();
    let mut res = match kind {
        WindingKind::Chern => chern_via_scattering(p, &bc, &lp, &opts),
        WindingKind::Levinson => {
            let cutoff = cfg.cutoff.unwrap_or_else(|| matched_cutoff(p, &cfg.lambda_seq));
            n_b_levinson(p, &bc, &cfg.kappa_seq, cutoff, &opts)
        }
        WindingKind::Infinity => w_infinity(p, &bc, &cfg.delta_seq, &cfg.lambda_seq, &opts),
    }?;
    if let (Some(path), Some(points)) = (trace, res.trace.take()) {
        let bytes = trace_csv(&points).map_err(|e| CliError::io(e.to_string()))?;
        write_file(path, &bytes)?;
    }
    let code = if res.snapped.is_some() { EXIT_OK } else { EXIT_NUMERICAL };
    Ok(Outcome { output: json(&res)?, code })
}

/// Settings of `verify` and `sweep`.
pub fn verify_options(cfg: &RunConfig) -> VerifyOptions {
    VerifyOptions {
        winding: cfg.winding(),
        kappa_seq: cfg.kappa_seq.clone(),
        cutoff: cfg.cutoff,
        delta_seq: cfg.delta_seq.clone(),
        lambda_seq: cfg.lambda_seq.clone(),
        class_tol: cfg.rank_tol,
        ..VerifyOptions::default()
    }
}

/// Anomaly table with every definite prediction shifted by one; used as a
/// negative control of `verify`.
pub fn corrupted_prediction(p: &ModelParams, label: &ClassLabel) -> dirac_halfplane::Result<AnomalyPrediction> {
    let mut pred = predict_w_infinity(p, label)?;
    if let AnomalyValue::Int(n) = pred.value {
        pred.value = AnomalyValue::Int(n + 1);
        pred.rule = format!("corrupted: {}", pred.rule);
    }
    Ok(pred)
}

/// `verify`: identity report as JSON; exit 0 iff consistent.
pub fn cmd_verify(cfg: &RunConfig, args: &BcArgs, corrupt: bool) -> Result<Outcome, CliError> {
    json_only(cfg, "verify")?;
    let bc = load_bc(&cfg.model, args)?;
    let opts = verify_options(cfg);
    let report = if corrupt {
        verify_identity_with(&cfg.model, &bc, &opts, &corrupted_prediction)?
    } else {
        verify_identity(&cfg.model, &bc, &opts)?
    };
    let code = if report.consistent { EXIT_OK } else { EXIT_INCONSISTENT };
    Ok(Outcome { output: json(&report)?, code })
}

/// `sweep`: randomised table check as JSON.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    json_only(cfg, "sweep")?;
    let summary = sweep(&cfg.model, cfg.samples, cfg.seed, &verify_options(cfg))?;
    Ok(Outcome::ok(json(&summary)?))
}

/// Write bytes to a file, mapping failures to the I/O exit code.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}
