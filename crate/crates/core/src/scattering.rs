//! Scattering amplitude and its three winding numbers.
//!
//! For a boundary condition `A = A0 + i kx A1` the scattering amplitude is
//!
//! ```text
//! S(kx, κ) = −g(kx, −κ)/g(kx, κ),
//! g(kx, κ) = det[ A Ψ̂₀(kx, κ),  A Ψ̂∞(kx, κ_ev) ],
//! ```
//!
//! where `Ψ̂ = (ψ, i ky ψ)` are the boundary-data lifts of the upper-band
//! sections.  `S` is unimodular on `κ > 0`.  Three winding numbers are
//! extracted with a common argument-increment integrator:
//!
//! * the bulk Chern number along loops through the origin, tangent to the
//!   real axis (see [`Loop`]);
//! * the signed edge-mode count `n_b` along a path hugging the real axis;
//! * the asymptotic winding `w_∞` along the dual-variable arc `Γ_δ(λ)`.
//!
//! All three are normalised by `1/(2πi)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::BoundaryCondition;
use crate::bulk::{kappa_ev, psi0, psi_inf, ModelParams, Momentum};
use crate::error::{Error, Result};
use crate::linalg::{frob24, golden_min, mul24_v, norm2, norm4};

/// Relative threshold below which `g(kx, κ)` is treated as a pole of `S`.
pub const POLE_TOL: f64 = 1e-14;

/// `g(kx, κ)` for signed real `κ ≠ 0`, together with the norms of the two
/// columns (used for relative pole detection).
fn g_with_scale(p: &ModelParams, bc: &BoundaryCondition, kx: f64, kappa: f64) -> Result<(C64, f64)> {
    let a = bc.at(kx);
    let s0 = psi0(p, Momentum::real(kx, kappa))?;
    let si = psi_inf(p, kx, kappa_ev(p, kx, kappa.abs()))?;
    let u = mul24_v(&a, &s0.lift);
    let v = mul24_v(&a, &si.lift);
    Ok((u[0] * v[1] - u[1] * v[0], norm2(&u) * norm2(&v)))
}

/// `g(kx, κ) = det[A Ψ̂₀(kx, κ), A Ψ̂∞(kx, κ_ev(|κ|))]` for signed `κ ≠ 0`.
pub fn g_value(p: &ModelParams, bc: &BoundaryCondition, kx: f64, kappa_signed: f64) -> Result<C64> {
    g_with_scale(p, bc, kx, kappa_signed).map(|(g, _)| g)
}

/// One evaluation of the scattering amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringPoint {
    /// Longitudinal momentum.
    pub kx: f64,
    /// Incoming transverse momentum `κ > 0`.
    pub kappa: f64,
    /// `g(kx, κ)`.
    pub g_plus: C64,
    /// `g(kx, −κ)`.
    pub g_minus: C64,
    /// `S = −g_minus/g_plus`.
    pub s: C64,
}

/// Full scattering data at `(kx, κ)`.
pub fn scattering_point(p: &ModelParams, bc: &BoundaryCondition, kx: f64, kappa: f64) -> Result<ScatteringPoint> {
    if !(kappa > 0.0) {
        return Err(Error::BranchError(format!("kappa = {kappa} must be positive")));
    }
    let (gp, sp) = g_with_scale(p, bc, kx, kappa)?;
    if !(gp.norm() > POLE_TOL * sp) {
        return removable_limit(p, bc, kx, kappa, gp);
    }
    let gm = g_value(p, bc, kx, -kappa)?;
    Ok(ScatteringPoint { kx, kappa, g_plus: gp, g_minus: gm, s: -gm / gp })
}

/// Where both `g(kx, ±κ)` vanish together, `S` can have a removable
/// singularity: classes 𝔅 and ℭ at `kx = 0`, where `A(kx)` itself drops
/// rank, or any point where rounding cancels `g` at very large momenta.
/// The limit is the normalised mean of the two one-sided values in `kx`,
/// taken a step below the scale `min(κ, 1)` on which `S` varies; when these
/// disagree the point is a genuine pole.
fn removable_limit(p: &ModelParams, bc: &BoundaryCondition, kx: f64, kappa: f64, gp: C64) -> Result<ScatteringPoint> {
    let pole = Error::PoleAtThreshold { kx, kappa };
    let h = 1e-4 * kx.abs().max(1.0) * kappa.min(1.0);
    let side = |x: f64| -> Option<C64> {
        let (g1, sc) = g_with_scale(p, bc, x, kappa).ok()?;
        if !(g1.norm() > POLE_TOL * sc) {
            return None;
        }
        Some(-g_value(p, bc, x, -kappa).ok()? / g1)
    };
    let (Some(a), Some(b)) = (side(kx - h), side(kx + h)) else {
        return Err(pole);
    };
    if (a - b).norm() > 1e-3 {
        return Err(pole);
    }
    let mean = a + b;
    let s = mean / mean.norm();
    Ok(ScatteringPoint { kx, kappa, g_plus: gp, g_minus: -s * gp, s })
}

/// Scattering amplitude `S(kx, κ) = −g(kx, −κ)/g(kx, κ)`, `κ > 0`.
pub fn s_value(p: &ModelParams, bc: &BoundaryCondition, kx: f64, kappa: f64) -> Result<C64> {
    scattering_point(p, bc, kx, kappa).map(|pt| pt.s)
}

/// Options of the argument-increment integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindingOptions {
    /// Number of intervals on the coarsest level.
    pub n0: usize,
    /// Snapping tolerance and level-agreement tolerance.
    pub snap_tol: f64,
    /// Maximum number of doublings.
    pub max_depth: usize,
    /// Required bound on every argument increment.
    pub max_step: f64,
    /// Keep the finest-level samples in the result.
    pub record_trace: bool,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions { n0: 512, snap_tol: 0.1, max_depth: 12, max_step: FRAC_PI_2, record_trace: false }
    }
}

/// One sample of a winding run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    /// Path parameter.
    pub t: f64,
    /// Longitudinal momentum (path image).
    pub kx: f64,
    /// Transverse momentum (path image).
    pub kappa: f64,
    /// Sampled value.
    pub value: C64,
    /// Accumulated argument divided by `2π` up to this sample.
    pub cumulative: f64,
}

/// Per-level record of the integrator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelDiagnostic {
    /// Free-form label (refinement level, `κ`, `(δ, λ)`, ...).
    pub label: String,
    /// Phase integral at this level.
    pub phase_integral: f64,
    /// Largest argument increment at this level.
    pub max_step_arg: f64,
    /// Number of samples.
    pub samples: usize,
}

/// Outcome of a winding computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindingResult {
    /// Total argument change divided by `2π`.
    pub phase_integral: f64,
    /// Nearest integer, set only when the run is converged and within
    /// `snap_tol`.
    pub snapped: Option<i64>,
    /// Per-level (or per-parameter) values.
    pub diagnostics: Vec<LevelDiagnostic>,
    /// Largest argument increment of the accepted level.
    pub max_step_arg: f64,
    /// Finest-level samples when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TracePoint>>,
}

impl WindingResult {
    /// Snapped value or a `NoConvergence` error.
    pub fn value(&self) -> Result<i64> {
        self.snapped.ok_or_else(|| {
            Error::NoConvergence(format!("winding {} did not snap to an integer", self.phase_integral))
        })
    }
}

fn snap(x: f64, tol: f64) -> Option<i64> {
    let n = x.round();
    ((x - n).abs() < tol).then_some(n as i64)
}

/// Winding number of a nonvanishing function along a parametrised path.
///
/// `f` maps a parameter `t ∈ [t0, t1]` to `(kx, κ, value)`; only the value
/// enters the integral, the momenta are kept for traces.  The integrator
/// samples `n0 · 2^L` uniform intervals, sums principal-branch argument
/// increments and doubles the level until every increment is below
/// `max_step` and two consecutive levels agree within `snap_tol`.  For a
/// closed path the increment from the last to the first sample is included.
pub fn winding_along<F>(f: F, t0: f64, t1: f64, closed: bool, opts: &WindingOptions) -> Result<WindingResult>
where
    F: Fn(f64) -> Result<(f64, f64, C64)> + Sync,
{
    let mut diagnostics = Vec::new();
    let mut prev: Option<f64> = None;
    let mut n = opts.n0.max(2);
    let mut values: Vec<(f64, f64, C64)> = Vec::new();
    for level in 0..=opts.max_depth {
        let h = (t1 - t0) / n as f64;
        values = if values.is_empty() {
            (0..=n).into_par_iter().map(|i| f(t0 + i as f64 * h)).collect::<Result<Vec<_>>>()?
        } else {
            // Reuse the previous level; evaluate midpoints only.
            let mids = (0..n / 2)
                .into_par_iter()
                .map(|i| f(t0 + (2 * i + 1) as f64 * h))
                .collect::<Result<Vec<_>>>()?;
            let mut merged = Vec::with_capacity(n + 1);
            for (i, v) in values.iter().enumerate() {
                merged.push(*v);
                if i < mids.len() {
                    merged.push(mids[i]);
                }
            }
            merged
        };
        let (total, max_step) = arg_sum(&values, closed);
        diagnostics.push(LevelDiagnostic {
            label: format!("level {level}"),
            phase_integral: total,
            max_step_arg: max_step,
            samples: values.len(),
        });
        let agrees = prev.is_some_and(|p| (p - total).abs() < opts.snap_tol);
        if max_step < opts.max_step && agrees {
            let trace = opts.record_trace.then(|| build_trace(&values, t0, h, closed));
            return Ok(WindingResult {
                phase_integral: total,
                snapped: snap(total, opts.snap_tol),
                diagnostics,
                max_step_arg: max_step,
                trace,
            });
        }
        prev = Some(total);
        n *= 2;
    }
    Err(Error::NoConvergence(format!(
        "argument sampling did not stabilise after {} doublings: {:?}",
        opts.max_depth,
        diagnostics.iter().map(|d| (d.phase_integral, d.max_step_arg)).collect::<Vec<_>>()
    )))
}

fn arg_sum(values: &[(f64, f64, C64)], closed: bool) -> (f64, f64) {
    let mut total = 0.0;
    let mut max_step: f64 = 0.0;
    let mut step = |a: C64, b: C64| {
        let d = (b / a).arg();
        total += d;
        max_step = max_step.max(d.abs());
    };
    for w in values.windows(2) {
        step(w[0].2, w[1].2);
    }
    if closed && values.len() > 1 {
        step(values[values.len() - 1].2, values[0].2);
    }
    (total / (2.0 * PI), max_step)
}

fn build_trace(values: &[(f64, f64, C64)], t0: f64, h: f64, closed: bool) -> Vec<TracePoint> {
    let mut cum = 0.0;
    let mut out = Vec::with_capacity(values.len() + 1);
    for (i, &(kx, kappa, value)) in values.iter().enumerate() {
        if i > 0 {
            cum += (value / values[i - 1].2).arg() / (2.0 * PI);
        }
        out.push(TracePoint { t: t0 + i as f64 * h, kx, kappa, value, cumulative: cum });
    }
    if closed && values.len() > 1 {
        let (kx, kappa, value) = values[0];
        cum += (value / values[values.len() - 1].2).arg() / (2.0 * PI);
        out.push(TracePoint { t: t0 + values.len() as f64 * h, kx, kappa, value, cumulative: cum });
    }
    out
}

/// Closed loops in the `(kx, κ)` half-plane.
///
/// `S` is smooth and unimodular on the open half-plane `κ > 0`, so a loop
/// contained in it winds zero times.  The Chern number is carried by the
/// origin, where the section regular at infinity has its phase singularity:
/// loops passing through `(0, 0)` tangentially to the real axis, the
/// geometry of the circles `C_δ`, wind `C₊` times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Loop {
    /// Circle of the given radius centred at `(0, radius)`.
    TangentCircle { radius: f64 },
    /// Ellipse with semi-axes `(a, b)` centred at `(0, b)`.
    TangentEllipse { a: f64, b: f64 },
    /// Circle strictly inside the open half-plane (winds zero times).
    Interior { center: (f64, f64), radius: f64 },
}

impl Loop {
    /// Point of the loop at angle `θ ∈ [0, 2π]`, counter-clockwise.
    pub fn point(&self, theta: f64) -> (f64, f64) {
        match *self {
            Loop::TangentCircle { radius } => (radius * theta.sin(), radius * (1.0 - theta.cos())),
            Loop::TangentEllipse { a, b } => (a * theta.sin(), b * (1.0 - theta.cos())),
            Loop::Interior { center, radius } => {
                (center.0 + radius * theta.sin(), center.1 - radius * theta.cos())
            }
        }
    }

    fn touches_origin(&self) -> bool {
        !matches!(self, Loop::Interior { .. })
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Loop::TangentCircle { radius } => radius > 0.0,
            Loop::TangentEllipse { a, b } => a > 0.0 && b > 0.0,
            Loop::Interior { center, radius } => radius > 0.0 && center.1 > radius,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BranchError(format!("loop {self:?} is not admissible")))
        }
    }
}

/// Winding of `S` around a counter-clockwise loop.  For the tangent loops
/// the snapped value is the Chern number `C₊`.
pub fn chern_via_scattering(
    p: &ModelParams,
    bc: &BoundaryCondition,
    lp: &Loop,
    opts: &WindingOptions,
) -> Result<WindingResult> {
    lp.validate()?;
    // The origin itself is excluded; the loop is opened by a tiny angle.
    let eta = if lp.touches_origin() { 1e-7 } else { 0.0 };
    let f = |theta: f64| {
        let (kx, kappa) = lp.point(theta);
        s_value(p, bc, kx, kappa).map(|s| (kx, kappa, s))
    };
    winding_along(f, eta, 2.0 * PI - eta, true, opts)
}

/// Default transverse momenta of the Levinson path.
pub const DEFAULT_KAPPA_SEQ: [f64; 3] = [1e-2, 3e-3, 1e-3];

/// Default Levinson cutoff `K = 3 max(√(m/ε), 10)`.
pub fn default_cutoff(p: &ModelParams) -> f64 {
    3.0 * p.momentum_scale().max(10.0)
}

/// Levinson cutoff matched to an asymptotic winding run.
///
/// On the large tangent circle `Γ_δ(λ)` covers `|kx| ≳ 1/λ`, and its
/// complement near the axis is what the Levinson winding measures.  Using
/// `K = max(default_cutoff, 1/λ_last)` keeps the two windings
/// complementary, so merging points beyond the default window are counted
/// by exactly one of them.
pub fn matched_cutoff(p: &ModelParams, lambda_seq: &[f64]) -> f64 {
    let lam = lambda_seq.last().copied().unwrap_or(f64::INFINITY);
    default_cutoff(p).max(1.0 / lam)
}

/// Height profile of the Levinson path: `κ(kx) = κ_h kx²/(kx² + m²)`.
///
/// The path follows the line `κ = κ_h` away from the origin and touches the
/// real axis tangentially at `kx = 0`, like the complement of `Γ_δ(λ)` on
/// the circle `C_δ`.  A straight line at fixed height would also pick up the
/// phase singularity of the section at `k = 0`, which contributes `−1`.
pub fn levinson_profile(p: &ModelParams, kappa_h: f64, kx: f64) -> f64 {
    kappa_h * kx * kx / (kx * kx + p.m() * p.m())
}

/// One Levinson winding at height `κ_h` over `kx ∈ [−K, K]`.
///
/// Merging points show up as near-zeros of `g` on a coarse uniform grid
/// and are resolved by sampling clustered around them down to `κ_h/100`.
pub fn levinson_winding(
    p: &ModelParams,
    bc: &BoundaryCondition,
    kappa_h: f64,
    cutoff: f64,
    opts: &WindingOptions,
) -> Result<WindingResult> {
    if !(kappa_h > 0.0 && cutoff > 0.0) {
        return Err(Error::BranchError("kappa and cutoff must be positive".into()));
    }
    let n = opts.n0.max((LEVINSON_DENSITY * cutoff).ceil() as usize);
    // Even n keeps kx = 0 (where the path touches the axis) off the grid.
    let n = n + n % 2 + 1;
    let coarse: Vec<f64> = (0..=n).map(|i| -cutoff + 2.0 * cutoff * i as f64 / n as f64).collect();
    let tiny = 1e-9 * cutoff;
    let path = |kx: f64| {
        let kx = if kx.abs() < tiny { tiny.copysign(kx) } else { kx };
        (kx, levinson_profile(p, kappa_h, kx))
    };
    clustered_winding(p, bc, path, &coarse, &[], 1e-2 * kappa_h, opts)
}

/// Coarse samples per unit `kx` on the Levinson path.
const LEVINSON_DENSITY: f64 = 20.0;

/// Relative `|g|` below which a local minimum along a path is treated as a
/// near-zero and gets its own clustered sampling.
pub const DIP_TOL: f64 = 0.05;

/// `|g(kx, κ)|` normalised by `‖A(kx)‖² ‖Ψ̂₀‖ ‖Ψ̂∞‖`, which is independent
/// of the overall growth of the lifted sections.
fn g_relative(p: &ModelParams, bc: &BoundaryCondition, kx: f64, kappa: f64) -> f64 {
    let eval = || -> Result<f64> {
        let a = bc.at(kx);
        let s0 = psi0(p, Momentum::real(kx, kappa))?;
        let si = psi_inf(p, kx, kappa_ev(p, kx, kappa))?;
        let u = mul24_v(&a, &s0.lift);
        let v = mul24_v(&a, &si.lift);
        let scale = frob24(&a).powi(2) * norm4(&s0.lift) * norm4(&si.lift);
        Ok((u[0] * v[1] - u[1] * v[0]).norm() / scale)
    };
    eval().unwrap_or(0.0)
}

/// Winding of `S` along a path `x ↦ (kx, κ)`, `x ∈ [coarse₀, coarse_last]`.
///
/// Where `g` nearly vanishes, `S` can turn by a full period over a window
/// far narrower than any affordable uniform step, and two uniform levels
/// then agree on a wrong value.  The dips of `|g|` that announce these
/// windows are broad, so they are located on the coarse grid and refined by
/// golden-section search.  The path is then cut at the midpoints between
/// the centres (the dips plus `base_centres`), and each piece is sampled as
/// `x = c + σ sinh(v)` with `v` uniform, which resolves every scale down to
/// `σ` around its centre.  Without centres the coarse grid is used directly.
fn clustered_winding<P>(
    p: &ModelParams,
    bc: &BoundaryCondition,
    path: P,
    coarse: &[f64],
    base_centres: &[f64],
    sigma: f64,
    opts: &WindingOptions,
) -> Result<WindingResult>
where
    P: Fn(f64) -> (f64, f64) + Sync,
{
    let (lo, hi) = (coarse[0], coarse[coarse.len() - 1]);
    let rel = |x: f64| {
        let (kx, kappa) = path(x);
        g_relative(p, bc, kx, kappa)
    };
    let vals: Vec<f64> = coarse.par_iter().map(|&x| rel(x)).collect();
    let mut centres = base_centres.to_vec();
    for i in 1..coarse.len() - 1 {
        if vals[i] < DIP_TOL && vals[i] <= vals[i - 1] && vals[i] < vals[i + 1] {
            let (x, _) = golden_min(&rel, coarse[i - 1], coarse[i + 1], 1e-15 * (hi - lo));
            if centres.iter().all(|c| (x - c).abs() > 1e3 * sigma) {
                centres.push(x);
            }
        }
    }
    let eval = |x: f64| {
        let (kx, kappa) = path(x);
        s_value(p, bc, kx, kappa).map(|s| (kx, kappa, s))
    };
    if centres.is_empty() {
        let n = opts.n0.max(coarse.len() - 1);
        let mut r = winding_along(eval, lo, hi, false, &WindingOptions { n0: n, ..*opts })?;
        r.snapped = snap(r.phase_integral, opts.snap_tol);
        return Ok(r);
    }
    centres.sort_by(f64::total_cmp);
    let mut cuts = vec![lo];
    cuts.extend(centres.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    cuts.push(hi);
    let mut total = 0.0;
    let mut max_step: f64 = 0.0;
    let mut diagnostics = Vec::new();
    let mut trace: Option<Vec<TracePoint>> = opts.record_trace.then(Vec::new);
    for (i, &c) in centres.iter().enumerate() {
        for (a, b) in [(cuts[i], c), (c, cuts[i + 1])] {
            let v0 = ((a - c) / sigma).asinh();
            let v1 = ((b - c) / sigma).asinh();
            if v1 - v0 <= 0.0 {
                continue;
            }
            let n = opts.n0.max((100.0 * (v1 - v0)).ceil() as usize);
            let f = |v: f64| eval(c + sigma * v.sinh());
            let r = winding_along(f, v0, v1, false, &WindingOptions { n0: n, ..*opts })?;
            total += r.phase_integral;
            max_step = max_step.max(r.max_step_arg);
            for mut d in r.diagnostics {
                d.label = format!("piece [{a:e}, {b:e}] {}", d.label);
                diagnostics.push(d);
            }
            if let (Some(tr), Some(piece)) = (trace.as_mut(), r.trace) {
                let offset = tr.last().map_or(0.0, |t: &TracePoint| t.cumulative);
                let skip = usize::from(!tr.is_empty());
                tr.extend(piece.into_iter().skip(skip).map(|mut t| {
                    t.t = c + sigma * t.t.sinh();
                    t.cumulative += offset;
                    t
                }));
            }
        }
    }
    Ok(WindingResult { phase_integral: total, snapped: snap(total, opts.snap_tol), diagnostics, max_step_arg: max_step, trace })
}

/// Signed edge-mode count from the change of argument of `S` near the
/// bottom of the upper band, extrapolated over decreasing heights.
///
/// Accepted when the last two heights snap to the same integer.  A pole of
/// `S` on the path (a merging point hit exactly) is retried with `κ`
/// perturbed by ±10 %.
pub fn n_b_levinson(
    p: &ModelParams,
    bc: &BoundaryCondition,
    kappa_seq: &[f64],
    cutoff: f64,
    opts: &WindingOptions,
) -> Result<WindingResult> {
    check_decreasing(kappa_seq, "kappa_seq")?;
    let mut diagnostics = Vec::new();
    let mut runs = Vec::new();
    for &k in kappa_seq {
        let mut res = None;
        for &kk in &[k, 1.1 * k, 0.9 * k] {
            match levinson_winding(p, bc, kk, cutoff, opts) {
                Ok(r) => {
                    res = Some((kk, r));
                    break;
                }
                Err(Error::PoleAtThreshold { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        let (kk, r) = res.ok_or(Error::PoleAtThreshold { kx: f64::NAN, kappa: k })?;
        diagnostics.push(LevelDiagnostic {
            label: format!("kappa {kk:e}"),
            phase_integral: r.phase_integral,
            max_step_arg: r.max_step_arg,
            samples: r.diagnostics.last().map_or(0, |d| d.samples),
        });
        runs.push(r);
    }
    let last = runs.pop().expect("non-empty sequence");
    let snapped = match (runs.last(), snap(last.phase_integral, opts.snap_tol)) {
        (Some(prev), Some(n)) if snap(prev.phase_integral, opts.snap_tol) == Some(n) => Some(n),
        (None, s) => s,
        _ => None,
    };
    Ok(WindingResult {
        phase_integral: last.phase_integral,
        snapped,
        diagnostics,
        max_step_arg: last.max_step_arg,
        trace: last.trace,
    })
}

/// Point of the dual-variable arc `Γ_δ(λ)` at `λx`:
/// `kx = −λx/(λx² + δ²)`, `κ = δ/(λx² + δ²)`.
pub fn dual_point(delta: f64, lambda_x: f64) -> (f64, f64) {
    let den = lambda_x * lambda_x + delta * delta;
    (-lambda_x / den, delta / den)
}

/// Sampled dual path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualPath {
    /// `δ > 0`.
    pub delta: f64,
    /// `λ > 0`.
    pub lambda: f64,
    /// Samples of `λx ∈ [−λ, λ]`.
    pub samples: Vec<f64>,
}

impl DualPath {
    /// Samples `λx = σ sinh(u)` with `u` uniform, `σ = δ³`, which resolves
    /// every dominant scale `λx ~ δ^s`, `s ≤ 3`, with the same relative
    /// accuracy.
    pub fn new(delta: f64, lambda: f64, n: usize) -> Self {
        let sigma = dual_sigma(delta);
        let umax = (lambda / sigma).asinh();
        let samples = (0..=n).map(|i| sigma * (-umax + 2.0 * umax * i as f64 / n as f64).sinh()).collect();
        DualPath { delta, lambda, samples }
    }

    /// Mapped `(kx, κ)` points.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|&l| dual_point(self.delta, l)).collect()
    }
}

fn dual_sigma(delta: f64) -> f64 {
    delta * delta * delta
}

/// Default `δ` sequence of the asymptotic winding.
pub const DEFAULT_DELTA_SEQ: [f64; 3] = [1e-5, 1e-6, 1e-7];
/// Default `λ` sequence of the asymptotic winding.
pub const DEFAULT_LAMBDA_SEQ: [f64; 3] = [0.04, 0.02, 0.01];

/// Winding of `S` along `Γ_δ(λ)` (λx from `−λ` to `λ`).
///
/// The coarse grid is `λx = σ sinh(u)` with `u` uniform and `σ = δ³`, which
/// resolves every dominant scale `λx ~ δ^s`, `s ≤ 3`, with the same relative
/// accuracy; near-zeros of `g` found on it are sampled with the same
/// clustering around their own position.  The trace is parametrised by `λx`.
pub fn dual_winding(
    p: &ModelParams,
    bc: &BoundaryCondition,
    delta: f64,
    lambda: f64,
    opts: &WindingOptions,
) -> Result<WindingResult> {
    if !(delta > 0.0 && lambda > 0.0) {
        return Err(Error::BranchError("delta and lambda must be positive".into()));
    }
    let sigma = dual_sigma(delta);
    let umax = (lambda / sigma).asinh();
    let n = opts.n0.max((200.0 * umax).ceil() as usize);
    let coarse: Vec<f64> = (0..=n).map(|i| sigma * (-umax + 2.0 * umax * i as f64 / n as f64).sinh()).collect();
    clustered_winding(p, bc, |x| dual_point(delta, x), &coarse, &[0.0], sigma, opts)
}

/// Asymptotic winding `w_∞`: the winding along `Γ_δ(λ)` in the limit
/// `δ → 0` then `λ → 0`.
///
/// All pairs of the two sequences are evaluated; the value is accepted when
/// the four runs on the last two `δ` and last two `λ` snap to the same
/// integer.
pub fn w_infinity(
    p: &ModelParams,
    bc: &BoundaryCondition,
    delta_seq: &[f64],
    lambda_seq: &[f64],
    opts: &WindingOptions,
) -> Result<WindingResult> {
    check_decreasing(delta_seq, "delta_seq")?;
    check_decreasing(lambda_seq, "lambda_seq")?;
    let mut diagnostics = Vec::new();
    let mut grid = Vec::new();
    let mut last = None;
    for &lam in lambda_seq {
        for &del in delta_seq {
            let r = dual_winding(p, bc, del, lam, opts)?;
            diagnostics.push(LevelDiagnostic {
                label: format!("delta {del:e} lambda {lam:e}"),
                phase_integral: r.phase_integral,
                max_step_arg: r.max_step_arg,
                samples: r.diagnostics.last().map_or(0, |d| d.samples),
            });
            grid.push((del, lam, r.phase_integral));
            last = Some(r);
        }
    }
    let last = last.expect("non-empty sequences");
    let nd = delta_seq.len();
    let nl = lambda_seq.len();
    let tail = |i: usize, j: usize| grid[i * nd + j].2;
    let mut corner = Vec::new();
    for i in nl.saturating_sub(2)..nl {
        for j in nd.saturating_sub(2)..nd {
            corner.push(snap(tail(i, j), opts.snap_tol));
        }
    }
    let first = corner[0];
    let snapped = if first.is_some() && corner.iter().all(|s| *s == first) { first } else { None };
    Ok(WindingResult {
        phase_integral: last.phase_integral,
        snapped,
        diagnostics,
        max_step_arg: last.max_step_arg,
        trace: last.trace,
    })
}

fn check_decreasing(seq: &[f64], name: &str) -> Result<()> {
    if seq.is_empty() || seq.iter().any(|x| !(*x > 0.0)) || seq.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::BranchError(format!("{name} must be a non-empty strictly decreasing positive sequence")));
    }
    Ok(())
}
