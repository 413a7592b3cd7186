//! Anomaly oracle and the identity `C₊ = n_b + w_∞`.
//!
//! [`predict_w_infinity`] maps a class label to the asymptotic winding
//! predicted by the closed-form anomaly classification, refusing to guess on
//! threshold manifolds.  [`case_study_curves`] returns the dominant
//! asymptotic curves of the worked examples, and [`verify_identity`] runs the
//! three numerical windings and checks them against each other and against
//! the prediction.  [`sweep`] draws random members of every class away from
//! thresholds and aggregates the checks.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::boundary::{classify, make_class, random_gl2, BoundaryCondition, ClassLabel, ClassTag, DEFAULT_TOL};
use crate::bulk::ModelParams;
use crate::error::{Error, Result};
use crate::linalg::{c, r, ZERO};
use crate::scattering::{
    chern_via_scattering, matched_cutoff, n_b_levinson, w_infinity, winding_along, Loop, WindingOptions,
    WindingResult, DEFAULT_DELTA_SEQ, DEFAULT_KAPPA_SEQ, DEFAULT_LAMBDA_SEQ,
};

/// Distance to a critical value below which a prediction is a threshold.
pub const THRESHOLD_MARGIN: f64 = 1e-6;

/// Parameters below this modulus are treated as exactly zero (they carry
/// only classification round-off).
pub const ZERO_TOL: f64 = 1e-10;

/// Predicted asymptotic winding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnomalyValue {
    /// A definite integer in `{−2, …, 2}`.
    Int(i32),
    /// The label lies on a threshold manifold where `w_∞` is not expected to
    /// be well defined.
    Threshold,
    /// The label belongs to a member of class B or C outside the tabulated
    /// family; no prediction is available.
    Unclassified,
}

impl AnomalyValue {
    /// Integer value, if definite.
    pub fn as_int(&self) -> Option<i32> {
        match self {
            AnomalyValue::Int(n) => Some(*n),
            _ => None,
        }
    }
}

impl Serialize for AnomalyValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AnomalyValue::Int(n) => s.serialize_i32(*n),
            AnomalyValue::Threshold => s.serialize_str("threshold"),
            AnomalyValue::Unclassified => s.serialize_str("unclassified"),
        }
    }
}

/// Prediction of `w_∞` with the rule that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnomalyPrediction {
    /// Predicted value.
    pub value: AnomalyValue,
    /// Human-readable statement of the applied rule.
    pub rule: String,
    /// Quantities that decided the rule.
    pub drivers: BTreeMap<String, f64>,
}

impl AnomalyPrediction {
    fn new(value: AnomalyValue, rule: &str) -> Self {
        AnomalyPrediction { value, rule: rule.to_string(), drivers: BTreeMap::new() }
    }

    fn driver(mut self, name: &str, v: f64) -> Self {
        self.drivers.insert(name.to_string(), v);
        self
    }
}

/// `sign`, with `sign(0)` never requested.
fn sign(x: f64) -> i32 {
    if x > 0.0 {
        1
    } else {
        -1
    }
}

/// `sign₀`: like `sign` but sends zero to zero.
fn sign0(x: f64) -> i32 {
    if x.abs() <= ZERO_TOL {
        0
    } else {
        sign(x)
    }
}

/// `B± = β₂(β₁ ± √2) + |b₁₂|²`.
pub fn b_plus_minus(beta1: f64, beta2: f64, b12: C64) -> (f64, f64) {
    let n = b12.norm_sqr();
    (beta2 * (beta1 + SQRT_2) + n, beta2 * (beta1 - SQRT_2) + n)
}

/// Predicted `w_∞` of a classified boundary condition.
pub fn predict_w_infinity(p: &ModelParams, label: &ClassLabel) -> Result<AnomalyPrediction> {
    use AnomalyValue::*;
    let tol = DEFAULT_TOL;
    if !label.is_tabulated() {
        return Ok(AnomalyPrediction::new(Unclassified, "member outside the tabulated family of its class"));
    }
    let pred = match label.tag {
        ClassTag::A12 => AnomalyPrediction::new(Int(0), "A12: 0"),
        ClassTag::A14 => {
            let beta = label.real("beta", tol)?;
            AnomalyPrediction::new(Int(sign0(beta)), "A14: sign0(beta)").driver("beta", beta)
        }
        ClassTag::A23 => {
            let beta = label.real("beta", tol)?;
            let alpha = label.real("alpha", tol)?;
            if beta.abs() > ZERO_TOL {
                AnomalyPrediction::new(Int(-sign(beta)), "A23: -sign(beta) for beta != 0").driver("beta", beta)
            } else {
                let d = (alpha - 1.0 / p.eps()).abs() - 1.0 / SQRT_2;
                let v = if d.abs() < THRESHOLD_MARGIN {
                    Threshold
                } else if d < 0.0 {
                    Int(1)
                } else {
                    Int(0)
                };
                AnomalyPrediction::new(v, "A23, beta = 0: 1 if |alpha - 1/eps| < 1/sqrt2, 0 if > 1/sqrt2")
                    .driver("beta", beta)
                    .driver("|alpha-1/eps|-1/sqrt2", d)
            }
        }
        ClassTag::A24 => {
            let beta = label.real("beta", tol)?;
            let a11 = label.get("a11");
            let q = beta.abs() * a11.norm_sqr() - SQRT_2;
            let v = if q.abs() < THRESHOLD_MARGIN {
                Threshold
            } else if q > 0.0 {
                Int(sign(beta))
            } else {
                Int(0)
            };
            AnomalyPrediction::new(v, "A24: sign(beta) if |beta||a11|^2 > sqrt2, 0 if < sqrt2")
                .driver("beta", beta)
                .driver("|beta||a11|^2-sqrt2", q)
        }
        ClassTag::A34 => {
            let beta1 = label.real("beta1", tol)?;
            let beta2 = label.real("beta2", tol)?;
            let b12 = label.get("b12");
            if b12.norm() <= ZERO_TOL {
                let d = beta1 * beta1 - 2.0;
                let v = if d.abs() < THRESHOLD_MARGIN { Threshold } else { Int(sign0(beta2)) };
                AnomalyPrediction::new(v, "A34, b12 = 0: sign0(beta2) if beta1^2 != 2")
                    .driver("beta2", beta2)
                    .driver("beta1^2-2", d)
            } else {
                let (bp, bm) = b_plus_minus(beta1, beta2, b12);
                let (v, rule) = if bp.abs() < THRESHOLD_MARGIN || bm.abs() < THRESHOLD_MARGIN {
                    (Threshold, "A34, b12 != 0: B+ = 0 or B- = 0")
                } else if bp * bm < 0.0 {
                    (Int(sign(bp)), "A34, b12 != 0, B+ B- < 0: sign(B+)")
                } else if bp > 0.0 {
                    (Int(0), "A34, b12 != 0, B+, B- > 0: 0")
                } else {
                    (Int(2 * sign(SQRT_2 - beta1)), "A34, b12 != 0, B+, B- < 0: 2 sign(sqrt2 - beta1)")
                };
                AnomalyPrediction::new(v, rule).driver("B+", bp).driver("B-", bm).driver("beta1", beta1)
            }
        }
        ClassTag::B => AnomalyPrediction::new(Int(0), "B: 0"),
        ClassTag::C => {
            let a2 = label.get("a2");
            let v = if a2.norm() <= ZERO_TOL { 1 } else { 0 };
            AnomalyPrediction::new(Int(v), "C: 1 if a2 = 0, else 0").driver("|a2|", a2.norm())
        }
    };
    Ok(pred)
}

/// The worked examples with closed-form dominant asymptotic curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WorkedExample {
    /// Dirichlet condition (class A12 with `B = 0`).
    Dirichlet,
    /// Class A14 with `α = 0`, `b11 = b21 = 0` and the given `β`;
    /// condition (a) is `β = −1`.
    A14 { beta: f64 },
    /// Condition (b): class A34 with `α1 = α2 = a12 = 1`, `β1 = 4`,
    /// `β2 = −4`, `b12 = −i`.
    ConditionB,
}

impl WorkedExample {
    /// Recognise a worked example from its canonical label.
    pub fn from_label(label: &ClassLabel) -> Result<Self> {
        let close = |name: &str, v: C64| (label.get(name) - v).norm() < 1e-9;
        match label.tag {
            ClassTag::A12 if ["b11", "b12", "b21", "b22"].iter().all(|n| close(n, ZERO)) => Ok(WorkedExample::Dirichlet),
            ClassTag::A14 if close("alpha", ZERO) && close("b11", ZERO) && close("b21", ZERO) => {
                Ok(WorkedExample::A14 { beta: label.get("beta").re })
            }
            ClassTag::A34
                if close("alpha1", r(1.0))
                    && close("alpha2", r(1.0))
                    && close("a12", r(1.0))
                    && close("beta1", r(4.0))
                    && close("beta2", r(-4.0))
                    && close("b12", c(0.0, -1.0)) =>
            {
                Ok(WorkedExample::ConditionB)
            }
            _ => Err(Error::NotAWorkedExample),
        }
    }

    /// `(G₋(u), G₊(u))`.
    pub fn curves(&self, u: f64) -> (C64, C64) {
        let gp = match *self {
            WorkedExample::Dirichlet => r(1.0),
            WorkedExample::A14 { beta } => c(beta * u, 1.0),
            WorkedExample::ConditionB => {
                let s = (2.0 * u * u + 1.0).sqrt();
                c(-15.0 * u * u + 4.0 * u * s, -(s - 4.0 * u))
            }
        };
        (gp.conj(), gp)
    }
}

/// Dominant asymptotic curves `(G₋(u), G₊(u))` of a worked example.
pub fn case_study_curves(label: &ClassLabel, u: f64) -> Result<(C64, C64)> {
    Ok(WorkedExample::from_label(label)?.curves(u))
}

/// Winding of `u ↦ G₋(u)/G₊(u)` over `u ∈ [−U, U]` (sampled uniformly in
/// `asinh u`).
pub fn worked_curve_winding(label: &ClassLabel, u_max: f64, opts: &WindingOptions) -> Result<WindingResult> {
    let ex = WorkedExample::from_label(label)?;
    let t = u_max.asinh();
    let f = |s: f64| {
        let u = s.sinh();
        let (gm, gp) = ex.curves(u);
        Ok((u, 0.0, gm / gp))
    };
    winding_along(f, -t, t, false, opts)
}

/// Settings of [`verify_identity`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Integrator settings shared by the three windings.
    pub winding: WindingOptions,
    /// Loop of the bulk winding.
    pub chern_loop: Loop,
    /// Heights of the Levinson path.
    pub kappa_seq: Vec<f64>,
    /// Levinson cutoff; `None` uses [`matched_cutoff`] for `lambda_seq`.
    pub cutoff: Option<f64>,
    /// `δ` sequence of the asymptotic winding.
    pub delta_seq: Vec<f64>,
    /// `λ` sequence of the asymptotic winding.
    pub lambda_seq: Vec<f64>,
    /// Classification tolerance.
    pub class_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            winding: WindingOptions::default(),
            chern_loop: Loop::TangentCircle { radius: 1.0 },
            kappa_seq: DEFAULT_KAPPA_SEQ.to_vec(),
            cutoff: None,
            delta_seq: DEFAULT_DELTA_SEQ.to_vec(),
            lambda_seq: DEFAULT_LAMBDA_SEQ.to_vec(),
            class_tol: DEFAULT_TOL,
        }
    }
}

/// Outcome of one winding computation inside a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindingOutcome {
    /// Raw phase integral of the finest run, when it finished.
    pub phase_integral: Option<f64>,
    /// Per-level or per-parameter values.
    pub levels: Vec<(String, f64)>,
    /// Error message, when the computation failed.
    pub error: Option<String>,
}

impl WindingOutcome {
    fn from(res: &Result<WindingResult>) -> Self {
        match res {
            Ok(w) => WindingOutcome {
                phase_integral: Some(w.phase_integral),
                levels: w.diagnostics.iter().map(|d| (d.label.clone(), d.phase_integral)).collect(),
                error: w.snapped.is_none().then(|| "did not snap to a stable integer".to_string()),
            },
            Err(e) => WindingOutcome { phase_integral: None, levels: Vec::new(), error: Some(e.to_string()) },
        }
    }
}

/// Diagnostics of an identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityDiagnostics {
    /// Bulk winding.
    pub chern: WindingOutcome,
    /// Levinson winding.
    pub levinson: WindingOutcome,
    /// Asymptotic winding.
    pub w_inf: WindingOutcome,
    /// Applied anomaly rule.
    pub rule: String,
    /// Quantities that decided the rule.
    pub drivers: BTreeMap<String, f64>,
}

/// Result of [`verify_identity`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    /// Class tag.
    pub class: ClassTag,
    /// Canonical class label.
    #[serde(serialize_with = "serialize_params")]
    pub params: ClassLabel,
    /// Bulk Chern number from the scattering loop.
    #[serde(rename = "C_plus")]
    pub c_plus: Option<i64>,
    /// Signed edge-mode count from the Levinson winding.
    pub n_b: Option<i64>,
    /// Asymptotic winding.
    pub w_inf: Option<i64>,
    /// Predicted `w_∞`.
    pub predicted: AnomalyValue,
    /// `C₊ = n_b + w_∞`, and `w_∞` equals a definite prediction.
    pub consistent: bool,
    /// Per-winding details.
    pub diagnostics: IdentityDiagnostics,
}

impl IdentityReport {
    /// All three windings snapped.
    pub fn converged(&self) -> bool {
        self.c_plus.is_some() && self.n_b.is_some() && self.w_inf.is_some()
    }

    /// `C₊ = n_b + w_∞` on snapped values.
    pub fn identity_holds(&self) -> bool {
        matches!((self.c_plus, self.n_b, self.w_inf), (Some(c), Some(n), Some(w)) if c == n + w)
    }

    /// Numerical `w_∞` agrees with a definite prediction.
    pub fn prediction_matches(&self) -> Option<bool> {
        Some(self.predicted.as_int()? as i64 == self.w_inf?)
    }
}

fn serialize_params<S: Serializer>(label: &ClassLabel, s: S) -> std::result::Result<S::Ok, S::Error> {
    let m: BTreeMap<&str, [f64; 2]> = label.params.iter().map(|(k, v)| (k.as_str(), [v.re, v.im])).collect();
    m.serialize(s)
}

/// Predictor signature accepted by [`verify_identity_with`].
pub type Predictor = dyn Fn(&ModelParams, &ClassLabel) -> Result<AnomalyPrediction> + Sync;

/// Run the three windings and compare with the anomaly oracle.
///
/// Classification failures (`NotSelfAdjoint`, `NotRank2`, ...) are returned
/// as errors; failures of the windings are recorded in the report.
pub fn verify_identity(p: &ModelParams, bc: &BoundaryCondition, opts: &VerifyOptions) -> Result<IdentityReport> {
    verify_identity_with(p, bc, opts, &predict_w_infinity)
}

/// [`verify_identity`] with a caller-supplied prediction table.
pub fn verify_identity_with(
    p: &ModelParams,
    bc: &BoundaryCondition,
    opts: &VerifyOptions,
    predictor: &Predictor,
) -> Result<IdentityReport> {
    let label = classify(p, bc, opts.class_tol)?;
    let pred = predictor(p, &label)?;
    let cutoff = opts.cutoff.unwrap_or_else(|| matched_cutoff(p, &opts.lambda_seq));
    let w = &opts.winding;
    let (chern, (lev, winf)) = rayon::join(
        || chern_via_scattering(p, bc, &opts.chern_loop, w),
        || {
            rayon::join(
                || n_b_levinson(p, bc, &opts.kappa_seq, cutoff, w),
                || w_infinity(p, bc, &opts.delta_seq, &opts.lambda_seq, w),
            )
        },
    );
    let snapped = |r: &Result<WindingResult>| r.as_ref().ok().and_then(|w| w.snapped);
    let mut report = IdentityReport {
        class: label.tag,
        params: label,
        c_plus: snapped(&chern),
        n_b: snapped(&lev),
        w_inf: snapped(&winf),
        predicted: pred.value,
        consistent: false,
        diagnostics: IdentityDiagnostics {
            chern: WindingOutcome::from(&chern),
            levinson: WindingOutcome::from(&lev),
            w_inf: WindingOutcome::from(&winf),
            rule: pred.rule,
            drivers: pred.drivers,
        },
    };
    report.consistent = report.identity_holds() && report.prediction_matches().unwrap_or(true);
    Ok(report)
}

/// Margin kept from every threshold manifold when sampling.
pub const SAMPLE_MARGIN: f64 = 0.1;

fn uniform<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    rng.gen_range(a..b)
}

fn cplx<R: Rng + ?Sized>(rng: &mut R, s: f64) -> C64 {
    c(rng.gen_range(-s..s), rng.gen_range(-s..s))
}

/// Nonzero real with `margin ≤ |x| ≤ s`.
fn away_from_zero<R: Rng + ?Sized>(rng: &mut R, s: f64, margin: f64) -> f64 {
    let x = uniform(rng, margin, s);
    if rng.gen_bool(0.5) {
        x
    } else {
        -x
    }
}

/// Random label of the given class, kept `SAMPLE_MARGIN` away from every
/// threshold of the anomaly classification.  Special sub-cases with their
/// own prediction (`β = 0` in A23, `b12 = 0` in A34, `a2 = 0` in C,
/// `α = 0` in B) are drawn with positive probability.
pub fn sample_label<R: Rng + ?Sized>(tag: ClassTag, p: &ModelParams, rng: &mut R) -> ClassLabel {
    let m = SAMPLE_MARGIN;
    let e = p.eps();
    let l = ClassLabel::new(tag);
    match tag {
        ClassTag::A12 => l
            .with("b11", cplx(rng, 2.0))
            .with("b12", cplx(rng, 2.0))
            .with("b21", cplx(rng, 2.0))
            .with("b22", cplx(rng, 2.0)),
        ClassTag::A14 => l
            .with_real("alpha", uniform(rng, -3.0, 3.0))
            .with_real("beta", away_from_zero(rng, 3.0, m))
            .with("b11", cplx(rng, 2.0))
            .with("b21", cplx(rng, 2.0)),
        ClassTag::A23 => {
            let beta = if rng.gen_bool(1.0 / 3.0) { 0.0 } else { away_from_zero(rng, 3.0, m) };
            let alpha = loop {
                let a = 1.0 / e + uniform(rng, -3.0, 3.0);
                if ((a - 1.0 / e).abs() - 1.0 / SQRT_2).abs() >= m {
                    break a;
                }
            };
            l.with_real("alpha", alpha).with_real("beta", beta).with("b12", cplx(rng, 2.0)).with("b22", cplx(rng, 2.0))
        }
        ClassTag::A24 => loop {
            let a11 = cplx(rng, 1.5);
            let beta = away_from_zero(rng, 3.0, m);
            if a11.norm() < 0.3 || (beta.abs() * a11.norm_sqr() - SQRT_2).abs() < m {
                continue;
            }
            break l
                .with("a11", a11)
                .with_real("alpha", uniform(rng, -3.0, 3.0))
                .with_real("beta", beta)
                .with("b11", cplx(rng, 2.0))
                .with("b21", cplx(rng, 2.0));
        },
        ClassTag::A34 => loop {
            let beta1 = uniform(rng, -5.0, 5.0);
            let beta2 = away_from_zero(rng, 5.0, m);
            let b12 = if rng.gen_bool(0.2) { ZERO } else { cplx(rng, 2.0) };
            if b12 == ZERO {
                if (beta1 * beta1 - 2.0).abs() < m {
                    continue;
                }
            } else {
                let (bp, bm) = b_plus_minus(beta1, beta2, b12);
                if b12.norm() < m || bp.abs() < m || bm.abs() < m {
                    continue;
                }
            }
            break l
                .with_real("alpha1", uniform(rng, -3.0, 3.0))
                .with_real("alpha2", uniform(rng, -3.0, 3.0))
                .with("a12", cplx(rng, 2.0))
                .with_real("beta1", beta1)
                .with_real("beta2", beta2)
                .with("b12", b12);
        },
        ClassTag::B => {
            let mu = cplx(rng, 2.0);
            let a2 = cplx(rng, 2.0);
            let alpha = if rng.gen_bool(0.5) { 0.0 } else { away_from_zero(rng, 2.0, m) };
            // α Im μ + ε Re(a1 + a2 μ) = 0 fixes Re a1 when α ≠ 0.
            let im_a1 = uniform(rng, -2.0, 2.0);
            let re_a1 = if alpha == 0.0 { uniform(rng, -2.0, 2.0) } else { -alpha * mu.im / e - (a2 * mu).re };
            l.with("a1", c(re_a1, im_a1)).with("a2", a2).with_real("alpha", alpha).with("mu", mu)
        }
        ClassTag::C => {
            // Table form (A1 row direction (1, 0)): a3 = 0 and Im(a2 a4*) = 0.
            let a2 = if rng.gen_bool(0.5) { ZERO } else { cplx(rng, 2.0) };
            let a4 = if a2 == ZERO {
                let z = cplx(rng, 2.0);
                if z.norm() < m {
                    r(1.0)
                } else {
                    z
                }
            } else {
                a2 * uniform(rng, -2.0, 2.0)
            };
            let mu = loop {
                let z = cplx(rng, 2.0);
                if z.norm() >= m {
                    break z;
                }
            };
            l.with("a1", cplx(rng, 2.0)).with("a2", a2).with("a4", a4).with("mu", mu)
        }
    }
}

/// One sweep sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSample {
    /// Sample index (deterministic order).
    pub index: usize,
    /// Drawn label.
    pub drawn: ClassLabel,
    /// Report, or the error that prevented it.
    pub report: std::result::Result<IdentityReport, String>,
}

/// Per-class aggregate of a sweep.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClassSummary {
    /// Number of samples.
    pub samples: usize,
    /// Samples whose three windings snapped.
    pub convergent: usize,
    /// Convergent samples with a definite prediction equal to `w_∞`.
    pub matched: usize,
    /// Convergent samples with a definite prediction.
    pub predicted: usize,
    /// Convergent samples satisfying `C₊ = n_b + w_∞`.
    pub identity_ok: usize,
}

/// Result of [`sweep`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    /// Samples per class.
    pub samples_per_class: usize,
    /// RNG seed.
    pub seed: u64,
    /// Fraction of convergent, predicted samples whose `w_∞` matches.
    pub match_rate: f64,
    /// Fraction of convergent samples satisfying the identity.
    pub identity_rate: f64,
    /// Every convergent `n_b` lies in `{−1, 0, 1, 2, 3}`.
    pub n_b_in_range: bool,
    /// Per-class aggregates.
    pub classes: BTreeMap<String, ClassSummary>,
    /// Samples that failed to converge, mismatched or broke the identity.
    pub failures: Vec<SweepSample>,
    /// Number of non-convergent samples.
    pub non_convergent: usize,
    /// All samples.
    pub samples: Vec<SweepSample>,
}

/// Draw `n` labels per class (seeded), apply a random `GL₂` transform to
/// each emitted condition and run [`verify_identity`] on it.  Samples are
/// evaluated in parallel and aggregated in index order.
pub fn sweep(p: &ModelParams, n: usize, seed: u64, opts: &VerifyOptions) -> Result<SweepSummary> {
    if n == 0 {
        return Err(Error::InvalidParams("sweep needs at least one sample per class".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::new();
    for tag in ClassTag::ALL {
        for _ in 0..n {
            let label = sample_label(tag, p, &mut rng);
            let g = random_gl2(&mut rng);
            jobs.push((jobs.len(), label, g));
        }
    }
    let samples: Vec<SweepSample> = jobs
        .into_par_iter()
        .map(|(index, drawn, g)| {
            let report = make_class(&drawn, p)
                .map(|bc| bc.transform(&g))
                .and_then(|bc| verify_identity(p, &bc, opts))
                .map_err(|e| e.to_string());
            SweepSample { index, drawn, report }
        })
        .collect();
    let mut classes: BTreeMap<String, ClassSummary> = BTreeMap::new();
    let mut failures = Vec::new();
    let (mut conv, mut pred, mut matched, mut ident) = (0, 0, 0, 0);
    let mut in_range = true;
    let mut non_convergent = 0;
    for s in &samples {
        let cs = classes.entry(s.drawn.tag.to_string()).or_default();
        cs.samples += 1;
        let ok = match &s.report {
            Ok(r) if r.converged() => {
                cs.convergent += 1;
                conv += 1;
                if r.identity_holds() {
                    cs.identity_ok += 1;
                    ident += 1;
                }
                if let Some(m) = r.prediction_matches() {
                    cs.predicted += 1;
                    pred += 1;
                    if m {
                        cs.matched += 1;
                        matched += 1;
                    }
                }
                if !(-1..=3).contains(&r.n_b.unwrap_or(0)) {
                    in_range = false;
                }
                r.consistent
            }
            _ => {
                non_convergent += 1;
                false
            }
        };
        if !ok {
            failures.push(s.clone());
        }
    }
    let rate = |a: usize, b: usize| if b == 0 { 1.0 } else { a as f64 / b as f64 };
    Ok(SweepSummary {
        samples_per_class: n,
        seed,
        match_rate: rate(matched, pred),
        identity_rate: rate(ident, conv),
        n_b_in_range: in_range,
        classes,
        failures,
        non_convergent,
        samples,
    })
}
