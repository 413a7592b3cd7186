//! Bulk model: symbol matrix, upper band, transverse momentum roots,
//! the two eigensections of the upper band and the Chern number.
//!
//! The Hamiltonian symbol is
//!
//! ```text
//! H(k) = [[ m − ε k²,  −kx + i ky ],
//!         [ −kx − i ky, −m + ε k² ]],     k² = kx² + ky²,
//! ```
//!
//! with upper band `ω₊(k) = √(k² + (m − ε k²)²)`.  Two eigensections of the
//! upper band are provided: `psi0`, regular at infinity and with a phase
//! singularity at `k = 0`, and `psi_inf`, regular at the origin.  The latter
//! also admits an evaluation on the evanescent branch `ky = κ_ev ∈ iℝ₊`
//! through a real, positive radicand so that it is single valued there.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, r, Mat2, I};

/// Model parameters `(m, ε)`.
///
/// The standing assumption is `m > 0`, `0 < ε < 1/(2m)`; [`ModelParams::new`]
/// enforces it.  [`ModelParams::new_unchecked`] bypasses the check and exists
/// for sign-flip experiments such as the Chern number at `ε < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    m: f64,
    eps: f64,
}

#[derive(Deserialize)]
struct RawParams {
    m: f64,
    eps: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.m, raw.eps)
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { m: 1.0, eps: 0.1 }
    }
}

impl ModelParams {
    /// Validated constructor.
    pub fn new(m: f64, eps: f64) -> Result<Self> {
        if !(m.is_finite() && eps.is_finite()) {
            return Err(Error::InvalidParams("m and eps must be finite".into()));
        }
        if m <= 0.0 {
            return Err(Error::InvalidParams(format!("m = {m} must be positive")));
        }
        if eps <= 0.0 {
            return Err(Error::InvalidParams(format!("eps = {eps} must be positive")));
        }
        if eps >= 1.0 / (2.0 * m) {
            return Err(Error::InvalidParams(format!(
                "eps = {eps} must be below 1/(2m) = {}",
                1.0 / (2.0 * m)
            )));
        }
        Ok(ModelParams { m, eps })
    }

    /// Constructor without the standing-assumption check.
    pub fn new_unchecked(m: f64, eps: f64) -> Self {
        ModelParams { m, eps }
    }

    /// Mass `m`.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Regulator `ε`.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Natural momentum scale `√(m/|ε|)` where `m − ε k²` changes sign.
    pub fn momentum_scale(&self) -> f64 {
        (self.m / self.eps.abs()).sqrt()
    }
}

/// Momentum `(kx, ky)` with a possibly complex transverse component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Momentum {
    /// Longitudinal momentum along the edge.
    pub kx: f64,
    /// Transverse momentum; real for bulk waves, imaginary for evanescent ones.
    pub ky: C64,
}

impl Momentum {
    /// Real momentum.
    pub fn real(kx: f64, ky: f64) -> Self {
        Momentum { kx, ky: r(ky) }
    }

    /// Momentum with complex transverse component.
    pub fn complex(kx: f64, ky: C64) -> Self {
        Momentum { kx, ky }
    }

    /// `k² = kx² + ky²`, evaluated algebraically (no modulus).
    pub fn k2(&self) -> C64 {
        r(self.kx * self.kx) + self.ky * self.ky
    }
}

/// An upper-band eigenvector together with its boundary-data lift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkSection {
    /// Spinor `ψ`.
    pub psi: [C64; 2],
    /// Boundary data `(ψ, i ky ψ)` of the plane wave `e^{i ky y} ψ`.
    pub lift: [C64; 4],
}

impl BulkSection {
    fn new(psi: [C64; 2], ky: C64) -> Self {
        let d = I * ky;
        BulkSection { psi, lift: [psi[0], psi[1], d * psi[0], d * psi[1]] }
    }
}

/// Symbol matrix `H(k)`, evaluated algebraically for complex `ky`.
pub fn hamiltonian(p: &ModelParams, k: Momentum) -> Mat2 {
    let a = r(p.m) - p.eps * k.k2();
    let kx = r(k.kx);
    [[a, -kx + I * k.ky], [-kx - I * k.ky, -a]]
}

/// Upper band `ω₊(kx, ky) = √(k² + (m − ε k²)²)` at real momentum.
pub fn omega_plus(p: &ModelParams, kx: f64, ky: f64) -> f64 {
    let k2 = kx * kx + ky * ky;
    let a = p.m - p.eps * k2;
    (k2 + a * a).sqrt()
}

/// The four transverse momenta of a bulk energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumRoots {
    /// Positive real root; `±kappa` are the propagating waves.
    pub kappa: f64,
    /// Evanescent root in `iℝ₊`.
    pub kappa_ev: C64,
    /// Divergent root `−kappa_ev`.
    pub kappa_div: C64,
}

impl MomentumRoots {
    /// All four roots `{κ, −κ, κ_ev, κ_div}`.
    pub fn all(&self) -> [C64; 4] {
        [r(self.kappa), r(-self.kappa), self.kappa_ev, self.kappa_div]
    }
}

/// Evanescent root `κ_ev = i √(κ² + 2kx² + (1 − 2εm)/ε²)` at the energy
/// `ω₊(kx, κ)`.
pub fn kappa_ev(p: &ModelParams, kx: f64, kappa: f64) -> C64 {
    let s = (kappa * kappa + 2.0 * kx * kx + (1.0 - 2.0 * p.eps * p.m) / (p.eps * p.eps)).sqrt();
    c(0.0, s)
}

/// Determinant `det(H(kx, q) − ω)` as a polynomial in complex `q`.
pub fn characteristic(p: &ModelParams, kx: f64, q: C64, omega: f64) -> C64 {
    let k2 = r(kx * kx) + q * q;
    let a = r(p.m) - p.eps * k2;
    // det [[a − ω, −kx + iq], [−kx − iq, −a − ω]] = ω² − a² − k².
    r(omega * omega) - a * a - k2
}

/// Solve `ω₊(kx, ky) = ω` for the four transverse momenta.
///
/// The dispersion relation is the biquadratic
/// `ε² t² + (1 − 2εm) t + (m² − ω²) = 0` in `t = kx² + ky²`.
pub fn momentum_roots(p: &ModelParams, kx: f64, omega: f64) -> Result<MomentumRoots> {
    let edge = omega_plus(p, kx, 0.0);
    if !(omega > edge * (1.0 + 1e-13)) {
        return Err(Error::OutsideBulkBand { kx, omega, edge });
    }
    let e2 = p.eps * p.eps;
    let b = 1.0 - 2.0 * p.eps * p.m;
    let cc = p.m * p.m - omega * omega;
    let sq = (b * b - 4.0 * e2 * cc).sqrt();
    // Negative root t₋ of the biquadratic (the positive one is not needed).
    let t_minus = -(b + sq) / (2.0 * e2);
    // κ² = t₊ − kx² without cancellation, from
    // ω² − ω₊(kx,0)² = ε² (t₊ − kx²)(kx² − t₋).
    let kappa2 = (omega - edge) * (omega + edge) / (e2 * (kx * kx - t_minus));
    let kappa = kappa2.max(0.0).sqrt();
    let ev = c(0.0, (kx * kx - t_minus).sqrt());
    Ok(MomentumRoots { kappa, kappa_ev: ev, kappa_div: -ev })
}

/// Section regular at infinity,
/// `ψ₀ = (1/√(2(1−q))) ((kx − i ky)/ω₊, q − 1)` with `q = (m − εk²)/ω₊`.
///
/// Defined for real momenta; `1 − q` is evaluated without cancellation.
pub fn psi0(p: &ModelParams, k: Momentum) -> Result<BulkSection> {
    if k.ky.im != 0.0 {
        return Err(Error::BranchError("psi0 is only defined for real momenta".into()));
    }
    let (kx, ky) = (k.kx, k.ky.re);
    let kk = kx.hypot(ky);
    if kk < f64::MIN_POSITIVE {
        return Err(Error::SingularAtOrigin);
    }
    let a = p.m - p.eps * kk * kk;
    let w = omega_plus(p, kx, ky);
    let phase = c(kx, -ky) / kk;
    let psi = if a >= 0.0 {
        [phase * ((w + a) / (2.0 * w)).sqrt(), r(-kk / (2.0 * w * (w + a)).sqrt())]
    } else {
        [c(kx, -ky) / (2.0 * w * (w - a)).sqrt(), r(-((w - a) / (2.0 * w)).sqrt())]
    };
    Ok(BulkSection::new(psi, k.ky))
}

/// Section regular at the origin, `ψ∞ = ((kx + i ky)/k) ψ₀` on real momenta.
///
/// For purely imaginary `ky` with `k̃² = kx² + ky² < 0` (the evanescent
/// branch) the section is evaluated through the real positive radicand
/// `−k̃² (q̃ − 1)`:
///
/// ```text
/// ψ∞ = (k̃²/ω̃, (kx + i ky)(q̃ − 1)) / (√2 X),   X = −√(−k̃² (q̃ − 1)),
/// ```
///
/// where `ω̃ = √(k̃² + (m − εk̃²)²)` and `q̃ − 1 = −k̃²/(ω̃ (ω̃ + m − εk̃²))`.
/// The sign of `X` makes the large-momentum limit `(1, 0)`.
pub fn psi_inf(p: &ModelParams, kx: f64, ky: C64) -> Result<BulkSection> {
    if ky.im == 0.0 {
        let ky_r = ky.re;
        let kk = kx.hypot(ky_r);
        let a = p.m - p.eps * kk * kk;
        let w = omega_plus(p, kx, ky_r);
        let psi = if a >= 0.0 {
            [r(((w + a) / (2.0 * w)).sqrt()), -c(kx, ky_r) / (2.0 * w * (w + a)).sqrt()]
        } else {
            let phase = c(kx, ky_r) / kk;
            [r(kk / (2.0 * w * (w - a)).sqrt()), -phase * ((w - a) / (2.0 * w)).sqrt()]
        };
        return Ok(BulkSection::new(psi, ky));
    }
    if ky.re != 0.0 {
        return Err(Error::BranchError(format!(
            "psi_inf needs a real or purely imaginary ky, got {ky}"
        )));
    }
    let s = ky.im;
    let kt2 = kx * kx - s * s;
    if kt2 >= 0.0 {
        return Err(Error::BranchError(format!(
            "imaginary ky = {ky} does not give a negative k̃² at kx = {kx}"
        )));
    }
    let a = p.m - p.eps * kt2;
    let w2 = kt2 + a * a;
    if w2 <= 0.0 || a <= 0.0 {
        return Err(Error::BranchError("no positive upper-band energy on this branch".into()));
    }
    let w = w2.sqrt();
    let qm1 = -kt2 / (w * (a + w));
    if qm1 <= 0.0 {
        return Err(Error::BranchError("q̃ ≤ 1".into()));
    }
    let x = -(-kt2 * qm1).sqrt();
    let norm = std::f64::consts::SQRT_2 * x;
    // kx + i ky = kx − s for ky = i s.
    let psi = [r(kt2 / w / norm), r((kx - s) * qm1 / norm)];
    Ok(BulkSection::new(psi, ky))
}

/// Energy band selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Band {
    /// Upper band `+ω₊`.
    Plus,
    /// Lower band `−ω₊`.
    Minus,
}

/// Outcome of the Chern-number quadrature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChernResult {
    /// Snapped integer.
    pub value: i32,
    /// Raw value of the degree integral at the finest level.
    pub integral: f64,
    /// `(grid size, integral)` per refinement level.
    pub levels: Vec<(usize, f64)>,
}

/// Pauli vector `d(k)` with `H = d·σ` and its two partial derivatives.
fn pauli_vector(p: &ModelParams, kx: f64, ky: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let k2 = kx * kx + ky * ky;
    let d = [-kx, -ky, p.m - p.eps * k2];
    let dx = [-1.0, 0.0, -2.0 * p.eps * kx];
    let dy = [0.0, -1.0, -2.0 * p.eps * ky];
    (d, dx, dy)
}

/// Degree density `ê·(∂ₓê × ∂ᵧê) = d·(∂ₓd × ∂ᵧd)/|d|³`.
pub fn degree_density(p: &ModelParams, kx: f64, ky: f64) -> f64 {
    let (d, a, b) = pauli_vector(p, kx, ky);
    let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let dot = d[0] * cross[0] + d[1] * cross[1] + d[2] * cross[2];
    let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    dot / (n * n * n)
}

/// Midpoint-rule value of `(1/4π) ∫ ê·(∂ₓê × ∂ᵧê)` on an `n × n` polar grid
/// for each chart: the disk `|k| ≤ R` and its inverted image `k = 1/z`,
/// `|z| ≤ 1/R`, with Jacobian `|z|⁻⁴`.
fn degree_integral(p: &ModelParams, n: usize) -> f64 {
    let big_r = p.momentum_scale();
    let dth = 2.0 * std::f64::consts::PI / n as f64;
    let mut total = 0.0;
    // Inner chart.
    let dr = big_r / n as f64;
    for i in 0..n {
        let rad = (i as f64 + 0.5) * dr;
        let mut ring = 0.0;
        for j in 0..n {
            let th = (j as f64 + 0.5) * dth;
            ring += degree_density(p, rad * th.cos(), rad * th.sin());
        }
        total += ring * rad * dr * dth;
    }
    // Outer chart through k = 1/z = (zx, −zy)/|z|².
    let dz = 1.0 / (big_r * n as f64);
    for i in 0..n {
        let rz = (i as f64 + 0.5) * dz;
        let mut ring = 0.0;
        for j in 0..n {
            let th = (j as f64 + 0.5) * dth;
            let (zx, zy) = (rz * th.cos(), rz * th.sin());
            let inv = 1.0 / (rz * rz);
            ring += degree_density(p, zx * inv, -zy * inv) * inv * inv;
        }
        total += ring * rz * dz * dth;
    }
    total / (4.0 * std::f64::consts::PI)
}

/// Chern number of the selected band as the degree of `ê = d/|d|`.
///
/// Grids are doubled until two consecutive levels snap to the same integer
/// with residual below 0.01.
pub fn chern(p: &ModelParams, band: Band) -> Result<ChernResult> {
    let sign = match band {
        Band::Plus => 1,
        Band::Minus => -1,
    };
    let mut levels = Vec::new();
    let mut n = 32;
    while n <= 4096 {
        let val = degree_integral(p, n);
        levels.push((n, sign as f64 * val));
        if levels.len() >= 2 {
            let prev = levels[levels.len() - 2].1;
            let cur = sign as f64 * val;
            if prev.round() == cur.round() && (cur - cur.round()).abs() < 0.01 {
                return Ok(ChernResult { value: cur.round() as i32, integral: cur, levels });
            }
        }
        n *= 2;
    }
    Err(Error::NoConvergence(format!("Chern quadrature did not stabilise: {levels:?}")))
}

/// Helper for tests and callers: residual `‖(H − ω) ψ‖` of a section.
pub fn eigen_residual(p: &ModelParams, k: Momentum, omega: f64, psi: &[C64; 2]) -> f64 {
    let h = hamiltonian(p, k);
    let mut res = 0.0;
    for i in 0..2 {
        let v = h[i][0] * psi[0] + h[i][1] * psi[1] - omega * psi[i];
        res += v.norm_sqr();
    }
    res.sqrt()
}

/// Algebraic upper-band energy `√(k² + (m − εk²)²)` for a momentum whose
/// `k²` is real (real or purely imaginary `ky`).
pub fn omega_algebraic(p: &ModelParams, k: Momentum) -> f64 {
    let k2 = k.k2().re;
    let a = p.m - p.eps * k2;
    (k2 + a * a).sqrt()
}
