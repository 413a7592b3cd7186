//! Local boundary conditions `A Ψ|_{y=0} = 0` with `A = A0 + i kx A1`.
//!
//! This module provides the symplectic form `Ω` of the boundary data, the
//! self-adjointness predicate `A Ω⁻¹ A* = 0`, numerical ranks, the
//! Schubert-cell classification into the seven classes
//! `A12, A14, A23, A24, A34, B, C` with canonical parameters, constructors
//! emitting the canonical matrices of each class and an equivalence test
//! modulo the left `GL₂` action.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bulk::ModelParams;
use crate::error::{Error, Result};
use crate::linalg::{
    self, add2, adj2, c, det2, eye2, inv2, max_abs2, max_abs24, minor24, mul2, mul2_24, r, zeros24,
    Mat2, Mat24, Mat4, I, ONE, ZERO,
};

/// Default relative tolerance for rank decisions and constraint checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative singular-value threshold of [`BoundaryCondition::rank_deficient_at`].
pub const RANK_DROP_TOL: f64 = 1e-8;

/// Probe values of `kx` used wherever a generic `kx` is needed.
pub const PROBE_KX: [f64; 3] = [0.371_293_4, -1.913_572_1, 2.734_118_9];

/// A pair `(A0, A1)` of 2×4 matrices with `A1 = [B | 0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCondition {
    a0: Mat24,
    a1: Mat24,
}

impl BoundaryCondition {
    /// Build a boundary condition; the right 2×2 block of `a1` must vanish.
    pub fn new(a0: Mat24, a1: Mat24) -> Result<Self> {
        for row in &a1 {
            if row[2] != ZERO || row[3] != ZERO {
                return Err(Error::MalformedBoundary(
                    "the right 2x2 block of A1 must be exactly zero".into(),
                ));
            }
        }
        if a0.iter().chain(a1.iter()).flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::MalformedBoundary("non-finite entry".into()));
        }
        Ok(BoundaryCondition { a0, a1 })
    }

    /// `A0`.
    pub fn a0(&self) -> &Mat24 {
        &self.a0
    }

    /// `A1`.
    pub fn a1(&self) -> &Mat24 {
        &self.a1
    }

    /// Whether `A(kx)` drops rank at this `kx`, relative to its largest
    /// singular value.  Rank-2 conditions do so at finitely many points
    /// at most (class 𝔅 and ℭ members at `kx = 0`, for instance).
    pub fn rank_deficient_at(&self, kx: f64) -> bool {
        let (s1, s2) = linalg::singular_values24(&self.at(kx));
        !(s2 > RANK_DROP_TOL * s1)
    }

    /// `A(kx) = A0 + i kx A1`.
    pub fn at(&self, kx: f64) -> Mat24 {
        let mut out = self.a0;
        let f = c(0.0, kx);
        for i in 0..2 {
            for j in 0..4 {
                out[i][j] += f * self.a1[i][j];
            }
        }
        out
    }

    /// Left action `(A0, A1) ↦ (G A0, G A1)`.
    pub fn transform(&self, g: &Mat2) -> Self {
        BoundaryCondition { a0: mul2_24(g, &self.a0), a1: mul2_24(g, &self.a1) }
    }

    /// Dirichlet condition `ψ(0) = 0`: `A0 = [I | 0]`, `A1 = 0`.
    pub fn dirichlet() -> Self {
        let mut a0 = zeros24();
        a0[0][0] = ONE;
        a0[1][1] = ONE;
        BoundaryCondition { a0, a1: zeros24() }
    }

    /// Worked condition (a): `ψ₁ = 0`, `∂ψ₂ + kx ψ₂ = 0`.
    pub fn condition_a() -> Self {
        Self::condition_a_signed(-1.0)
    }

    /// Condition (a) with `+i` in place of `−i` in `A1` (no edge modes).
    pub fn condition_a_plus() -> Self {
        Self::condition_a_signed(1.0)
    }

    fn condition_a_signed(s: f64) -> Self {
        let mut a0 = zeros24();
        a0[0][0] = ONE;
        a0[1][3] = ONE;
        let mut a1 = zeros24();
        a1[1][1] = c(0.0, s);
        BoundaryCondition { a0, a1 }
    }

    /// Worked condition (b), a member of class `A34` at `ε = 0.1`.
    pub fn condition_b() -> Self {
        let a0 = [[r(1.0), r(1.0), r(1.0), ZERO], [r(9.0), r(1.0), ZERO, r(1.0)]];
        let a1 = [[c(0.0, 4.0), c(0.0, -1.0), ZERO, ZERO], [c(0.0, 1.0), c(0.0, -4.0), ZERO, ZERO]];
        BoundaryCondition { a0, a1 }
    }
}

/// Wire format: `{"A0": [[[re,im] ×4] ×2], "A1": ...}`.
#[derive(Serialize, Deserialize)]
struct RawBoundary {
    #[serde(rename = "A0")]
    a0: [[[f64; 2]; 4]; 2],
    #[serde(rename = "A1")]
    a1: [[[f64; 2]; 4]; 2],
}

fn to_raw(m: &Mat24) -> [[[f64; 2]; 4]; 2] {
    let mut out = [[[0.0; 2]; 4]; 2];
    for i in 0..2 {
        for j in 0..4 {
            out[i][j] = [m[i][j].re, m[i][j].im];
        }
    }
    out
}

fn from_raw(m: &[[[f64; 2]; 4]; 2]) -> Mat24 {
    let mut out = zeros24();
    for i in 0..2 {
        for j in 0..4 {
            out[i][j] = c(m[i][j][0], m[i][j][1]);
        }
    }
    out
}

impl Serialize for BoundaryCondition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawBoundary { a0: to_raw(&self.a0), a1: to_raw(&self.a1) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundaryCondition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawBoundary::deserialize(d)?;
        BoundaryCondition::new(from_raw(&raw.a0), from_raw(&raw.a1)).map_err(serde::de::Error::custom)
    }
}

/// Symplectic form of the boundary data and its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticForm {
    /// `Ω`.
    pub omega: Mat4,
    /// `Ω⁻¹`.
    pub omega_inv: Mat4,
}

impl SymplecticForm {
    /// Form associated with the model parameters.
    pub fn new(p: &ModelParams) -> Self {
        let e = p.eps();
        let z = ZERO;
        let omega = [
            [z, ONE, r(e), z],
            [-ONE, z, z, r(-e)],
            [r(-e), z, z, z],
            [z, r(e), z, z],
        ];
        let s = 1.0 / (e * e);
        let omega_inv = [
            [z, z, r(-e * s), z],
            [z, z, z, r(e * s)],
            [r(e * s), z, z, r(-s)],
            [z, r(-e * s), r(s), z],
        ];
        SymplecticForm { omega, omega_inv }
    }
}

fn blocks(m: &Mat24) -> (Mat2, Mat2) {
    ([[m[0][0], m[0][1]], [m[1][0], m[1][1]]], [[m[0][2], m[0][3]], [m[1][2], m[1][3]]])
}

/// The two `kx`-independent relations whose vanishing is equivalent to
/// `A(kx) Ω⁻¹ A(kx)* = 0` for all real `kx`:
///
/// ```text
/// R0 = −A0' Ω1 A2* + A2 Ω1 A0'* + A2 Ω2 A2*,     R1 = B Ω1 A2* + A2 Ω1 B*,
/// ```
///
/// where `A0 = [A0' | A2]`, `A1 = [B | 0]`, `Ω1 = diag(ε, −ε)` and
/// `Ω2 = [[0, −1], [1, 0]]`.
pub fn sa_relations(p: &ModelParams, bc: &BoundaryCondition) -> (Mat2, Mat2) {
    let e = p.eps();
    let o1 = [[r(e), ZERO], [ZERO, r(-e)]];
    let o2 = [[ZERO, -ONE], [ONE, ZERO]];
    let (a0l, a2) = blocks(&bc.a0);
    let (b, _) = blocks(&bc.a1);
    let a2s = adj2(&a2);
    let t1 = mul2(&mul2(&a0l, &o1), &a2s);
    let t2 = mul2(&mul2(&a2, &o1), &adj2(&a0l));
    let t3 = mul2(&mul2(&a2, &o2), &a2s);
    let mut r0 = add2(&t2, &t3);
    for i in 0..2 {
        for j in 0..2 {
            r0[i][j] -= t1[i][j];
        }
    }
    let u1 = mul2(&mul2(&b, &o1), &a2s);
    let u2 = mul2(&mul2(&a2, &o1), &adj2(&b));
    (r0, add2(&u1, &u2))
}

/// Scale used to make the self-adjointness residual relative.
fn sa_scale(p: &ModelParams, bc: &BoundaryCondition) -> f64 {
    let s = max_abs24(&bc.a0).max(max_abs24(&bc.a1)).max(1e-300);
    s * s * p.eps().max(1.0)
}

/// Largest entry of the two self-adjointness relations.
pub fn sa_residual(p: &ModelParams, bc: &BoundaryCondition) -> f64 {
    let (r0, r1) = sa_relations(p, bc);
    max_abs2(&r0).max(max_abs2(&r1))
}

/// Largest entry of `A(kx) Ω⁻¹ A(kx)*`, scaled by `ε²`, evaluated directly.
pub fn sa_residual_at(p: &ModelParams, bc: &BoundaryCondition, kx: f64) -> f64 {
    let form = SymplecticForm::new(p);
    let m = linalg::sandwich24(&bc.at(kx), &form.omega_inv);
    max_abs2(&m) * p.eps() * p.eps()
}

/// Self-adjointness predicate `A Ω⁻¹ A* = 0` for every `kx`.
///
/// `tol` is relative to `max(|A|)² · max(ε, 1)`.
pub fn is_self_adjoint(p: &ModelParams, bc: &BoundaryCondition, tol: f64) -> bool {
    sa_residual(p, bc) <= tol * sa_scale(p, bc)
}

/// Numerical rank of a 2×4 matrix: singular values below `tol · σ_max`
/// count as zero.
pub fn rank_2x4(m: &Mat24, tol: f64) -> usize {
    let (smax, smin) = linalg::singular_values24(m);
    if smax == 0.0 {
        0
    } else if smin <= tol * smax {
        1
    } else {
        2
    }
}

/// The seven classes of self-adjoint local boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    A12,
    A14,
    A23,
    A24,
    A34,
    B,
    C,
}

impl ClassTag {
    /// All tags in table order.
    pub const ALL: [ClassTag; 7] =
        [ClassTag::A12, ClassTag::A14, ClassTag::A23, ClassTag::A24, ClassTag::A34, ClassTag::B, ClassTag::C];

    /// Canonical name.
    pub fn name(&self) -> &'static str {
        match self {
            ClassTag::A12 => "A12",
            ClassTag::A14 => "A14",
            ClassTag::A23 => "A23",
            ClassTag::A24 => "A24",
            ClassTag::A34 => "A34",
            ClassTag::B => "B",
            ClassTag::C => "C",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ClassTag::ALL
            .iter()
            .copied()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownClass(s.to_string()))
    }
}

/// Class tag plus canonical parameters.
///
/// Real parameters (`alpha`, `beta`, ...) are stored as complex numbers with
/// zero imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassLabel {
    /// Class.
    pub tag: ClassTag,
    /// Named parameters.
    pub params: BTreeMap<String, C64>,
}

#[derive(Serialize, Deserialize)]
struct RawLabel {
    tag: String,
    params: BTreeMap<String, [f64; 2]>,
}

impl Serialize for ClassLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawLabel {
            tag: self.tag.name().to_string(),
            params: self.params.iter().map(|(k, v)| (k.clone(), [v.re, v.im])).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClassLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawLabel::deserialize(d)?;
        let tag = raw.tag.parse().map_err(serde::de::Error::custom)?;
        Ok(ClassLabel { tag, params: raw.params.into_iter().map(|(k, v)| (k, c(v[0], v[1]))).collect() })
    }
}

impl ClassLabel {
    /// Empty label of the given class.
    pub fn new(tag: ClassTag) -> Self {
        ClassLabel { tag, params: BTreeMap::new() }
    }

    /// Builder-style parameter insertion.
    pub fn with(mut self, name: &str, value: C64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    /// Builder-style real parameter insertion.
    pub fn with_real(self, name: &str, value: f64) -> Self {
        self.with(name, r(value))
    }

    /// Complex parameter, zero when absent.
    pub fn get(&self, name: &str) -> C64 {
        self.params.get(name).copied().unwrap_or(ZERO)
    }

    /// Complex parameter, `default` when absent.
    pub fn get_or(&self, name: &str, default: C64) -> C64 {
        self.params.get(name).copied().unwrap_or(default)
    }

    /// Real parameter; errors when the stored value has an imaginary part.
    pub fn real(&self, name: &str, tol: f64) -> Result<f64> {
        let v = self.get(name);
        if v.im.abs() > tol * (1.0 + v.re.abs()) {
            return Err(Error::ConstraintViolation(format!("parameter `{name}` must be real, got {v}")));
        }
        Ok(v.re)
    }

    /// Whether the label belongs to the family tabulated in the anomaly
    /// classification (the optional extension parameters are at their
    /// table values).
    pub fn is_tabulated(&self) -> bool {
        match self.tag {
            ClassTag::B => self.get_or("nu", ONE) != ZERO,
            ClassTag::C => self.get("w2") == ZERO && self.get_or("w1", ONE) != ZERO,
            _ => true,
        }
    }
}

fn allowed_params(tag: ClassTag) -> &'static [&'static str] {
    match tag {
        ClassTag::A12 => &["b11", "b12", "b21", "b22"],
        ClassTag::A14 => &["alpha", "beta", "b11", "b21"],
        ClassTag::A23 => &["alpha", "beta", "b12", "b22"],
        ClassTag::A24 => &["a11", "alpha", "beta", "b11", "b21"],
        ClassTag::A34 => &["alpha1", "alpha2", "a12", "beta1", "beta2", "b12"],
        ClassTag::B => &["a1", "a2", "alpha", "mu", "nu"],
        ClassTag::C => &["a1", "a2", "a3", "a4", "mu", "w1", "w2"],
    }
}

/// Emit the canonical matrices of a class.
///
/// | class | `A0` | `A1` |
/// |---|---|---|
/// | A12 | `[I | 0]` | `[B | 0]` |
/// | A14 | `[[1,0,0,0],[0,α,0,1]]` | `[[b11,0,0,0],[b21,iβ,0,0]]` |
/// | A23 | `[[0,1,0,0],[α,0,1,0]]` | `[[0,b12,0,0],[iβ,b22,0,0]]` |
/// | A24 | `[[a11,1,0,0],[αa11+ε⁻¹,0,1/a11*,1]]` | `[[b11,b11/a11,0,0],[b21,b21/a11+iβ,0,0]]` |
/// | A34 | `[[α1,a12,1,0],[ε⁻¹−a12*,α2,0,1]]` | `[[iβ1,b12,0,0],[b12*,iβ2,0,0]]` |
/// | B | `[ν r ; μ r]`, `r = (a1, a2, iαν*, −iαμ*)` | `[I | 0]` |
/// | C | `[r ; μ r]`, `r = (a1, a2, a3, a4)` | `[[w1,w2,0,0],[0,0,0,0]]` |
///
/// Constraints (validated): real `α, β, α1, α2, β1, β2`; A24 needs
/// `a11 ≠ 0`; B needs `α (α Im(ν* μ) + ε Re(ν a1 + μ a2)) = 0` and
/// `(ν, μ) ≠ 0`; C needs `μ ≠ 0`, `(w1, w2) ≠ 0`, `w1 a3* = w2 a4*`,
/// `Im(a4 a3*) = ε Im(a1 a3* − a2 a4*)` and a rank-2 pencil.  The optional
/// parameters `nu` (default 1), `w1` (default 1), `w2` and `a3` (default 0)
/// extend the B and C rows to members whose `A1`/`A0` row direction is not
/// reachable from the table form.
pub fn make_class(label: &ClassLabel, p: &ModelParams) -> Result<BoundaryCondition> {
    let tol = DEFAULT_TOL;
    for key in label.params.keys() {
        if !allowed_params(label.tag).contains(&key.as_str()) {
            return Err(Error::ConstraintViolation(format!(
                "unknown parameter `{key}` for class {}",
                label.tag
            )));
        }
    }
    let e = p.eps();
    let g = |n: &str| label.get(n);
    let re = |n: &str| label.real(n, tol);
    let mut a0 = zeros24();
    let mut a1 = zeros24();
    match label.tag {
        ClassTag::A12 => {
            a0[0][0] = ONE;
            a0[1][1] = ONE;
            a1[0][0] = g("b11");
            a1[0][1] = g("b12");
            a1[1][0] = g("b21");
            a1[1][1] = g("b22");
        }
        ClassTag::A14 => {
            let (alpha, beta) = (re("alpha")?, re("beta")?);
            a0[0][0] = ONE;
            a0[1][1] = r(alpha);
            a0[1][3] = ONE;
            a1[0][0] = g("b11");
            a1[1][0] = g("b21");
            a1[1][1] = c(0.0, beta);
        }
        ClassTag::A23 => {
            let (alpha, beta) = (re("alpha")?, re("beta")?);
            a0[0][1] = ONE;
            a0[1][0] = r(alpha);
            a0[1][2] = ONE;
            a1[0][1] = g("b12");
            a1[1][0] = c(0.0, beta);
            a1[1][1] = g("b22");
        }
        ClassTag::A24 => {
            let (alpha, beta) = (re("alpha")?, re("beta")?);
            let a11 = g("a11");
            if a11.norm() <= tol {
                return Err(Error::ConstraintViolation("A24 requires a11 != 0".into()));
            }
            let (b11, b21) = (g("b11"), g("b21"));
            a0[0][0] = a11;
            a0[0][1] = ONE;
            a0[1][0] = alpha * a11 + 1.0 / e;
            a0[1][2] = ONE / a11.conj();
            a0[1][3] = ONE;
            a1[0][0] = b11;
            a1[0][1] = b11 / a11;
            a1[1][0] = b21;
            a1[1][1] = b21 / a11 + c(0.0, beta);
        }
        ClassTag::A34 => {
            let (al1, al2, be1, be2) = (re("alpha1")?, re("alpha2")?, re("beta1")?, re("beta2")?);
            let (a12, b12) = (g("a12"), g("b12"));
            a0[0] = [r(al1), a12, ONE, ZERO];
            a0[1] = [1.0 / e - a12.conj(), r(al2), ZERO, ONE];
            a1[0][0] = c(0.0, be1);
            a1[0][1] = b12;
            a1[1][0] = b12.conj();
            a1[1][1] = c(0.0, be2);
        }
        ClassTag::B => {
            let alpha = re("alpha")?;
            let (a1p, a2p, mu) = (g("a1"), g("a2"), g("mu"));
            let nu = label.get_or("nu", ONE);
            if nu == ZERO && mu == ZERO {
                return Err(Error::ConstraintViolation("B requires (nu, mu) != 0".into()));
            }
            let cons = alpha * (alpha * (nu.conj() * mu).im + e * (nu * a1p + mu * a2p).re);
            let scale = 1.0 + alpha.abs() * (alpha.abs() + e * (a1p.norm() + a2p.norm())) * (1.0 + mu.norm() + nu.norm());
            if cons.abs() > tol * scale {
                return Err(Error::ConstraintViolation(format!(
                    "B requires alpha (alpha Im(nu* mu) + eps Re(nu a1 + mu a2)) = 0, got {cons:e}"
                )));
            }
            let row = [a1p, a2p, I * alpha * nu.conj(), -I * alpha * mu.conj()];
            for j in 0..4 {
                a0[0][j] = nu * row[j];
                a0[1][j] = mu * row[j];
            }
            a1[0][0] = ONE;
            a1[1][1] = ONE;
        }
        ClassTag::C => {
            let (c1, c2, c3, c4, mu) = (g("a1"), g("a2"), g("a3"), g("a4"), g("mu"));
            let (w1, w2) = (label.get_or("w1", ONE), g("w2"));
            if mu.norm() <= tol {
                return Err(Error::ConstraintViolation("C requires mu != 0".into()));
            }
            if w1 == ZERO && w2 == ZERO {
                return Err(Error::ConstraintViolation("C requires (w1, w2) != 0".into()));
            }
            let scale = 1.0 + c1.norm_sqr() + c2.norm_sqr() + c3.norm_sqr() + c4.norm_sqr();
            let t = w1 * c3.conj() - w2 * c4.conj();
            if t.norm() > tol * scale.sqrt() * (w1.norm() + w2.norm()) {
                return Err(Error::ConstraintViolation("C requires w1 a3* = w2 a4*".into()));
            }
            let im = (c4 * c3.conj()).im - e * (c1 * c3.conj() - c2 * c4.conj()).im;
            if im.abs() > tol * scale {
                return Err(Error::ConstraintViolation(
                    "C requires Im(a4 a3*) = eps Im(a1 a3* - a2 a4*) (table form: Im(a2 a4*) = 0)".into(),
                ));
            }
            let row = [c1, c2, c3, c4];
            for j in 0..4 {
                a0[0][j] = row[j];
                a0[1][j] = mu * row[j];
            }
            a1[0][0] = w1;
            a1[0][1] = w2;
        }
    }
    let bc = BoundaryCondition::new(a0, a1)?;
    if !is_rank2_generic(&bc, tol) {
        return Err(Error::ConstraintViolation(format!(
            "parameters give a pencil of rank < 2 (class {})",
            label.tag
        )));
    }
    Ok(bc)
}

/// Whether `A(kx)` has rank 2 at generic `kx` (checked at the probe values).
pub fn is_rank2_generic(bc: &BoundaryCondition, tol: f64) -> bool {
    PROBE_KX.iter().any(|&kx| rank_2x4(&bc.at(kx), tol) == 2)
}

fn cell_minor_ok(m: &Mat24, i: usize, j: usize, tol: f64) -> bool {
    let f2 = linalg::frob24(m).powi(2);
    minor24(m, i, j).norm() > tol * f2
}

/// Pivot-column pair of the row echelon form "from the right".
///
/// Returns `(j1, j2)` with `j1 < j2` (0-based): the last column with a
/// non-zero entry is `j2`, and `j1` is the last column independent of it.
pub fn schubert_cell(a0: &Mat24, tol: f64) -> Option<(usize, usize)> {
    const ORDER: [(usize, usize); 6] = [(2, 3), (1, 3), (0, 3), (1, 2), (0, 2), (0, 1)];
    ORDER.iter().copied().find(|&(i, j)| cell_minor_ok(a0, i, j, tol))
}

/// Classify a self-adjoint boundary condition.
///
/// Returns the class label and the canonical representative `G·bc`.
pub fn classify_with_canonical(
    p: &ModelParams,
    bc: &BoundaryCondition,
    tol: f64,
) -> Result<(ClassLabel, BoundaryCondition)> {
    if !is_self_adjoint(p, bc, tol) {
        return Err(Error::NotSelfAdjoint { residual: sa_residual(p, bc) / sa_scale(p, bc) });
    }
    if !is_rank2_generic(bc, tol) {
        return Err(Error::NotRank2);
    }
    let e = p.eps();
    let rank0 = rank_2x4(&bc.a0, tol);
    let rank1 = rank_2x4(&bc.a1, tol);
    let (label, canon) = if rank0 == 2 {
        let (j1, j2) = schubert_cell(&bc.a0, tol).ok_or(Error::NotRank2)?;
        let sub = [[bc.a0[0][j1], bc.a0[0][j2]], [bc.a0[1][j1], bc.a0[1][j2]]];
        let g = inv2(&sub).ok_or(Error::NotRank2)?;
        let cb = bc.transform(&g);
        let (a0, a1) = (cb.a0, cb.a1);
        let label = match (j1, j2) {
            (0, 1) => ClassLabel::new(ClassTag::A12)
                .with("b11", a1[0][0])
                .with("b12", a1[0][1])
                .with("b21", a1[1][0])
                .with("b22", a1[1][1]),
            (0, 3) => ClassLabel::new(ClassTag::A14)
                .with_real("alpha", a0[1][1].re)
                .with_real("beta", a1[1][1].im)
                .with("b11", a1[0][0])
                .with("b21", a1[1][0]),
            (1, 2) => ClassLabel::new(ClassTag::A23)
                .with_real("alpha", a0[1][0].re)
                .with_real("beta", a1[1][0].im)
                .with("b12", a1[0][1])
                .with("b22", a1[1][1]),
            (1, 3) => {
                let a11 = a0[0][0];
                if a11.norm() <= tol {
                    return Err(Error::InternalContradiction("A24 canonical form with a11 = 0".into()));
                }
                ClassLabel::new(ClassTag::A24)
                    .with("a11", a11)
                    .with_real("alpha", ((a0[1][0] - 1.0 / e) / a11).re)
                    .with_real("beta", (a1[1][1] - a1[1][0] / a11).im)
                    .with("b11", a1[0][0])
                    .with("b21", a1[1][0])
            }
            (2, 3) => ClassLabel::new(ClassTag::A34)
                .with_real("alpha1", a0[0][0].re)
                .with_real("alpha2", a0[1][1].re)
                .with("a12", a0[0][1])
                .with_real("beta1", a1[0][0].im)
                .with_real("beta2", a1[1][1].im)
                .with("b12", a1[0][1]),
            _ => {
                return Err(Error::InternalContradiction(format!(
                    "self-adjoint input reduced to Schubert cell {{{}, {}}}",
                    j1 + 1,
                    j2 + 1
                )))
            }
        };
        (label, cb)
    } else if rank1 == 2 {
        let (b, _) = blocks(&bc.a1);
        let g = inv2(&b).ok_or(Error::NotRank2)?;
        let cb = bc.transform(&g);
        let a0 = cb.a0;
        let n0 = a0[0].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let n1 = a0[1].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let scale = n0.max(n1);
        let (nu, mu, row) = if scale == 0.0 {
            (ONE, ZERO, [ZERO; 4])
        } else if n0 > tol * scale {
            let k = (0..4).max_by(|&i, &j| a0[0][i].norm().total_cmp(&a0[0][j].norm())).unwrap();
            (ONE, a0[1][k] / a0[0][k], a0[0])
        } else {
            (ZERO, ONE, a0[1])
        };
        // row = (a1, a2, iα ν*, −iα μ*).
        let alpha = if nu != ZERO { (row[2] / (I * nu.conj())).re } else { (row[3] / (-I * mu.conj())).re };
        let mut label = ClassLabel::new(ClassTag::B)
            .with("a1", row[0])
            .with("a2", row[1])
            .with_real("alpha", alpha)
            .with("mu", mu);
        if nu == ZERO {
            label = label.with("nu", ZERO);
        }
        (label, cb)
    } else if rank0 == 1 && rank1 == 1 {
        let (b, _) = blocks(&bc.a1);
        // B = u w with u the column of largest norm direction.
        let k = if b[0][0].norm_sqr() + b[1][0].norm_sqr() >= b[0][1].norm_sqr() + b[1][1].norm_sqr() { 0 } else { 1 };
        let u = [b[0][k], b[1][k]];
        let nu2 = u[0].norm_sqr() + u[1].norm_sqr();
        let g1: Mat2 = [[u[0].conj() / nu2, u[1].conj() / nu2], [-u[1], u[0]]];
        let mut cb = bc.transform(&g1);
        // Row 2 of A1 is now zero; make the two rows of A0 equal (μ = 1).
        let r1 = cb.a0[0];
        let r2 = cb.a0[1];
        let kk = (0..4).max_by(|&i, &j| r2[i].norm().total_cmp(&r2[j].norm())).unwrap();
        if r2[kk].norm() == 0.0 {
            return Err(Error::NotRank2);
        }
        let lam = r1[kk] / r2[kk];
        let g2: Mat2 = [[ONE, ONE - lam], [ZERO, ONE]];
        cb = cb.transform(&g2);
        // Normalise the A1 row direction: w1 = 1 unless w1 vanishes.
        let w = [cb.a1[0][0], cb.a1[0][1]];
        let wn = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
        let sc = if w[0].norm() > tol * wn { ONE / w[0] } else { ONE / w[1] };
        // Scale both rows so that A0 keeps μ = 1.
        let g3: Mat2 = [[sc, ZERO], [ZERO, sc]];
        cb = cb.transform(&g3);
        // The row r of A0 is fixed only up to a complex factor:
        // [[1, c−1], [0, c]] maps (r; r) to (c r; c r) and keeps A1.  Fix it
        // by setting the rightmost significant entry of r to 1.
        let r1 = cb.a0[0];
        let rn = r1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let piv = (0..4).rev().find(|&j| r1[j].norm() > tol * rn).ok_or(Error::NotRank2)?;
        let cs = ONE / r1[piv];
        let g4: Mat2 = [[ONE, cs - ONE], [ZERO, cs]];
        cb = cb.transform(&g4);
        let a0 = cb.a0;
        let w = [cb.a1[0][0], cb.a1[0][1]];
        let mut label = ClassLabel::new(ClassTag::C)
            .with("a1", a0[0][0])
            .with("a2", a0[0][1])
            .with("a4", a0[0][3])
            .with("mu", ONE);
        if (w[0] - ONE).norm() > tol || w[1].norm() > tol {
            label = label.with("w1", w[0]).with("w2", w[1]).with("a3", a0[0][2]);
        }
        (label, cb)
    } else {
        return Err(Error::NotRank2);
    };
    // Self-check: the canonical parameters must re-emit an equivalent condition.
    let emitted = make_class(&label, p).map_err(|err| {
        Error::InternalContradiction(format!("canonical parameters of class {} rejected: {err}", label.tag))
    })?;
    if !equivalent(&emitted, bc, 1e-6) {
        return Err(Error::InternalContradiction(format!(
            "canonical form of class {} is not equivalent to the input",
            label.tag
        )));
    }
    Ok((label, canon))
}

/// Classify a self-adjoint boundary condition into one of the seven classes.
pub fn classify(p: &ModelParams, bc: &BoundaryCondition, tol: f64) -> Result<ClassLabel> {
    classify_with_canonical(p, bc, tol).map(|(l, _)| l)
}

/// Orthogonal projector onto the row space of a rank-2 2×4 matrix.
fn row_projector(m: &Mat24) -> Option<Mat4> {
    let mut gram = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            gram[i][j] = (0..4).map(|k| m[i][k] * m[j][k].conj()).sum();
        }
    }
    let ginv = inv2(&gram)?;
    let mut proj = [[ZERO; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = ZERO;
            for i in 0..2 {
                for j in 0..2 {
                    acc += m[i][a].conj() * ginv[i][j] * m[j][b];
                }
            }
            proj[a][b] = acc;
        }
    }
    Some(proj)
}

fn rowspace_contains(proj: &Mat4, m: &Mat24) -> f64 {
    let mut worst: f64 = 0.0;
    for row in m {
        let mut diff = [ZERO; 4];
        for b in 0..4 {
            diff[b] = row[b] - (0..4).map(|a| row[a] * proj[a][b]).sum::<C64>();
        }
        let n = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
        worst = worst.max(linalg::norm4(&diff) / n);
    }
    worst
}

/// Equivalence modulo the left `GL₂` action: the row spaces of `A(kx)`
/// coincide at every probe `kx`.
pub fn equivalent(bc1: &BoundaryCondition, bc2: &BoundaryCondition, tol: f64) -> bool {
    PROBE_KX.iter().all(|&kx| {
        let (m1, m2) = (bc1.at(kx), bc2.at(kx));
        match (row_projector(&m1), row_projector(&m2)) {
            (Some(p1), Some(p2)) => rowspace_contains(&p1, &m2) <= tol && rowspace_contains(&p2, &m1) <= tol,
            _ => false,
        }
    })
}

/// Random well-conditioned element of `GL₂(ℂ)` (entries uniform in the unit
/// square, condition number below 100).
pub fn random_gl2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    loop {
        let mut g = eye2();
        for row in g.iter_mut() {
            for z in row.iter_mut() {
                *z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let (smax, smin) = linalg::singular_values2(&g);
        if smin > 0.01 * smax && det2(&g).norm() > 1e-3 {
            return g;
        }
    }
}
