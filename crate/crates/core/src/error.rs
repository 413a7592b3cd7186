//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Model parameters violate `m > 0`, `0 < eps < 1/(2m)`.
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    /// The requested energy is not above the bottom of the upper band.
    #[error("energy {omega} is not above the upper band edge {edge} at kx = {kx}")]
    OutsideBulkBand { kx: f64, omega: f64, edge: f64 },
    /// The regular-at-infinity section has a phase singularity at k = 0.
    #[error("section is singular at the origin of momentum space")]
    SingularAtOrigin,
    /// The requested branch of a section cannot be evaluated at this momentum.
    #[error("branch error: {0}")]
    BranchError(String),
    /// A refinement sequence did not stabilise.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// The boundary condition fails `A Ω⁻¹ A* = 0`.
    #[error("boundary condition is not self-adjoint (residual {residual:e})")]
    NotSelfAdjoint { residual: f64 },
    /// `A0 + i kx A1` is not of rank 2 for generic kx.
    #[error("boundary condition is not of rank 2")]
    NotRank2,
    /// A self-adjoint input reduced to a cell that admits no self-adjoint member.
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
    /// Class parameters violate a row constraint of the classification table.
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    /// Malformed matrices (wrong shape, non-zero derivative block, ...).
    #[error("malformed boundary condition: {0}")]
    MalformedBoundary(String),
    /// `g(kx, κ)` vanishes: an edge branch merges with the band at this point.
    #[error("scattering amplitude has a pole at kx = {kx}, kappa = {kappa}")]
    PoleAtThreshold { kx: f64, kappa: f64 },
    /// Two transverse roots coincide.
    #[error("degenerate transverse roots at kx = {kx}, omega = {omega}")]
    DegenerateRoots { kx: f64, omega: f64 },
    /// The energy is not strictly inside the gap region of the edge problem.
    #[error("energy {omega} at kx = {kx} is not in the gap ({decaying} decaying roots)")]
    NotInGap { kx: f64, omega: f64, decaying: usize },
    /// Branch continuation could not decide between nearby branches.
    #[error("ambiguous branch continuation near kx = {kx}")]
    AmbiguousContinuation { kx: f64 },
    /// A branch reaches the kx window boundary without a resolved merge event.
    #[error("kx window too narrow: branch touches the window boundary at kx = {kx}")]
    WindowTooNarrow { kx: f64 },
    /// Label tag not recognised.
    #[error("unknown class tag `{0}`")]
    UnknownClass(String),
    /// The label is not one of the worked examples with closed-form curves.
    #[error("label is not one of the worked examples")]
    NotAWorkedExample,
}
