//! Regularized massive Dirac Hamiltonian on the half-plane.
//!
//! The crate covers the whole pipeline behind the anomalous bulk-edge
//! identity `C₊ = n_b + w_∞`:
//!
//! * [`bulk`] — symbol matrix, upper band, transverse momenta, eigensections
//!   and the bulk Chern number;
//! * [`boundary`] — self-adjoint local boundary conditions, their
//!   classification into seven classes and canonical constructors;
//! * [`scattering`] — the scattering amplitude `S(kx, κ)` and the three
//!   winding numbers extracted from it;
//! * [`edge`] — a direct edge-mode solver tracing branches in the gap and
//!   counting band-merging events;
//! * [`anomaly`] — the closed-form prediction of `w_∞` per class, the
//!   worked-example asymptotic curves and the identity check.

// `!(x > y)` is used on purpose to send NaN down the rejecting branch, and
// index loops over fixed 2×4 blocks read closer to the matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod anomaly;
pub mod boundary;
pub mod bulk;
pub mod edge;
pub mod error;
pub mod linalg;
pub mod scattering;

pub use boundary::{BoundaryCondition, ClassLabel, ClassTag};
pub use bulk::{Band, ModelParams, Momentum};
pub use error::{Error, Result};
pub use num_complex::Complex64;
