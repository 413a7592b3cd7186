//! Shared fixtures of the benchmarks.

use dirac_halfplane::{BoundaryCondition, ModelParams};

/// Reference model `m = 1`, `ε = 0.1`.
pub fn model() -> ModelParams {
    ModelParams::default()
}

/// The three reference boundary conditions with their names.
pub fn references() -> [(&'static str, BoundaryCondition); 3] {
    [
        ("dirichlet", BoundaryCondition::dirichlet()),
        ("condition_a", BoundaryCondition::condition_a()),
        ("condition_b", BoundaryCondition::condition_b()),
    ]
}
