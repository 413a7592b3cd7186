//! Direct edge-mode solver.
//!
//! At fixed `kx` the half-plane problem reduces to a one-dimensional
//! eigenproblem in `y ≥ 0`.  A solution at energy `ω` in the gap
//! `|ω| < ω₊(kx, 0)` is a combination of the two exponentially decaying
//! plane waves `e^{iqy}`, `Im q > 0`, and it is an edge mode exactly when
//! that combination satisfies the boundary condition.  This module locates
//! such energies, links them into branches over `kx` and counts the branches
//! emerging from or disappearing into the lower limit of the upper band.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::BoundaryCondition;
use crate::bulk::{omega_plus, ModelParams};
use crate::error::{Error, Result};
use crate::linalg::{mul24_v, norm2, r, singular_values2, I};

/// Inputs of the reduced one-dimensional problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeProblem {
    /// Bulk parameters.
    pub p: ModelParams,
    /// Boundary condition.
    pub bc: BoundaryCondition,
    /// Longitudinal momentum.
    pub kx: f64,
}

impl EdgeProblem {
    /// `σ_min` of the boundary matrix at energy `omega`.
    pub fn sigma_min(&self, omega: f64) -> Result<f64> {
        edge_sigma_min(&self.p, &self.bc, self.kx, omega)
    }

    /// Edge energies with the default scan settings.
    pub fn eigenvalues(&self) -> Vec<f64> {
        edge_eigenvalues(&self.p, &self.bc, self.kx, &EdgeOptions::default())
    }
}

/// Relative separation below which two transverse roots count as equal.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// The four complex roots `q` of `det(H(kx, q) − ω) = 0`, ordered
/// `[q₁, −q₁, q₂, −q₂]`.
///
/// The determinant is `ω² − (m − εk²)² − k²` with `k² = kx² + q²`, a
/// quadratic `ε²t² + (1 − 2εm)t + (m² − ω²)` in `t = k²`.  The two shifted
/// roots `dⱼ = tⱼ − kx² = qⱼ²` satisfy
/// `d₁ d₂ = (ω₊(kx,0)² − ω²)/ε²`, which is used to get the smaller one
/// without cancellation.
pub fn transverse_roots(p: &ModelParams, kx: f64, omega: f64) -> Result<[C64; 4]> {
    let e2 = p.eps() * p.eps();
    let b = 1.0 - 2.0 * p.eps() * p.m();
    let kx2 = kx * kx;
    // Quadratic in d = t − kx²: ε²d² + (2ε²kx² + b)d + (ω₊(kx,0)² − ω²) = 0.
    let edge = omega_plus(p, kx, 0.0);
    let bb = 2.0 * e2 * kx2 + b;
    let cc = (edge - omega) * (edge + omega);
    let disc = r(bb * bb - 4.0 * e2 * cc).sqrt();
    let num = if bb >= 0.0 { -(r(bb) + disc) } else { -(r(bb) - disc) };
    let big = num / (2.0 * e2);
    let small = if big.norm() > 0.0 { r(cc / e2) / big } else { r(0.0) };
    let q1 = small.sqrt();
    let q2 = big.sqrt();
    let roots = [q1, -q1, q2, -q2];
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..4 {
        for j in (i + 1)..4 {
            if (roots[i] - roots[j]).norm() < DEGENERACY_TOL * scale {
                return Err(Error::DegenerateRoots { kx, omega });
            }
        }
    }
    Ok(roots)
}

/// The two roots with `Im q > 0`, sorted by imaginary part.
pub fn decaying_pair(kx: f64, omega: f64, roots: &[C64; 4]) -> Result<[C64; 2]> {
    let mut dec: Vec<C64> = roots.iter().copied().filter(|q| q.im > 0.0).collect();
    if dec.len() != 2 {
        return Err(Error::NotInGap { kx, omega, decaying: dec.len() });
    }
    dec.sort_by(|a, b| a.im.total_cmp(&b.im));
    Ok([dec[0], dec[1]])
}

/// Unit eigenvector of `H(kx, q)` at eigenvalue `omega`, lifted to boundary
/// data `(v, i q v)`.
fn decaying_lift(p: &ModelParams, kx: f64, q: C64, omega: f64) -> [C64; 4] {
    let a = r(p.m()) - p.eps() * (r(kx * kx) + q * q);
    let u = [r(kx) - I * q, a - omega];
    let w = [a + omega, -r(kx) - I * q];
    let v = if norm2(&u) >= norm2(&w) { u } else { w };
    let n = norm2(&v);
    let v = [v[0] / n, v[1] / n];
    let iq = I * q;
    [v[0], v[1], iq * v[0], iq * v[1]]
}

/// Smallest singular value of `[A Ψ̂(q₁), A Ψ̂(q₂)]` with unit columns.
///
/// Vanishes exactly when a decaying solution at `(kx, ω)` satisfies the
/// boundary condition.
pub fn edge_sigma_min(p: &ModelParams, bc: &BoundaryCondition, kx: f64, omega: f64) -> Result<f64> {
    let roots = transverse_roots(p, kx, omega)?;
    let [q1, q2] = decaying_pair(kx, omega, &roots)?;
    let a = bc.at(kx);
    let c1 = mul24_v(&a, &decaying_lift(p, kx, q1, omega));
    let c2 = mul24_v(&a, &decaying_lift(p, kx, q2, omega));
    let (n1, n2) = (norm2(&c1), norm2(&c2));
    if n1 == 0.0 || n2 == 0.0 {
        return Ok(0.0);
    }
    let m = [[c1[0] / n1, c2[0] / n2], [c1[1] / n1, c2[1] / n2]];
    Ok(singular_values2(&m).1)
}

/// Scan and refinement settings of the edge solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeOptions {
    /// Number of energy samples across the gap.
    pub n_scan: usize,
    /// Local minima of `σ_min` below this value are refined.
    pub seed_tol: f64,
    /// Refined minima below this value are accepted as eigenvalues.
    pub accept_tol: f64,
    /// Exclusion margin from the band edges, relative to `m`.
    pub eta: f64,
}

impl Default for EdgeOptions {
    fn default() -> Self {
        EdgeOptions { n_scan: 2000, seed_tol: 1e-2, accept_tol: 1e-7, eta: 1e-4 }
    }
}

/// Edge energies at fixed `kx`, sorted increasingly.
///
/// Scans `ω` over `(−ω₊(kx,0) + η, ω₊(kx,0) − η)` with `n_scan` samples,
/// seeds at local minima of `σ_min` below `seed_tol` and refines each by
/// golden-section search.  The samples are uniform in `θ` with
/// `ω = ω₊(kx,0) sin θ`, which concentrates them near the band limits where
/// branches approach the band tangentially and the minima of `σ_min` become
/// narrow.
pub fn edge_eigenvalues(p: &ModelParams, bc: &BoundaryCondition, kx: f64, opts: &EdgeOptions) -> Vec<f64> {
    let edge = omega_plus(p, kx, 0.0);
    let eta = opts.eta * p.m();
    if !(edge > eta) || opts.n_scan < 3 {
        return Vec::new();
    }
    let th = ((edge - eta) / edge).asin();
    let n = opts.n_scan;
    let h = 2.0 * th / (n - 1) as f64;
    let omega_at = |i: f64| edge * (-th + i * h).sin();
    let f = |w: f64| edge_sigma_min(p, bc, kx, w).unwrap_or(f64::INFINITY);
    let vals: Vec<f64> = (0..n).map(|i| f(omega_at(i as f64))).collect();
    let mut out: Vec<f64> = Vec::new();
    for i in 0..n {
        let left = if i == 0 { f64::INFINITY } else { vals[i - 1] };
        let right = if i + 1 == n { f64::INFINITY } else { vals[i + 1] };
        if !(vals[i] < opts.seed_tol && vals[i] <= left && vals[i] < right) {
            continue;
        }
        let a = omega_at((i as f64 - 1.0).max(0.0));
        let b = omega_at(((i + 1) as f64).min((n - 1) as f64));
        let (w, v) = crate::linalg::golden_min(&f, a, b, 1e-14 * edge.max(1.0));
        if v < opts.accept_tol && out.last().is_none_or(|&l| w - l > 1e-9 * edge) {
            out.push(w);
        }
    }
    out
}

/// How a branch begins or ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchEvent {
    /// Merges with the lower limit `ω₊(kx, 0)` of the upper band.
    UpperBandMerge,
    /// Merges with the upper limit `−ω₊(kx, 0)` of the lower band.
    LowerBandMerge,
    /// Reaches the end of the `kx` window while still in the gap.
    Persists,
    /// Ends in the interior of the gap (not expected for self-adjoint
    /// conditions; signals an undersampled grid).
    Interior,
}

/// A continuous edge branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeBranch {
    /// `(kx, ω)` samples in increasing `kx`.
    pub samples: Vec<(f64, f64)>,
    /// Event at the smallest `kx`.
    pub start_event: BranchEvent,
    /// Event at the largest `kx`.
    pub end_event: BranchEvent,
}

impl EdgeBranch {
    /// Contribution to the signed count: `+1` for emerging from the upper
    /// band, `−1` for disappearing into it, as `kx` increases.
    pub fn signed_count(&self) -> i32 {
        let mut n = 0;
        if self.start_event == BranchEvent::UpperBandMerge {
            n += 1;
        }
        if self.end_event == BranchEvent::UpperBandMerge {
            n -= 1;
        }
        n
    }
}

/// Branch tracing settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceOptions {
    /// Energy scan settings.
    pub scan: EdgeOptions,
    /// An endpoint closer than `merge_frac · 2ω₊(kx,0)` to a band limit
    /// counts as a band merge.
    pub merge_frac: f64,
    /// Largest allowed jump of a branch between neighbouring `kx`, relative
    /// to the local gap width.
    pub branch_frac: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { scan: EdgeOptions::default(), merge_frac: 0.02, branch_frac: 0.05 }
    }
}

/// Default `kx` window `[−K, K]`, `K = 3 max(√(m/ε), 10)`.
///
/// Branches merge with the band up to `|kx| ≈ √(m/ε)·π`, so the window
/// needs to be wider than the plotting range.
pub fn default_kx_grid(p: &ModelParams) -> Vec<f64> {
    let k = crate::scattering::default_cutoff(p);
    uniform_grid(-k, k, 801)
}

/// `n` uniformly spaced points over `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Edge energies at every grid point (computed in parallel).
pub fn scan_grid(p: &ModelParams, bc: &BoundaryCondition, kx_grid: &[f64], opts: &EdgeOptions) -> Vec<Vec<f64>> {
    kx_grid.par_iter().map(|&kx| edge_eigenvalues(p, bc, kx, opts)).collect()
}

/// Links the edge energies on a monotone `kx` grid into branches.
///
/// Each active branch predicts its next energy linearly from its last two
/// samples and takes the nearest unclaimed eigenvalue within
/// `branch_frac · 2ω₊(kx,0)` (three times that for a branch with a single
/// sample); unmatched eigenvalues open new branches.
pub fn trace_branches(
    p: &ModelParams,
    bc: &BoundaryCondition,
    kx_grid: &[f64],
    opts: &TraceOptions,
) -> Result<Vec<EdgeBranch>> {
    check_grid(kx_grid)?;
    // Where A(kx) drops rank every energy satisfies the condition; the
    // spectrum is continuous through such isolated points, so skip them.
    let grid: Vec<f64> = kx_grid.iter().copied().filter(|&kx| !bc.rank_deficient_at(kx)).collect();
    let levels = scan_grid(p, bc, &grid, &opts.scan);
    link_branches(p, &grid, &levels, opts)
}

fn check_grid(kx_grid: &[f64]) -> Result<()> {
    if kx_grid.len() < 2 || kx_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams("kx grid must be strictly increasing with at least two points".into()));
    }
    Ok(())
}

fn link_branches(
    p: &ModelParams,
    kx_grid: &[f64],
    levels: &[Vec<f64>],
    opts: &TraceOptions,
) -> Result<Vec<EdgeBranch>> {
    let mut done: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut active: Vec<Vec<(f64, f64)>> = Vec::new();
    for (&kx, ws) in kx_grid.iter().zip(levels) {
        let gate = opts.branch_frac * 2.0 * omega_plus(p, kx, 0.0);
        // Candidate pairs (distance, branch, eigenvalue), nearest first.
        let mut pairs = Vec::new();
        for (bi, br) in active.iter().enumerate() {
            let pred = predict(br, kx);
            // A single sample carries no slope information: widen its gate.
            let g = if br.len() < 2 { 3.0 * gate } else { gate };
            for (wi, &w) in ws.iter().enumerate() {
                let d = (w - pred).abs();
                if d < g {
                    pairs.push((d, bi, wi));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut br_taken = vec![false; active.len()];
        let mut w_taken = vec![false; ws.len()];
        for &(_, bi, wi) in &pairs {
            if !br_taken[bi] && !w_taken[wi] {
                br_taken[bi] = true;
                w_taken[wi] = true;
                active[bi].push((kx, ws[wi]));
            }
        }
        let mut still = Vec::new();
        for (bi, br) in active.into_iter().enumerate() {
            if br_taken[bi] {
                still.push(br);
            } else {
                done.push(br);
            }
        }
        for (wi, &w) in ws.iter().enumerate() {
            if !w_taken[wi] {
                still.push(vec![(kx, w)]);
            }
        }
        active = still;
    }
    done.extend(active);
    let (k0, k1) = (kx_grid[0], kx_grid[kx_grid.len() - 1]);
    let mut branches: Vec<EdgeBranch> = done
        .into_iter()
        .map(|samples| {
            let (sk, sw) = samples[0];
            let (ek, ew) = samples[samples.len() - 1];
            EdgeBranch {
                start_event: classify_end(p, sk, sw, sk == k0, opts),
                end_event: classify_end(p, ek, ew, ek == k1, opts),
                samples,
            }
        })
        .collect();
    branches.sort_by(|a, b| a.samples[0].0.total_cmp(&b.samples[0].0).then(a.samples[0].1.total_cmp(&b.samples[0].1)));
    Ok(branches)
}

fn predict(br: &[(f64, f64)], kx: f64) -> f64 {
    match br {
        [.., (k0, w0), (k1, w1)] => w1 + (w1 - w0) / (k1 - k0) * (kx - k1),
        [.., (_, w)] => *w,
        [] => 0.0,
    }
}

fn classify_end(p: &ModelParams, kx: f64, w: f64, at_boundary: bool, opts: &TraceOptions) -> BranchEvent {
    if at_boundary {
        return BranchEvent::Persists;
    }
    let edge = omega_plus(p, kx, 0.0);
    let tol = opts.merge_frac * 2.0 * edge;
    if edge - w < tol {
        BranchEvent::UpperBandMerge
    } else if w + edge < tol {
        BranchEvent::LowerBandMerge
    } else {
        BranchEvent::Interior
    }
}

/// Signed number of edge branches emerging from (`+`) or disappearing into
/// (`−`) the lower limit of the upper band as `kx` increases.
///
/// Fails with `WindowTooNarrow` when a branch that is still in the gap at the
/// window boundary lies close to the upper band (its merge may fall outside
/// the window), and with `AmbiguousContinuation` when a branch ends in the
/// interior of the gap.
pub fn n_b_direct(p: &ModelParams, bc: &BoundaryCondition, kx_grid: &[f64], opts: &TraceOptions) -> Result<i32> {
    let branches = trace_branches(p, bc, kx_grid, opts)?;
    count_branches(p, &branches, opts)
}

/// Signed count of already traced branches; see [`n_b_direct`].
pub fn count_branches(p: &ModelParams, branches: &[EdgeBranch], opts: &TraceOptions) -> Result<i32> {
    let mut n = 0;
    for br in branches {
        for (event, &(kx, w)) in [(br.start_event, &br.samples[0]), (br.end_event, br.samples.last().unwrap())] {
            match event {
                BranchEvent::Interior => return Err(Error::AmbiguousContinuation { kx }),
                BranchEvent::Persists => {
                    let edge = omega_plus(p, kx, 0.0);
                    if edge - w < 4.0 * opts.merge_frac * 2.0 * edge {
                        return Err(Error::WindowTooNarrow { kx });
                    }
                }
                _ => {}
            }
        }
        n += br.signed_count();
    }
    Ok(n)
}

/// One row of the spectrum export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    /// Longitudinal momentum.
    pub kx: f64,
    /// Edge energy.
    pub omega: f64,
    /// Index of the branch in [`Spectrum::branches`].
    pub branch_id: usize,
}

/// Edge spectrum together with the band limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Traced branches.
    pub branches: Vec<EdgeBranch>,
    /// `(kx, ω₊(kx, 0))` on the grid; the lower band limit is its negative.
    pub band: Vec<(f64, f64)>,
    /// Signed count of the traced branches, when decidable.
    pub n_b: Option<i32>,
}

impl Spectrum {
    /// Flattened `(kx, ω, branch_id)` rows, branch by branch.
    pub fn rows(&self) -> Vec<SpectrumRow> {
        self.branches
            .iter()
            .enumerate()
            .flat_map(|(id, br)| br.samples.iter().map(move |&(kx, omega)| SpectrumRow { kx, omega, branch_id: id }))
            .collect()
    }
}

/// Edge spectrum over a `kx` grid.
pub fn spectrum(p: &ModelParams, bc: &BoundaryCondition, kx_grid: &[f64], opts: &TraceOptions) -> Result<Spectrum> {
    let branches = trace_branches(p, bc, kx_grid, opts)?;
    let n_b = count_branches(p, &branches, opts).ok();
    let band = kx_grid.iter().map(|&kx| (kx, omega_plus(p, kx, 0.0))).collect();
    Ok(Spectrum { branches, band, n_b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::random_gl2;
    use crate::bulk::{characteristic, momentum_roots};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn roots_pair_and_solve_the_quartic() {
        for &(kx, w) in &[(0.0, 0.0), (1.3, 0.5), (-7.0, 2.0), (2.0, 5.0), (25.0, -30.0)] {
            let q = transverse_roots(&p(), kx, w).unwrap();
            assert_eq!(q[0], -q[1]);
            assert_eq!(q[2], -q[3]);
            for z in q {
                let scale = 1.0 + z.norm().powi(4) * p().eps().powi(2);
                assert!(characteristic(&p(), kx, z, w).norm() < 1e-12 * scale, "{kx} {w} {z}");
            }
        }
    }

    #[test]
    fn roots_at_bulk_energy_match_bulk_roots() {
        for &(kx, kap) in &[(0.0, 1.0), (2.0, 0.3), (-4.0, 6.0)] {
            let w = omega_plus(&p(), kx, kap);
            let bulk = momentum_roots(&p(), kx, w).unwrap();
            let q = transverse_roots(&p(), kx, w).unwrap();
            for b in bulk.all() {
                let best = q.iter().map(|z| (z - b).norm()).fold(f64::INFINITY, f64::min);
                assert!(best < 1e-9 * (1.0 + b.norm()), "{b} not in {q:?}");
            }
        }
    }

    #[test]
    fn in_gap_has_two_decaying_roots() {
        let q = transverse_roots(&p(), 0.0, 0.0).unwrap();
        assert_eq!(q.iter().filter(|z| z.im > 0.0).count(), 2);
        let d = decaying_pair(0.0, 0.0, &q).unwrap();
        assert!(d[0].im <= d[1].im);
        let w = omega_plus(&p(), 1.0, 0.5);
        let q = transverse_roots(&p(), 1.0, w).unwrap();
        assert!(matches!(decaying_pair(1.0, w, &q), Err(Error::NotInGap { .. })));
    }

    #[test]
    fn band_edge_roots_are_degenerate() {
        let w = omega_plus(&p(), 0.7, 0.0);
        assert!(matches!(transverse_roots(&p(), 0.7, w), Err(Error::DegenerateRoots { .. })));
    }

    #[test]
    fn dirichlet_zero_is_refined_and_gl2_invariant() {
        let bc = BoundaryCondition::dirichlet();
        let ws = edge_eigenvalues(&p(), &bc, 0.0, &EdgeOptions::default());
        assert!(!ws.is_empty());
        // Dense scan oracle.
        let dense = edge_eigenvalues(&p(), &bc, 0.0, &EdgeOptions { n_scan: 10_000, ..Default::default() });
        assert_eq!(ws.len(), dense.len());
        for (a, b) in ws.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-7);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = bc.transform(&random_gl2(&mut rng));
        for &w in &ws {
            assert!(edge_sigma_min(&p(), &bc, 0.0, w).unwrap() < 1e-7);
            assert!(edge_sigma_min(&p(), &t, 0.0, w).unwrap() < 1e-6);
            assert!(edge_sigma_min(&p(), &bc, 0.0, w + 1e-6).unwrap() > edge_sigma_min(&p(), &bc, 0.0, w).unwrap());
            assert!(edge_sigma_min(&p(), &bc, 0.0, w - 1e-6).unwrap() > edge_sigma_min(&p(), &bc, 0.0, w).unwrap());
        }
    }

    #[test]
    fn off_branch_value_is_order_one() {
        let bc = BoundaryCondition::dirichlet();
        let ws = edge_eigenvalues(&p(), &bc, 0.0, &EdgeOptions::default());
        let w = if ws.iter().any(|w| w.abs() < 0.3) { 0.6 } else { 0.0 };
        assert!(edge_sigma_min(&p(), &bc, 0.0, w).unwrap() > 1e-3);
    }

    #[test]
    fn eta_excludes_band_edges() {
        let o = EdgeOptions::default();
        for bc in [BoundaryCondition::dirichlet(), BoundaryCondition::condition_b()] {
            for kx in [-5.0, 0.5, 8.0] {
                let edge = omega_plus(&p(), kx, 0.0);
                for w in edge_eigenvalues(&p(), &bc, kx, &o) {
                    assert!(w.abs() <= edge - o.eta * p().m());
                }
            }
        }
    }

    #[test]
    fn grid_must_increase() {
        let bc = BoundaryCondition::dirichlet();
        assert!(trace_branches(&p(), &bc, &[1.0, 0.0], &TraceOptions::default()).is_err());
    }

    #[test]
    fn tiny_window_has_no_branches() {
        let s = spectrum(&p(), &BoundaryCondition::condition_a_plus(), &uniform_grid(-0.01, 0.01, 3), &TraceOptions::default())
            .unwrap();
        assert!(s.branches.is_empty());
        assert_eq!(s.band.len(), 3);
    }

    #[test]
    fn rank_drop_at_zero_is_skipped() {
        use crate::boundary::{make_class, ClassLabel, ClassTag};
        use crate::linalg::c;
        let p = p();
        let label = ClassLabel::new(ClassTag::B)
            .with("a1", c(-6.145084493844562, -1.3965275343054842))
            .with("a2", c(-1.9750749774988314, 0.24874075899159198))
            .with_real("alpha", -0.5629481317613954)
            .with("mu", c(1.1240781101320945, -1.4230872758640727));
        let bc = make_class(&label, &p).unwrap();
        assert!(bc.rank_deficient_at(0.0));
        let branches = trace_branches(&p, &bc, &default_kx_grid(&p), &TraceOptions::default()).unwrap();
        assert!(branches.iter().all(|b| b.samples.len() > 1));
        assert_eq!(count_branches(&p, &branches, &TraceOptions::default()).unwrap(), 2);
    }
}
