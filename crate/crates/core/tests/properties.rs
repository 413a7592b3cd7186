//! Property tests over randomly drawn self-adjoint boundary conditions.

use dirac_halfplane::anomaly::sample_label;
use dirac_halfplane::boundary::{classify, is_self_adjoint, make_class, random_gl2, DEFAULT_TOL};
use dirac_halfplane::bulk::{characteristic, omega_plus};
use dirac_halfplane::edge::{edge_eigenvalues, edge_sigma_min, transverse_roots, EdgeOptions};
use dirac_halfplane::scattering::{s_value, winding_along, WindingOptions};
use dirac_halfplane::{BoundaryCondition, ClassLabel, ClassTag, Complex64, ModelParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p() -> ModelParams {
    ModelParams::default()
}

fn draw(tag_index: usize, seed: u64) -> (ClassLabel, BoundaryCondition, BoundaryCondition) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let label = sample_label(ClassTag::ALL[tag_index], &p(), &mut rng);
    let bc = make_class(&label, &p()).expect("sampled labels are admissible");
    let moved = bc.transform(&random_gl2(&mut rng));
    (label, bc, moved)
}

fn close_labels(a: &ClassLabel, b: &ClassLabel, tol: f64) -> bool {
    a.tag == b.tag
        && a.params.keys().chain(b.params.keys()).all(|k| {
            let (x, y) = (a.get(k), b.get(k));
            (x - y).norm() <= tol * (1.0 + x.norm().max(y.norm()))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_conditions_are_self_adjoint(tag in 0usize..7, seed in any::<u64>()) {
        let (label, bc, moved) = draw(tag, seed);
        prop_assert!(is_self_adjoint(&p(), &bc, 1e-12));
        prop_assert!(is_self_adjoint(&p(), &moved, 1e-9));
        prop_assert_eq!(classify(&p(), &moved, DEFAULT_TOL).unwrap().tag, label.tag);
    }

    #[test]
    fn classification_is_gl2_invariant(tag in 0usize..7, seed in any::<u64>(), seed2 in any::<u64>()) {
        let (_, bc, moved) = draw(tag, seed);
        let g = random_gl2(&mut ChaCha8Rng::seed_from_u64(seed2));
        let a = classify(&p(), &bc, DEFAULT_TOL).unwrap();
        let b = classify(&p(), &moved.transform(&g), DEFAULT_TOL).unwrap();
        prop_assert!(close_labels(&a, &b, 1e-6), "{:?} vs {:?}", a, b);
    }

    #[test]
    fn canonical_parameters_re_emit_the_condition(tag in 0usize..7, seed in any::<u64>()) {
        let (_, _, moved) = draw(tag, seed);
        let label = classify(&p(), &moved, DEFAULT_TOL).unwrap();
        let again = classify(&p(), &make_class(&label, &p()).unwrap(), DEFAULT_TOL).unwrap();
        prop_assert!(close_labels(&label, &again, 1e-8));
    }

    #[test]
    fn scattering_amplitude_is_unimodular_and_gl2_invariant(
        tag in 0usize..7,
        seed in any::<u64>(),
        kx in -40.0..40.0f64,
        log_kappa in -3.0..1.5f64,
    ) {
        let (_, bc, moved) = draw(tag, seed);
        let kappa = 10f64.powf(log_kappa);
        let s = s_value(&p(), &bc, kx, kappa).unwrap();
        let t = s_value(&p(), &moved, kx, kappa).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-9);
        prop_assert!((s - t).norm() < 1e-9, "{} vs {}", s, t);
    }

    #[test]
    fn transverse_roots_solve_the_quartic(kx in -30.0..30.0f64, omega in -30.0..30.0f64) {
        if let Ok(q) = transverse_roots(&p(), kx, omega) {
            prop_assert_eq!(q[0], -q[1]);
            prop_assert_eq!(q[2], -q[3]);
            for z in q {
                let scale = 1.0 + z.norm().powi(4) * 0.01 + kx.powi(4) * 0.01 + omega * omega;
                prop_assert!(characteristic(&p(), kx, z, omega).norm() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn polynomial_maps_wind_by_their_degree(k in -3i64..=3, r in 0.1..10.0f64, phase in -3.0..3.0f64) {
        let f = |t: f64| Ok((t, 0.0, Complex64::from_polar(r, k as f64 * t + phase)));
        let w = winding_along(f, 0.0, 2.0 * std::f64::consts::PI, true, &WindingOptions::default()).unwrap();
        prop_assert_eq!(w.snapped, Some(k));
    }

    #[test]
    fn edge_energies_are_strict_local_minima_in_the_gap(tag in 0usize..7, seed in any::<u64>(), kx in -15.0..15.0f64) {
        let (_, bc, _) = draw(tag, seed);
        let edge = omega_plus(&p(), kx, 0.0);
        let opts = EdgeOptions::default();
        for w in edge_eigenvalues(&p(), &bc, kx, &opts) {
            prop_assert!(w.abs() < edge);
            let at = edge_sigma_min(&p(), &bc, kx, w).unwrap();
            prop_assert!(at < opts.accept_tol);
            for dw in [-1e-6, 1e-6] {
                if (w + dw).abs() < edge {
                    prop_assert!(edge_sigma_min(&p(), &bc, kx, w + dw).unwrap() > at);
                }
            }
        }
    }
}
