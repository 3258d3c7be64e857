mod common;

use common::{dense_adjoint, dense_fixed_point, sine_inv_g};
use hirsch_core::circle_dynamics::{compute_g_measure, radon_nikodym_check, transfer_dual_step};
use hirsch_core::{CircleMeasure, GFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn constant_g_fixes_lebesgue_exactly() {
    let r = compute_g_measure(&GFunction::Constant2, 12, 1e-12, 10).unwrap();
    assert_eq!(r.measure, CircleMeasure::uniform(12));
    assert_eq!(r.residual, 0.0);
}

#[test]
fn dual_step_matches_dense_matrix() {
    let g = GFunction::sine(0.3).unwrap();
    let a = dense_adjoint(8, sine_inv_g(0.3));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let w: Vec<f64> = (0..256).map(|_| rng.random::<f64>()).collect();
    let mu = CircleMeasure::normalized(8, w).unwrap();
    let dense = &a * nalgebra::DVector::from_column_slice(mu.weights());
    let step = transfer_dual_step(&mu, &g).unwrap();
    let worst = step.weights().iter().zip(dense.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-12, "{worst}");
}

#[test]
fn sine_measure_matches_dense_eigenvector() {
    let g = GFunction::sine(0.3).unwrap();
    let r = compute_g_measure(&g, 10, 1e-13, 5000).unwrap();
    let oracle = dense_fixed_point(&dense_adjoint(10, sine_inv_g(0.3)));
    let tv: f64 = r.measure.weights().iter().zip(oracle.iter()).map(|(x, y)| (x - y).abs()).sum();
    assert!(tv <= 1e-8, "{tv}");
}

#[test]
fn refinement_is_consistent() {
    let g = GFunction::sine(0.3).unwrap();
    let coarse = compute_g_measure(&g, 10, 1e-13, 5000).unwrap().measure;
    let fine = compute_g_measure(&g, 14, 1e-13, 5000).unwrap().measure;
    let tv = fine.coarsened(10).unwrap().total_variation(&coarse).unwrap();
    assert!(tv <= 5e-3, "{tv}");
}

#[test]
fn radon_nikodym_residual_shrinks() {
    let g = GFunction::sine(0.3).unwrap();
    let r12 = radon_nikodym_check(&compute_g_measure(&g, 12, 1e-13, 5000).unwrap().measure, &g, 8).unwrap();
    let r14 = radon_nikodym_check(&compute_g_measure(&g, 14, 1e-13, 5000).unwrap().measure, &g, 8).unwrap();
    assert!(r12 <= 1e-6, "{r12}");
    assert!(r14 <= 0.5 * r12, "{r12} -> {r14}");
}

#[test]
fn lebesgue_is_not_a_sine_g_measure() {
    let g = GFunction::sine(0.3).unwrap();
    assert!(radon_nikodym_check(&CircleMeasure::uniform(12), &g, 8).unwrap() > 1e-4);
}

#[test]
fn measure_json_round_trip() {
    let g = GFunction::sine(0.3).unwrap();
    let mu = compute_g_measure(&g, 8, 1e-12, 1000).unwrap().measure;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mu.json");
    mu.write(&path).unwrap();
    assert_eq!(CircleMeasure::read(&path).unwrap(), mu);
}
