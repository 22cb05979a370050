//! Adjoint gradients and shift-rule Hessians against parameter-shift and
//! central finite differences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use vqelab_core::diff::{
    energy, energy_and_gradient, energy_gradient_shift, euclidean_loss_and_gradient, hessian,
    top_k_eigensystem,
};
use vqelab_core::experiments::Model;
use vqelab_core::hamiltonian::{build_ising, exact_spectrum, PauliSum, DEFAULT_DEGENERACY_TOL};
use vqelab_core::simcore::{CircuitSpec, StateVector};

fn random_theta(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    (0..p).map(|_| rng.random_range(0.0..TAU)).collect()
}

fn models(n: usize) -> Vec<PauliSum> {
    vec![
        build_ising(n, 2.0).unwrap(),
        Model::syk(4).hamiltonian(n).unwrap(),
    ]
}

#[test]
fn adjoint_matches_parameter_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in [2, 3, 4] {
        for layers in [1, 2, 4] {
            let spec = CircuitSpec::new(n, layers).unwrap();
            for h in models(n) {
                for _ in 0..3 {
                    let theta = random_theta(&mut rng, spec.num_params());
                    let (_, grad) = energy_and_gradient(&spec, &h, &theta).unwrap();
                    for (k, g) in grad.iter().enumerate() {
                        let shift = energy_gradient_shift(&spec, &h, &theta, k).unwrap();
                        assert!((g - shift).abs() < 1e-10, "n={n} L={layers} k={k}");
                    }
                }
            }
        }
    }
}

#[test]
fn adjoint_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let spec = CircuitSpec::new(3, 3).unwrap();
    let h = build_ising(3, 2.0).unwrap();
    let step = 1e-5;
    for _ in 0..10 {
        let theta = random_theta(&mut rng, 9);
        let (_, grad) = energy_and_gradient(&spec, &h, &theta).unwrap();
        for k in 0..9 {
            let mut t = theta.clone();
            t[k] += step;
            let plus = energy(&spec, &h, &t).unwrap();
            t[k] -= 2.0 * step;
            let minus = energy(&spec, &h, &t).unwrap();
            assert!((grad[k] - (plus - minus) / (2.0 * step)).abs() < 1e-7);
        }
    }
}

#[test]
fn hessian_matches_finite_differences_of_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let spec = CircuitSpec::new(3, 2).unwrap();
    let h = build_ising(3, 2.0).unwrap();
    let theta = random_theta(&mut rng, 6);
    let hess = hessian(&spec, &h, &theta).unwrap();
    assert!(hess.max_asymmetry() < 1e-12);
    let step = 1e-5;
    for j in 0..6 {
        let mut t = theta.clone();
        t[j] += step;
        let (_, gp) = energy_and_gradient(&spec, &h, &t).unwrap();
        t[j] -= 2.0 * step;
        let (_, gm) = energy_and_gradient(&spec, &h, &t).unwrap();
        for i in 0..6 {
            let fd = (gp[i] - gm[i]) / (2.0 * step);
            assert!((hess.0[(i, j)] - fd).abs() < 1e-6, "({i},{j})");
        }
    }
    let sub = top_k_eigensystem(&hess, 6).unwrap();
    for (lambda, v) in sub.eigenvalues.iter().zip(&sub.eigenvectors) {
        let v = nalgebra::DVector::from_column_slice(v);
        let r = &hess.0 * &v - &v * *lambda;
        assert!(r.norm() < 1e-10);
    }
}

#[test]
fn euclidean_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let spec = CircuitSpec::new(3, 4).unwrap();
    let step = 1e-6;
    for seed in 0..5 {
        let target = StateVector::haar_random(3, seed).unwrap();
        let theta = random_theta(&mut rng, 12);
        let (d, grad) = euclidean_loss_and_gradient(&spec, &theta, &target).unwrap();
        assert!((0.0..=2.0).contains(&d));
        for k in 0..12 {
            let mut t = theta.clone();
            t[k] += step;
            let plus = euclidean_loss_and_gradient(&spec, &t, &target).unwrap().0;
            t[k] -= 2.0 * step;
            let minus = euclidean_loss_and_gradient(&spec, &t, &target).unwrap().0;
            assert!((grad[k] - (plus - minus) / (2.0 * step)).abs() < 1e-6);
        }
    }
}

#[test]
fn small_gradient_step_never_raises_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let spec = CircuitSpec::new(4, 2).unwrap();
    let h = build_ising(4, 2.0).unwrap();
    for _ in 0..100 {
        let theta = random_theta(&mut rng, 8);
        let (e, grad) = energy_and_gradient(&spec, &h, &theta).unwrap();
        let stepped: Vec<f64> = theta.iter().zip(&grad).map(|(t, g)| t - 1e-4 * g).collect();
        assert!(energy(&spec, &h, &stepped).unwrap() <= e + 1e-8);
    }
}

#[test]
fn energies_respect_variational_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for h in models(4) {
        let spectrum = exact_spectrum(&h, DEFAULT_DEGENERACY_TOL).unwrap();
        let spec = CircuitSpec::new(4, 3).unwrap();
        for _ in 0..200 {
            let theta = random_theta(&mut rng, 12);
            let e = energy(&spec, &h, &theta).unwrap();
            assert!(e >= spectrum.ground_energy - 1e-9 * spectrum.bandwidth);
            assert!(e <= spectrum.ground_energy + spectrum.bandwidth + 1e-9);
        }
    }
}
