//! Cross-checks the adaptive master-equation integrator against the
//! vectorized-superoperator matrix exponential on randomized systems.

mod support;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{expm, lindblad_superoperator, trace_distance, unvec_col, vec_col, CMatrix};
use xducer_core::dynamics::evolve;

fn random_complex_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
        )
    })
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMatrix {
    let a = random_complex_matrix(rng, n, scale);
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

fn random_density_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = random_complex_matrix(rng, n, 1.0);
    let rho = &a * a.adjoint();
    let trace: Complex64 = (0..n).map(|i| rho[(i, i)]).sum();
    rho * (Complex64::new(1.0, 0.0) / trace)
}

fn random_system(seed: u64) -> (CMatrix, Vec<CMatrix>, CMatrix, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=8);
    let h = random_hermitian(&mut rng, n, 1.0);
    let n_collapse = rng.random_range(1..=3);
    let collapse: Vec<CMatrix> = (0..n_collapse)
        .map(|_| random_complex_matrix(&mut rng, n, 0.5))
        .collect();
    let rho0 = random_density_matrix(&mut rng, n);
    let t = rng.random_range(0.5..2.0);
    (h, collapse, rho0, t)
}

fn oracle_evolve(h: &CMatrix, collapse: &[CMatrix], rho0: &CMatrix, t: f64) -> CMatrix {
    let sup = lindblad_superoperator(h, collapse);
    let propagator = expm(&(sup * Complex64::new(t, 0.0)));
    unvec_col(&(propagator * vec_col(rho0)), rho0.nrows())
}

#[test]
fn integrator_matches_superoperator_exponential_on_random_systems() {
    let mut worst = 0.0f64;
    for seed in 0..50 {
        let (h, collapse, rho0, t) = random_system(seed);
        let numeric = evolve(&rho0, &h, &collapse, t, 1e-11).unwrap();
        let exact = oracle_evolve(&h, &collapse, &rho0, t);
        let dist = trace_distance(&numeric, &exact);
        assert!(dist < 1e-8, "seed {seed}: trace distance {dist:.3e}");
        worst = worst.max(dist);
    }
    println!("worst trace distance over 50 systems: {worst:.3e}");
}

#[test]
fn trace_and_hermiticity_hold_along_the_trajectory() {
    for seed in 0..10 {
        let (h, collapse, rho0, t) = random_system(seed);
        let steps = 8;
        let mut rho = rho0.clone();
        for step in 0..steps {
            rho = evolve(&rho, &h, &collapse, t / steps as f64, 1e-11).unwrap();
            let trace: Complex64 = (0..rho.nrows()).map(|i| rho[(i, i)]).sum();
            assert!(
                (trace.re - 1.0).abs() < 1e-8 && trace.im.abs() < 1e-10,
                "seed {seed} step {step}: trace {trace}"
            );
            let anti = (&rho - rho.adjoint()).norm();
            assert!(anti < 1e-9, "seed {seed} step {step}: hermiticity {anti:.3e}");
        }
    }
}

#[test]
fn unitary_limit_matches_schroedinger_propagator() {
    // no collapse operators: evolution is rho -> U rho U^dag with U = exp(-iHt)
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = random_hermitian(&mut rng, 5, 1.0);
    let rho0 = random_density_matrix(&mut rng, 5);
    let t = 1.3;
    let u = expm(&(&h * Complex64::new(0.0, -t)));
    let exact = &u * &rho0 * u.adjoint();
    let numeric = evolve(&rho0, &h, &[], t, 1e-11).unwrap();
    assert!(trace_distance(&numeric, &exact) < 1e-9);
}

#[test]
fn oracle_fixed_point_of_pure_decay() {
    // single decay channel on a two-level system: exact exponential law
    let kappa = 0.8f64;
    let mut l = CMatrix::zeros(2, 2);
    l[(0, 1)] = Complex64::new(kappa.sqrt(), 0.0);
    let h = CMatrix::zeros(2, 2);
    let mut rho0 = CMatrix::zeros(2, 2);
    rho0[(1, 1)] = Complex64::new(1.0, 0.0);
    let t = 1.7;
    let rho = oracle_evolve(&h, &[l], &rho0, t);
    assert!((rho[(1, 1)].re - (-kappa * t).exp()).abs() < 1e-12);
}
