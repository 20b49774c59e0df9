//! Field-integral checks against closed-form values on synthetic datasets,
//! quadrature convergence, permutation invariance of the compensated sums,
//! and the large-file performance budget.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xducer_core::fields::{
    om_coupling_moving_boundary, om_coupling_photoelastic, parse_volume_text, piezo_coupling,
    synth, MaterialConstants, NormalizationEnergies, EPSILON_0,
};

const OMEGA_M: f64 = 5.0e9;
const OMEGA_O: f64 = 1.934e14;

fn energies() -> NormalizationEnergies {
    NormalizationEnergies {
        u_m: 3.2e-20,
        u_q: 1.6e-21,
        denom: 2.5e-18,
    }
}

fn piezo_closed_form(overlap: f64, u: &NormalizationEnergies) -> f64 {
    OMEGA_M * overlap / (4.0 * (2.0 * u.u_m * u.u_q).sqrt())
}

#[test]
fn uniform_piezo_matches_closed_form() {
    let u = energies();
    let (d, e) = (3.1e-7, 2.4e4);
    let samples = synth::uniform_piezo_block(24, d, e);
    let got = piezo_coupling(&samples, &u, OMEGA_M).unwrap();
    let want = piezo_closed_form(synth::piezo_overlap_uniform(d, e), &u);
    assert!((got - want).abs() <= 1e-12 * want.abs(), "{got} vs {want}");
}

#[test]
fn sinusoidal_piezo_matched_and_mismatched_periods() {
    let u = energies();
    let (d, e) = (3.1e-7, 2.4e4);
    // the midpoint rule is exact only in the limit; use the discrete
    // closed form over the same midpoint abscissae for the 1e-12 comparison,
    // and the analytic value for the convergence check below
    let n = 64;
    for (k_d, k_e) in [(3.0, 3.0), (3.0, 7.0)] {
        let samples = synth::sinusoidal_piezo_block(n, d, e, k_d, k_e);
        let got = piezo_coupling(&samples, &u, OMEGA_M).unwrap();
        let discrete: f64 = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) / n as f64;
                (std::f64::consts::TAU * k_d * x).sin() * (std::f64::consts::TAU * k_e * x).sin()
            })
            .sum::<f64>()
            / n as f64
            * d
            * e;
        let want = piezo_closed_form(discrete, &u);
        // mismatched periods sum to a roundoff-level residual, so compare
        // against the scale of the integrand rather than the near-zero value
        let scale = piezo_closed_form(d * e, &u).abs();
        assert!(
            (got - want).abs() <= 1e-12 * scale,
            "k_d={k_d} k_e={k_e}: {got} vs {want}"
        );
    }
    // matched period dominates the mismatched one, as the analytic overlap says
    let matched = piezo_coupling(&synth::sinusoidal_piezo_block(n, d, e, 3.0, 3.0), &u, OMEGA_M)
        .unwrap();
    let mismatched =
        piezo_coupling(&synth::sinusoidal_piezo_block(n, d, e, 3.0, 7.0), &u, OMEGA_M).unwrap();
    assert!(matched.abs() > 50.0 * mismatched.abs());
}

#[test]
fn gaussian_quadrature_error_shrinks_at_second_order() {
    let u = energies();
    let (d, e, sigma) = (3.1e-7, 2.4e4, 0.25);
    let exact = piezo_closed_form(synth::piezo_overlap_gaussian(d, e, sigma), &u);
    let err_at = |n: usize| {
        let got = piezo_coupling(&synth::gaussian_piezo_block(n, d, e, sigma), &u, OMEGA_M)
            .unwrap();
        (got - exact).abs()
    };
    let mut prev = err_at(8);
    for n in [16, 32, 64] {
        let cur = err_at(n);
        assert!(
            prev / cur >= 3.5,
            "error ratio {} at n={n} below second-order expectation",
            prev / cur
        );
        prev = cur;
    }
}

#[test]
fn photoelastic_uniform_matches_closed_form() {
    let u = energies();
    let p11 = -0.094;
    let mat = MaterialConstants::silicon_isotropic(p11);
    let (e_amp, s) = (1.9e5, 4.2e-5);
    let samples = synth::uniform_photoelastic_block(20, e_amp, s);
    let got = om_coupling_photoelastic(&samples, &mat, &u, OMEGA_O).unwrap();
    let want = OMEGA_O * EPSILON_0 * mat.n.powi(4) / 2.0 * p11 * s * e_amp * e_amp / u.denom;
    assert!((got - want).abs() <= 1e-12 * want.abs(), "{got} vs {want}");
}

#[test]
fn moving_boundary_flat_square_matches_closed_form() {
    let u = energies();
    let mat = MaterialConstants::silicon_isotropic(-0.094);
    let (q, e_par, d_perp) = (2.4e-12, 1.9e5, 7.7e-7);
    let samples = synth::flat_boundary(40, q, e_par, d_perp);
    let got = om_coupling_moving_boundary(&samples, &mat, u.denom, OMEGA_O).unwrap();
    let want = -OMEGA_O / 2.0
        * q
        * (mat.delta_eps() * e_par * e_par - mat.delta_eps_inv() * d_perp * d_perp)
        / u.denom;
    assert!((got - want).abs() <= 1e-12 * want.abs(), "{got} vs {want}");

    // outward push with dominant tangential field lowers the optical frequency
    let push_out = synth::flat_boundary(10, 1e-12, 1e5, 0.0);
    let shift = om_coupling_moving_boundary(&push_out, &mat, u.denom, OMEGA_O).unwrap();
    assert!(shift < 0.0);
}

#[test]
fn sample_order_does_not_move_the_integrals() {
    let u = energies();
    let mut samples = synth::gaussian_piezo_block(32, 3.1e-7, 2.4e4, 0.17);
    let reference = piezo_coupling(&samples, &u, OMEGA_M).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..5 {
        samples.shuffle(&mut rng);
        let shuffled = piezo_coupling(&samples, &u, OMEGA_M).unwrap();
        assert!(
            (shuffled - reference).abs() <= 1e-13 * reference.abs(),
            "{shuffled} vs {reference}"
        );
    }
}

#[test]
fn million_sample_round_trip_parses_and_integrates_under_budget() {
    let u = energies();
    let samples = synth::gaussian_piezo_block(100, 3.1e-7, 2.4e4, 0.17);
    assert_eq!(samples.len(), 1_000_000);
    let text = synth::write_volume_text(&samples);

    let start = Instant::now();
    let parsed = parse_volume_text(&text, "synthetic").unwrap();
    let integral = piezo_coupling(&parsed, &u, OMEGA_M).unwrap();
    let elapsed = start.elapsed();

    let direct = piezo_coupling(&samples, &u, OMEGA_M).unwrap();
    assert!((integral - direct).abs() <= 1e-13 * direct.abs());
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "parse + integral took {:.2} s",
        elapsed.as_secs_f64()
    );
    println!("10^6-sample parse + integral: {:.2} s", elapsed.as_secs_f64());
}
