//! Acceptance gate. Each test pins one release criterion with its stated
//! tolerance and prints a single PASS line (run with --nocapture to see them).

mod support;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{
    expm, lindblad_superoperator, symmetric_eigenvalues_bisect, trace_distance, unvec_col,
    vec_col, CMatrix,
};
use xducer_core::config::{RateSet, SimParams};
use xducer_core::dynamics::{evolve, swap_efficiency};
use xducer_core::fields::{parse_volume_text, piezo_coupling, synth, NormalizationEnergies};
use xducer_core::hybridization::{
    hybridize, mechanical_loss_budget, qubit_loss_contribution, BareMode, CoupledModeSystem,
    dielectric_loss_rate,
};
use xducer_core::optimize::{calibrate_heating, nelder_mead, CalibrationFree, ObjectiveSpec};
use xducer_core::readout::{
    added_noise, efficiency_budget, optimize_pulse, readout_efficiency, scattering_rate,
    ExternalEfficiencies, HeatingModel, PulseBounds, ReadoutResult,
};
use xducer_core::to_angular;

#[test]
fn criterion_01_pulse_efficiency_formula() {
    let gamma = scattering_rate(826e3, 45.0, 800e6).unwrap();
    let eta = readout_efficiency(gamma, 20e3, 500e-9);
    assert!((eta - 0.371).abs() <= 0.005, "eta_om = {eta}");
    println!("criterion 01 PASS: eta_om = {eta:.4} (0.371 +/- 0.005)");
}

#[test]
fn criterion_02_scattering_rate() {
    let gamma = scattering_rate(826e3, 45.0, 800e6).unwrap();
    assert!((gamma - 153.5e3).abs() <= 1e3, "gamma_om = {gamma}");
    println!("criterion 02 PASS: gamma_om = {:.1} kHz (153.5 +/- 1 kHz)", gamma / 1e3);
}

#[test]
fn criterion_03_mechanical_loss_budget() {
    let tls = mechanical_loss_budget(0.02, 300e3, 4e3, 0.0);
    assert!((tls - 9.92e3).abs() < 1e-9, "kappa_TLS = {tls}");
    let total = mechanical_loss_budget(0.02, 300e3, 4e3, 2.3e3);
    assert!((total - 12.22e3).abs() < 1e-9, "kappa_m = {total}");
    assert!((10e3..=20e3).contains(&total));
    println!(
        "criterion 03 PASS: kappa_TLS = {:.2} kHz, kappa_m = {:.2} kHz (in 10-20 kHz)",
        tls / 1e3,
        total / 1e3
    );
}

#[test]
fn criterion_04_qubit_loss_contribution() {
    let kappa_ln_diel = dielectric_loss_rate(5e9, 1.7e-5);
    let (zeta_q, delta_kappa_q) = qubit_loss_contribution(0.25e-15, 70e-15, kappa_ln_diel);
    assert!((zeta_q - 3.6e-3).abs() <= 0.02 * 3.6e-3, "zeta_q = {zeta_q}");
    assert!(
        (delta_kappa_q - 304.0).abs() <= 0.02 * 304.0,
        "delta_kappa_q = {delta_kappa_q}"
    );
    println!(
        "criterion 04 PASS: zeta_q = {zeta_q:.2e}, delta_kappa_q = {delta_kappa_q:.0} Hz (+/- 2%)"
    );
}

#[test]
fn criterion_05_swap_efficiency() {
    let rates = RateSet::default(); // g_pe 2.8 MHz, kappa_q 50 kHz, kappa_m 20 kHz
    let res = swap_efficiency(&rates, &SimParams::default(), 8).unwrap();
    assert!(
        (0.93..=0.99).contains(&res.eta_pe),
        "eta_pe = {} outside [0.93, 0.99]",
        res.eta_pe
    );
    let lossless = RateSet {
        kappa_q: 0.0,
        kappa_m: 0.0,
        ..rates
    };
    let ideal = swap_efficiency(&lossless, &SimParams::default(), 8).unwrap();
    assert!((ideal.eta_pe - 1.0).abs() < 1e-6, "lossless eta_pe = {}", ideal.eta_pe);
    println!(
        "criterion 05 PASS: eta_pe = {:.4} in [0.93, 0.99]; lossless = {:.8}",
        res.eta_pe, ideal.eta_pe
    );
}

#[test]
fn criterion_06_end_to_end_budget() {
    let rates = RateSet::default();
    let readout = ReadoutResult {
        gamma_om: 153.5e3,
        eta_om: 0.37,
        n_added: 0.5,
    };
    let report = efficiency_budget(0.95, &readout, &rates, &ExternalEfficiencies::default(), 10e3);
    assert!((report.eta_k - 0.5).abs() < 1e-12);
    assert!(
        (report.eta_total - 0.0187).abs() <= 0.0005,
        "eta_total = {}",
        report.eta_total
    );
    assert!(
        (report.single_rate - 187.0).abs() <= 5.0,
        "single = {}",
        report.single_rate
    );
    assert!(
        (report.coincidence_rate - 3.5).abs() <= 0.2,
        "coincidence = {}",
        report.coincidence_rate
    );
    println!(
        "criterion 06 PASS: eta_total = {:.4}, single = {:.0} Hz, coincidence = {:.2} Hz",
        report.eta_total, report.single_rate, report.coincidence_rate
    );
}

#[test]
fn criterion_07_lindblad_oracle_equivalence() {
    let mut worst_dist = 0.0f64;
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = rng.random_range(2..=8);
        let a = CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let collapse: Vec<CMatrix> = (0..rng.random_range(1..=3))
            .map(|_| {
                CMatrix::from_fn(n, n, |_, _| {
                    Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))
                })
            })
            .collect();
        let b = CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let rho_raw = &b * b.adjoint();
        let tr: Complex64 = (0..n).map(|i| rho_raw[(i, i)]).sum();
        let rho0 = rho_raw * (Complex64::new(1.0, 0.0) / tr);
        let t = rng.random_range(0.5..2.0);

        let numeric = evolve(&rho0, &h, &collapse, t, 1e-11).unwrap();
        let sup = lindblad_superoperator(&h, &collapse);
        let exact = unvec_col(&(expm(&(sup * Complex64::new(t, 0.0))) * vec_col(&rho0)), n);
        let dist = trace_distance(&numeric, &exact);
        assert!(dist < 1e-8, "seed {seed}: trace distance {dist:.3e}");
        worst_dist = worst_dist.max(dist);

        // step-sampled invariants
        let steps = 4;
        let mut rho = rho0.clone();
        for _ in 0..steps {
            rho = evolve(&rho, &h, &collapse, t / steps as f64, 1e-11).unwrap();
            let trace: Complex64 = (0..n).map(|i| rho[(i, i)]).sum();
            assert!((trace.re - 1.0).abs() < 1e-8 && trace.im.abs() < 1e-10);
            assert!((&rho - rho.adjoint()).norm() < 1e-9);
        }
    }
    println!("criterion 07 PASS: 50 systems, worst trace distance {worst_dist:.2e} < 1e-8");
}

#[test]
fn criterion_08_hybridization_sum_rules() {
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        let n = rng.random_range(2..=8);
        let modes: Vec<BareMode> = (0..n)
            .map(|_| BareMode {
                freq: rng.random_range(4.5e9..5.5e9),
                g_pe0: rng.random_range(0.0..10e6),
                g_om0: rng.random_range(0.0..1e6),
                piezo_weight: rng.random_range(0.0..1.0),
                kappa_rad0: rng.random_range(0.0..5e3),
            })
            .collect();
        let mut coupling = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = rng.random_range(-20e6..20e6);
                coupling[(i, j)] = v;
                coupling[(j, i)] = v;
            }
        }
        let system = CoupledModeSystem { modes, coupling };
        let hybrid = hybridize(&system).unwrap();

        let sums = [
            (
                hybrid.iter().map(|m| m.g_pe * m.g_pe).sum::<f64>(),
                system.modes.iter().map(|m| m.g_pe0 * m.g_pe0).sum::<f64>(),
            ),
            (
                hybrid.iter().map(|m| m.g_om * m.g_om).sum::<f64>(),
                system.modes.iter().map(|m| m.g_om0 * m.g_om0).sum::<f64>(),
            ),
            (
                hybrid.iter().map(|m| m.zeta_m).sum::<f64>(),
                system.modes.iter().map(|m| m.piezo_weight).sum::<f64>(),
            ),
        ];
        for (got, want) in sums {
            assert!(
                (got - want).abs() <= 1e-9 * want.max(1.0),
                "seed {seed}: {got} vs {want}"
            );
        }

        // independent eigenvalue check
        let mut full = system.coupling.clone();
        for (i, m) in system.modes.iter().enumerate() {
            full[(i, i)] = m.freq;
        }
        let oracle = symmetric_eigenvalues_bisect(&full, 1e-9 * 5.5e9);
        for (mode, want) in hybrid.iter().zip(&oracle) {
            assert!((mode.freq - want).abs() < 1e-8 * 5.5e9);
        }
    }

    // exact two-mode resonant case
    let j = 15e6;
    let two = CoupledModeSystem {
        modes: vec![
            BareMode {
                freq: 5.0e9,
                g_pe0: 9.01e6,
                g_om0: 0.0,
                piezo_weight: 1.0,
                kappa_rad0: 0.0,
            },
            BareMode {
                freq: 5.0e9,
                g_pe0: 0.0,
                g_om0: 854e3,
                piezo_weight: 0.0,
                kappa_rad0: 0.0,
            },
        ],
        coupling: DMatrix::from_row_slice(2, 2, &[0.0, j, j, 0.0]),
    };
    let hybrid = hybridize(&two).unwrap();
    let split = hybrid[1].freq - hybrid[0].freq;
    assert!((split - 2.0 * j).abs() <= 1e-12 * 2.0 * j);
    for m in &hybrid {
        assert!((m.g_pe.abs() - 9.01e6 * 0.5f64.sqrt()).abs() <= 1e-12 * 9.01e6);
    }
    println!("criterion 08 PASS: 100 systems, sum rules to 1e-9; 2-mode split = 2J to 1e-12");
}

#[test]
fn criterion_09_field_integral_oracles() {
    let u = NormalizationEnergies {
        u_m: 3.2e-20,
        u_q: 1.6e-21,
        denom: 2.5e-18,
    };
    let omega_m = 5.0e9;
    let prefactor = omega_m / (4.0 * (2.0 * u.u_m * u.u_q).sqrt());
    let (d, e) = (3.1e-7, 2.4e4);

    // uniform
    let got = piezo_coupling(&synth::uniform_piezo_block(24, d, e), &u, omega_m).unwrap();
    let want = prefactor * synth::piezo_overlap_uniform(d, e);
    assert!((got - want).abs() <= 1e-12 * want.abs());

    // sinusoidal, matched period (discrete midpoint closed form)
    let n = 64;
    let got = piezo_coupling(&synth::sinusoidal_piezo_block(n, d, e, 3.0, 3.0), &u, omega_m)
        .unwrap();
    let discrete: f64 = (0..n)
        .map(|i| {
            let x = (i as f64 + 0.5) / n as f64;
            (std::f64::consts::TAU * 3.0 * x).sin().powi(2)
        })
        .sum::<f64>()
        / n as f64;
    let want = prefactor * d * e * discrete;
    assert!((got - want).abs() <= 1e-12 * want.abs());

    // grid refinement on the smooth Gaussian family
    let sigma = 0.25;
    let exact = prefactor * synth::piezo_overlap_gaussian(d, e, sigma);
    let err = |n: usize| {
        (piezo_coupling(&synth::gaussian_piezo_block(n, d, e, sigma), &u, omega_m).unwrap()
            - exact)
            .abs()
    };
    let ratios = [err(8) / err(16), err(16) / err(32), err(32) / err(64)];
    for r in ratios {
        assert!(r >= 3.5, "refinement ratio {r}");
    }

    // 10^6-sample budget
    let samples = synth::gaussian_piezo_block(100, d, e, sigma);
    let text = synth::write_volume_text(&samples);
    let start = std::time::Instant::now();
    let parsed = parse_volume_text(&text, "synthetic").unwrap();
    let _ = piezo_coupling(&parsed, &u, omega_m).unwrap();
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 5.0, "10^6-sample parse + integral took {secs:.2} s");

    println!(
        "criterion 09 PASS: closed forms to 1e-12, refinement ratios {:.2}/{:.2}/{:.2}, 10^6 samples in {:.2} s",
        ratios[0], ratios[1], ratios[2], secs
    );
}

#[test]
fn criterion_10_optimizer() {
    // Rosenbrock
    let spec = ObjectiveSpec::new(2, |x: &[f64]| {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    });
    let r = nelder_mead(&spec, &[-1.2, 1.0], 1e-10, 10000);
    assert!(r.converged && (r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);

    // constrained pulse vs dense grid
    let rates = RateSet::default();
    let model = HeatingModel::paper_default();
    let bounds = PulseBounds::default();
    let n_max = 0.5;
    let grid_n = 1001;
    let (ln_lo, ln_hi) = (bounds.n_o.0.ln(), bounds.n_o.1.ln());
    let (lt_lo, lt_hi) = (bounds.tau.0.ln(), bounds.tau.1.ln());
    let mut eta_grid = 0.0f64;
    for i in 0..grid_n {
        let n_o = (ln_lo + (ln_hi - ln_lo) * i as f64 / (grid_n - 1) as f64).exp();
        let gamma = scattering_rate(rates.g_om, n_o, rates.kappa_o()).unwrap();
        for jj in 0..grid_n {
            let tau = (lt_lo + (lt_hi - lt_lo) * jj as f64 / (grid_n - 1) as f64).exp();
            if added_noise(&model, n_o, tau) <= n_max {
                eta_grid = eta_grid.max(readout_efficiency(gamma, rates.kappa_m, tau));
            }
        }
    }
    let (_, readout) = optimize_pulse(&rates, &model, n_max, bounds, 10e3).unwrap();
    assert!(
        (readout.eta_om - eta_grid).abs() < 1e-3,
        "optimizer {} vs grid {}",
        readout.eta_om,
        eta_grid
    );
    assert!(readout.n_added <= n_max * (1.0 + 1e-9));

    // calibration anchor
    let base = HeatingModel {
        n_hot_ref: 1.0,
        ..HeatingModel::paper_default()
    };
    let m = calibrate_heating((45.0, 500e-9, 0.5), CalibrationFree::GammaRef, &base).unwrap();
    let expected = -(0.5f64.ln()) / to_angular(500e-9);
    assert!((m.gamma_h_ref - expected).abs() <= 1e-9 * expected);
    assert!((added_noise(&m, 45.0, 500e-9) - 0.5).abs() <= 1e-9 * 0.5);

    println!(
        "criterion 10 PASS: Rosenbrock to 1e-6, pulse eta {:.5} vs grid {:.5}, anchor to 1e-9",
        readout.eta_om, eta_grid
    );
}
