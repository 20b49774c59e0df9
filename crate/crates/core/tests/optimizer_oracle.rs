//! Brute-force and closed-form oracles for the simplex optimizer: Rosenbrock,
//! a dense grid search over the constrained pulse problem, and the heating
//! calibration anchor.

use xducer_core::config::RateSet;
use xducer_core::optimize::{calibrate_heating, nelder_mead, CalibrationFree, ObjectiveSpec};
use xducer_core::readout::{
    added_noise, evaluate_pulse, optimize_pulse, readout_efficiency, scattering_rate,
    HeatingModel, PulseBounds,
};
use xducer_core::to_angular;

#[test]
fn rosenbrock_from_standard_start() {
    let spec = ObjectiveSpec::new(2, |x: &[f64]| {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    });
    let r = nelder_mead(&spec, &[-1.2, 1.0], 1e-10, 10000);
    assert!(r.converged);
    assert!((r.x[0] - 1.0).abs() < 1e-6, "{:?}", r.x);
    assert!((r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
}

/// Exhaustive log-spaced grid over the pulse box, keeping the best feasible
/// point. 1001 x 1001 evaluations of the closed-form chain.
fn grid_oracle(
    rates: &RateSet,
    model: &HeatingModel,
    n_max: f64,
    bounds: PulseBounds,
) -> (f64, f64, f64) {
    let n = 1001;
    let (ln_lo, ln_hi) = (bounds.n_o.0.ln(), bounds.n_o.1.ln());
    let (lt_lo, lt_hi) = (bounds.tau.0.ln(), bounds.tau.1.ln());
    let mut best = (0.0, bounds.n_o.0, bounds.tau.0);
    for i in 0..n {
        let n_o = (ln_lo + (ln_hi - ln_lo) * i as f64 / (n - 1) as f64).exp();
        let gamma = scattering_rate(rates.g_om, n_o, rates.kappa_o()).unwrap();
        for j in 0..n {
            let tau = (lt_lo + (lt_hi - lt_lo) * j as f64 / (n - 1) as f64).exp();
            if added_noise(model, n_o, tau) > n_max {
                continue;
            }
            let eta = readout_efficiency(gamma, rates.kappa_m, tau);
            if eta > best.0 {
                best = (eta, n_o, tau);
            }
        }
    }
    best
}

#[test]
fn constrained_pulse_matches_dense_grid() {
    let rates = RateSet::default();
    let model = HeatingModel::paper_default();
    let bounds = PulseBounds::default();
    for n_max in [0.25, 0.5, 1.0] {
        let (eta_grid, _, _) = grid_oracle(&rates, &model, n_max, bounds);
        let (pulse, readout) = optimize_pulse(&rates, &model, n_max, bounds, 10e3).unwrap();
        assert!(
            (readout.eta_om - eta_grid).abs() < 1e-3,
            "n_max={n_max}: optimizer {} vs grid {}",
            readout.eta_om,
            eta_grid
        );
        assert!(
            readout.n_added <= n_max * (1.0 + 1e-9),
            "n_max={n_max}: constraint violated with {}",
            readout.n_added
        );
        // the returned pulse reproduces the returned figures
        let check = evaluate_pulse(&rates, &model, pulse.n_o, pulse.tau).unwrap();
        assert!((check.eta_om - readout.eta_om).abs() < 1e-15);
    }
}

#[test]
fn pulse_trace_is_feasible_and_monotone() {
    // the penalty-constrained objective seen by the simplex is monotone in
    // cost_best and every trace point stays inside the log-space box
    let spec = ObjectiveSpec::new(2, |x: &[f64]| x[0] * x[0] + 3.0 * x[1] * x[1])
        .with_bounds(vec![(-2.0, 2.0), (-2.0, 2.0)]);
    let r = nelder_mead(&spec, &[1.5, -1.5], 1e-12, 5000);
    let mut prev = f64::INFINITY;
    for p in &r.trace {
        assert!(p.cost_best <= prev + 1e-15);
        assert!(p.x.iter().all(|v| (-2.0..=2.0).contains(v)));
        prev = p.cost_best;
    }
}

#[test]
fn heating_calibration_reproduces_anchor() {
    let base = HeatingModel {
        n_hot_ref: 1.0,
        ..HeatingModel::paper_default()
    };
    let anchor = (45.0, 500e-9, 0.5);
    let model = calibrate_heating(anchor, CalibrationFree::GammaRef, &base).unwrap();
    let expected = -(0.5f64.ln()) / to_angular(500e-9);
    assert!(
        (model.gamma_h_ref - expected).abs() <= 1e-9 * expected,
        "gamma_h_ref {}",
        model.gamma_h_ref
    );
    let n = added_noise(&model, anchor.0, anchor.1);
    assert!((n - anchor.2).abs() <= 1e-9 * anchor.2, "n_added {n}");
}
