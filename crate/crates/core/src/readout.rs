//! Red-detuned optomechanical readout: scattering rate, pulse efficiency,
//! optical-absorption heating, pulse optimization, and the end-to-end
//! efficiency/rate budget.

use thiserror::Error;

use crate::config::{PulseParams, RateSet};
use crate::optimize::{nelder_mead, ObjectiveSpec};
use crate::units::to_angular;

#[derive(Debug, Error)]
pub enum ReadoutError {
    #[error("kappa_o must be > 0")]
    ZeroOpticalLinewidth,
    #[error("noise budget {0} is infeasible: the noise floor exceeds it at every feasible pulse")]
    InfeasibleNoiseBudget(f64),
}

/// Pump-enhanced optomechanical scattering rate gamma_om = 4 g_om^2 n_o / kappa_o.
/// All rates in Hz; the formula is homogeneous in units so no angular
/// conversion is needed.
pub fn scattering_rate(g_om_hz: f64, n_o: f64, kappa_o_hz: f64) -> Result<f64, ReadoutError> {
    if !(kappa_o_hz > 0.0) {
        return Err(ReadoutError::ZeroOpticalLinewidth);
    }
    assert!(n_o >= 0.0, "photon number must be >= 0");
    Ok(4.0 * g_om_hz * g_om_hz * n_o / kappa_o_hz)
}

/// Phonon -> photon readout efficiency for a pulse of duration tau:
/// (gamma / (gamma + kappa_m)) * (1 - exp(-(gamma + kappa_m) * tau)),
/// with the exponent taken in angular units.
pub fn readout_efficiency(gamma_om_hz: f64, kappa_m_hz: f64, tau_s: f64) -> f64 {
    assert!(tau_s > 0.0, "tau must be > 0");
    let total = gamma_om_hz + kappa_m_hz;
    if total <= 0.0 {
        return 0.0;
    }
    let branching = gamma_om_hz / total;
    // 1 - exp(-x) via expm1 to keep precision for short pulses
    branching * -(-to_angular(total) * tau_s).exp_m1()
}

/// Saturating hot-bath model for optical-absorption heating. The added
/// occupancy after a pulse is n_hot(n_o) * (1 - exp(-2 pi gamma_h(n_o) tau)),
/// with power-law dependence of both the saturation level and the fill rate
/// on the intracavity photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatingModel {
    pub n_hot_ref: f64,
    pub gamma_h_ref: f64,
    pub n_o_ref: f64,
    pub alpha_n: f64,
    pub alpha_g: f64,
}

impl HeatingModel {
    /// Calibration anchored so that (n_o = 45, tau = 500 ns) -> 0.5 quanta.
    pub fn paper_default() -> Self {
        let n_o_ref = 45.0;
        let tau_ref = 500e-9;
        let n_hot_ref = 1.0;
        let gamma_h_ref = -(1.0f64 - 0.5 / n_hot_ref).ln() / to_angular(tau_ref);
        Self {
            n_hot_ref,
            gamma_h_ref,
            n_o_ref,
            alpha_n: 0.33,
            alpha_g: 1.0,
        }
    }

    pub fn n_hot(&self, n_o: f64) -> f64 {
        self.n_hot_ref * (n_o / self.n_o_ref).powf(self.alpha_n)
    }

    pub fn gamma_h(&self, n_o: f64) -> f64 {
        self.gamma_h_ref * (n_o / self.n_o_ref).powf(self.alpha_g)
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("n_hot_ref", self.n_hot_ref),
            ("gamma_h_ref", self.gamma_h_ref),
            ("n_o_ref", self.n_o_ref),
            ("alpha_n", self.alpha_n),
            ("alpha_g", self.alpha_g),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(format!("{name} must be finite and >= 0"));
            }
        }
        if self.n_o_ref == 0.0 {
            return Err("n_o_ref must be > 0".to_string());
        }
        Ok(())
    }
}

impl Default for HeatingModel {
    fn default() -> Self {
        Self::paper_default()
    }
}

/// Added noise quanta accumulated over a pulse (n_o, tau).
pub fn added_noise(model: &HeatingModel, n_o: f64, tau_s: f64) -> f64 {
    if n_o <= 0.0 || tau_s <= 0.0 {
        return 0.0;
    }
    let fill = -(-to_angular(model.gamma_h(n_o)) * tau_s).exp_m1();
    model.n_hot(n_o) * fill
}

/// Readout figures for one pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutResult {
    pub gamma_om: f64,
    pub eta_om: f64,
    pub n_added: f64,
}

/// Evaluate the readout chain at a given pulse.
pub fn evaluate_pulse(
    rates: &RateSet,
    model: &HeatingModel,
    n_o: f64,
    tau_s: f64,
) -> Result<ReadoutResult, ReadoutError> {
    let gamma_om = scattering_rate(rates.g_om, n_o, rates.kappa_o())?;
    Ok(ReadoutResult {
        gamma_om,
        eta_om: readout_efficiency(gamma_om, rates.kappa_m, tau_s),
        n_added: added_noise(model, n_o, tau_s),
    })
}

/// Search box for pulse optimization, in (n_o, tau).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseBounds {
    pub n_o: (f64, f64),
    pub tau: (f64, f64),
}

impl Default for PulseBounds {
    fn default() -> Self {
        Self {
            n_o: (1.0, 1000.0),
            tau: (10e-9, 10e-6),
        }
    }
}

/// Maximize eta_om over (n_o, tau) subject to added_noise <= n_max.
///
/// The constraint is handled as an exact penalty on the negated objective;
/// the simplex runs in log coordinates from the best point of a coarse
/// feasibility scan, and the pulse duration is polished back onto the
/// constraint boundary afterwards.
pub fn optimize_pulse(
    rates: &RateSet,
    model: &HeatingModel,
    n_max: f64,
    bounds: PulseBounds,
    rep_rate: f64,
) -> Result<(PulseParams, ReadoutResult), ReadoutError> {
    optimize_pulse_traced(rates, model, n_max, bounds, rep_rate)
        .map(|(pulse, readout, _)| (pulse, readout))
}

/// Like [`optimize_pulse`], but also returns the simplex evaluation trace in
/// log (n_o, tau) coordinates.
pub fn optimize_pulse_traced(
    rates: &RateSet,
    model: &HeatingModel,
    n_max: f64,
    bounds: PulseBounds,
    rep_rate: f64,
) -> Result<(PulseParams, ReadoutResult, Vec<crate::optimize::TracePoint>), ReadoutError> {
    assert!(n_max > 0.0, "noise budget must be > 0");
    let floor = added_noise(model, bounds.n_o.0, bounds.tau.0);
    if floor > n_max {
        return Err(ReadoutError::InfeasibleNoiseBudget(n_max));
    }

    let eval = |n_o: f64, tau: f64| -> (f64, f64) {
        let gamma = scattering_rate(rates.g_om, n_o, rates.kappa_o()).expect("kappa_o checked");
        (
            readout_efficiency(gamma, rates.kappa_m, tau),
            added_noise(model, n_o, tau),
        )
    };

    let lo = [bounds.n_o.0.ln(), bounds.tau.0.ln()];
    let hi = [bounds.n_o.1.ln(), bounds.tau.1.ln()];
    let cost = move |x: &[f64]| {
        let (eta, noise) = eval(x[0].exp(), x[1].exp());
        -eta + 1e3 * (noise - n_max).max(0.0)
    };

    // coarse scan picks the starting corner of the feasible region
    let mut best_start = [lo[0], lo[1]];
    let mut best_cost = f64::INFINITY;
    let scan = 33;
    for i in 0..scan {
        for j in 0..scan {
            let x = [
                lo[0] + (hi[0] - lo[0]) * i as f64 / (scan - 1) as f64,
                lo[1] + (hi[1] - lo[1]) * j as f64 / (scan - 1) as f64,
            ];
            let c = cost(&x);
            if c < best_cost {
                best_cost = c;
                best_start = x;
            }
        }
    }

    let spec = ObjectiveSpec::new(2, cost).with_bounds(vec![(lo[0], hi[0]), (lo[1], hi[1])]);
    let result = nelder_mead(&spec, &best_start, 1e-12, 2000);
    let mut n_o = result.x[0].exp();
    let mut tau = result.x[1].exp();

    // polish: noise is monotone in tau, so bisect tau onto the boundary if
    // the penalty left a small violation, or extend tau while slack remains
    let (_, noise) = eval(n_o, tau);
    if noise > n_max {
        let (mut a, mut b) = (bounds.tau.0, tau);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if eval(n_o, mid).1 > n_max {
                b = mid;
            } else {
                a = mid;
            }
        }
        tau = a;
    }
    n_o = n_o.clamp(bounds.n_o.0, bounds.n_o.1);
    tau = tau.clamp(bounds.tau.0, bounds.tau.1);

    let readout = evaluate_pulse(rates, model, n_o, tau)?;
    Ok((
        PulseParams {
            n_o,
            tau,
            rep_rate,
        },
        readout,
        result.trace,
    ))
}

/// User-supplied external collection efficiencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExternalEfficiencies {
    /// Fiber-to-device coupling efficiency.
    pub fiber: f64,
    /// Pump filter insertion efficiency.
    pub filter: f64,
    /// Detector quantum efficiency.
    pub detector: f64,
}

impl ExternalEfficiencies {
    pub fn product(&self) -> f64 {
        self.fiber * self.filter * self.detector
    }
}

impl Default for ExternalEfficiencies {
    fn default() -> Self {
        Self {
            fiber: 0.60,
            filter: 0.20,
            detector: 0.90,
        }
    }
}

/// Full efficiency and count-rate chain from qubit excitation to detected
/// optical photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetReport {
    pub eta_pe: f64,
    pub eta_om: f64,
    pub eta_i: f64,
    pub eta_k: f64,
    pub eta_ext: f64,
    pub eta_total: f64,
    pub single_rate: f64,
    pub coincidence_rate: f64,
    pub n_added: f64,
}

/// Combine the chain eta = eta_pe * eta_om * eta_k * eta_ext and the count
/// rates at the given repetition rate.
pub fn efficiency_budget(
    eta_pe: f64,
    readout: &ReadoutResult,
    rates: &RateSet,
    ext: &ExternalEfficiencies,
    rep_rate: f64,
) -> BudgetReport {
    let eta_i = eta_pe * readout.eta_om;
    let eta_k = rates.kappa_o_e / rates.kappa_o();
    let eta_ext = ext.product();
    let eta_total = eta_i * eta_k * eta_ext;
    BudgetReport {
        eta_pe,
        eta_om: readout.eta_om,
        eta_i,
        eta_k,
        eta_ext,
        eta_total,
        single_rate: eta_total * rep_rate,
        coincidence_rate: eta_total * eta_total * rep_rate,
        n_added: readout.n_added,
    }
}
