//! Python bindings for the transducer toolkit: device rates, the readout and
//! heating chain, the swap simulation, loss budgets, and pulse optimization.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use xducer_core::config::{RateSet, SimParams};
use xducer_core::dynamics;
use xducer_core::hybridization;
use xducer_core::readout;
use xducer_core::readout::{ExternalEfficiencies, PulseBounds};

/// Frequencies and decay rates of the qubit-phonon-photon chain, in Hz.
#[pyclass(name = "Rates", skip_from_py_object)]
#[derive(Clone)]
struct PyRates {
    inner: RateSet,
}

#[pymethods]
impl PyRates {
    #[new]
    #[pyo3(signature = (
        g_pe = 2.8e6, g_om = 826e3, kappa_q = 50e3, kappa_m = 20e3,
        kappa_o_i = 400e6, kappa_o_e = 400e6,
        omega_m = 5.0e9, omega_q = 5.0e9, omega_o = 1.934e14,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        g_pe: f64,
        g_om: f64,
        kappa_q: f64,
        kappa_m: f64,
        kappa_o_i: f64,
        kappa_o_e: f64,
        omega_m: f64,
        omega_q: f64,
        omega_o: f64,
    ) -> PyResult<Self> {
        let inner = RateSet {
            omega_m,
            omega_q,
            omega_o,
            g_pe,
            g_om,
            kappa_q,
            kappa_m,
            kappa_o_i,
            kappa_o_e,
        };
        inner
            .validate()
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    #[getter]
    fn kappa_o(&self) -> f64 {
        self.inner.kappa_o()
    }

    #[getter]
    fn g_pe(&self) -> f64 {
        self.inner.g_pe
    }

    #[getter]
    fn g_om(&self) -> f64 {
        self.inner.g_om
    }

    fn __repr__(&self) -> String {
        format!(
            "Rates(g_pe={}, g_om={}, kappa_q={}, kappa_m={}, kappa_o={})",
            self.inner.g_pe,
            self.inner.g_om,
            self.inner.kappa_q,
            self.inner.kappa_m,
            self.inner.kappa_o()
        )
    }
}

/// Saturating hot-bath model of optical-absorption heating.
#[pyclass(name = "Heating", skip_from_py_object)]
#[derive(Clone)]
struct PyHeating {
    inner: readout::HeatingModel,
}

#[pymethods]
impl PyHeating {
    /// Defaults are anchored so (n_o = 45, tau = 500 ns) adds 0.5 quanta.
    #[new]
    #[pyo3(signature = (n_hot_ref = None, gamma_h_ref = None, n_o_ref = None, alpha_n = None, alpha_g = None))]
    fn new(
        n_hot_ref: Option<f64>,
        gamma_h_ref: Option<f64>,
        n_o_ref: Option<f64>,
        alpha_n: Option<f64>,
        alpha_g: Option<f64>,
    ) -> PyResult<Self> {
        let base = readout::HeatingModel::paper_default();
        let inner = readout::HeatingModel {
            n_hot_ref: n_hot_ref.unwrap_or(base.n_hot_ref),
            gamma_h_ref: gamma_h_ref.unwrap_or(base.gamma_h_ref),
            n_o_ref: n_o_ref.unwrap_or(base.n_o_ref),
            alpha_n: alpha_n.unwrap_or(base.alpha_n),
            alpha_g: alpha_g.unwrap_or(base.alpha_g),
        };
        inner.validate().map_err(PyValueError::new_err)?;
        Ok(Self { inner })
    }

    fn added_noise(&self, n_o: f64, tau: f64) -> f64 {
        readout::added_noise(&self.inner, n_o, tau)
    }
}

/// gamma_om = 4 g_om^2 n_o / kappa_o, all rates in Hz.
#[pyfunction]
fn scattering_rate(g_om: f64, n_o: f64, kappa_o: f64) -> PyResult<f64> {
    readout::scattering_rate(g_om, n_o, kappa_o).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Phonon-to-photon readout efficiency for a pulse of duration tau seconds.
#[pyfunction]
fn readout_efficiency(gamma_om: f64, kappa_m: f64, tau: f64) -> f64 {
    readout::readout_efficiency(gamma_om, kappa_m, tau)
}

/// Master-equation simulation of the resonant swap; returns eta_pe.
#[pyfunction]
#[pyo3(signature = (rates, fock_levels = 3, samples = 8))]
fn swap_efficiency(rates: &PyRates, fock_levels: usize, samples: usize) -> PyResult<f64> {
    let sim = SimParams {
        fock_levels,
        ..SimParams::default()
    };
    dynamics::swap_efficiency(&rates.inner, &sim, samples)
        .map(|r| r.eta_pe)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Maximize eta_om over (n_o, tau) with added noise held below n_max.
/// Returns (n_o, tau, eta_om, n_added).
#[pyfunction]
#[pyo3(signature = (rates, heating, n_max, rep_rate = 10e3))]
fn optimize_pulse(
    rates: &PyRates,
    heating: &PyHeating,
    n_max: f64,
    rep_rate: f64,
) -> PyResult<(f64, f64, f64, f64)> {
    let (pulse, result) = readout::optimize_pulse(
        &rates.inner,
        &heating.inner,
        n_max,
        PulseBounds::default(),
        rep_rate,
    )
    .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((pulse.n_o, pulse.tau, result.eta_om, result.n_added))
}

/// Full chain eta = eta_pe * eta_om * eta_k * eta_ext and count rates.
#[pyfunction]
#[pyo3(signature = (eta_pe, eta_om, rates, fiber = 0.60, filter = 0.20, detector = 0.90, rep_rate = 10e3))]
#[allow(clippy::too_many_arguments)]
fn efficiency_budget<'py>(
    py: Python<'py>,
    eta_pe: f64,
    eta_om: f64,
    rates: &PyRates,
    fiber: f64,
    filter: f64,
    detector: f64,
    rep_rate: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let readout_result = readout::ReadoutResult {
        gamma_om: 0.0,
        eta_om,
        n_added: 0.0,
    };
    let ext = ExternalEfficiencies {
        fiber,
        filter,
        detector,
    };
    let report =
        readout::efficiency_budget(eta_pe, &readout_result, &rates.inner, &ext, rep_rate);
    let dict = PyDict::new(py);
    dict.set_item("eta_pe", report.eta_pe)?;
    dict.set_item("eta_om", report.eta_om)?;
    dict.set_item("eta_k", report.eta_k)?;
    dict.set_item("eta_ext", report.eta_ext)?;
    dict.set_item("eta_total", report.eta_total)?;
    dict.set_item("single_rate", report.single_rate)?;
    dict.set_item("coincidence_rate", report.coincidence_rate)?;
    Ok(dict)
}

/// TLS mixing rule plus radiation loss:
/// zeta * kappa_LN + (1 - zeta) * kappa_Si + kappa_rad.
#[pyfunction]
#[pyo3(signature = (zeta_m, kappa_ln, kappa_si, kappa_rad = 0.0))]
fn mechanical_loss_budget(zeta_m: f64, kappa_ln: f64, kappa_si: f64, kappa_rad: f64) -> f64 {
    hybridization::mechanical_loss_budget(zeta_m, kappa_ln, kappa_si, kappa_rad)
}

/// kappa = f * tan(delta).
#[pyfunction]
fn dielectric_loss_rate(freq: f64, tan_delta: f64) -> f64 {
    hybridization::dielectric_loss_rate(freq, tan_delta)
}

/// Returns (zeta_q, delta_kappa_q) for an IDT of capacitance c_idt on a qubit
/// of capacitance c_q.
#[pyfunction]
fn qubit_loss_contribution(c_idt: f64, c_q: f64, kappa_ln_dielectric: f64) -> (f64, f64) {
    hybridization::qubit_loss_contribution(c_idt, c_q, kappa_ln_dielectric)
}

/// Rescale g_pe to a new qubit capacitance via the (C_q + C_IDT)^(-1/2) law.
#[pyfunction]
fn gpe_capacitance_scaling(g_ref: f64, c_q_ref: f64, c_idt: f64, c_q_new: f64) -> f64 {
    hybridization::gpe_capacitance_scaling(g_ref, c_q_ref, c_idt, c_q_new)
}

#[pymodule]
fn xducer_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRates>()?;
    m.add_class::<PyHeating>()?;
    m.add_function(wrap_pyfunction!(scattering_rate, m)?)?;
    m.add_function(wrap_pyfunction!(readout_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(swap_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_pulse, m)?)?;
    m.add_function(wrap_pyfunction!(efficiency_budget, m)?)?;
    m.add_function(wrap_pyfunction!(mechanical_loss_budget, m)?)?;
    m.add_function(wrap_pyfunction!(dielectric_loss_rate, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_loss_contribution, m)?)?;
    m.add_function(wrap_pyfunction!(gpe_capacitance_scaling, m)?)?;
    Ok(())
}
