//! Lindblad master-equation simulation of the resonant qubit-phonon swap.
//!
//! The Hilbert space is qubit ⊗ phonon with a configurable Fock truncation.
//! Rates come in as ordinary frequencies (Hz) and are converted to angular
//! units here, once, when operators are built.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::config::{RateSet, SimParams};
use crate::units::to_angular;

pub type CMatrix = DMatrix<Complex64>;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("operator dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),
    #[error("step size underflow at t = {t:.3e} s (stiff system or tolerance too tight)")]
    StepSizeUnderflow { t: f64 },
}

/// Qubit ⊗ phonon Hilbert space. The qubit dimension is fixed at 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertSpace {
    phonon_dim: usize,
}

impl HilbertSpace {
    /// `phonon_dim` is the Fock truncation N >= 2.
    pub fn new(phonon_dim: usize) -> Self {
        assert!(phonon_dim >= 2, "Fock truncation must be >= 2");
        Self { phonon_dim }
    }

    pub fn phonon_dim(&self) -> usize {
        self.phonon_dim
    }

    pub fn dim(&self) -> usize {
        2 * self.phonon_dim
    }

    /// Qubit lowering operator sigma^- tensor identity.
    pub fn qubit_lowering(&self) -> CMatrix {
        let n = self.phonon_dim;
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        // basis ordering |q> tensor |n>, index = q*N + n
        for k in 0..n {
            m[(k, n + k)] = ONE;
        }
        m
    }

    /// Phonon annihilation operator identity tensor b.
    pub fn phonon_lowering(&self) -> CMatrix {
        let n = self.phonon_dim;
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for q in 0..2 {
            for k in 1..n {
                m[(q * n + k - 1, q * n + k)] = Complex64::new((k as f64).sqrt(), 0.0);
            }
        }
        m
    }

    /// Basis state |q, n_phonon>.
    pub fn basis_state(&self, qubit_excited: bool, n_phonon: usize) -> CMatrix {
        let dim = self.dim();
        let idx = usize::from(qubit_excited) * self.phonon_dim + n_phonon;
        assert!(n_phonon < self.phonon_dim);
        let mut rho = CMatrix::zeros(dim, dim);
        rho[(idx, idx)] = ONE;
        rho
    }
}

impl Default for HilbertSpace {
    fn default() -> Self {
        Self::new(3)
    }
}

/// Collapse-operator model for the swap simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecoherenceModel {
    /// Energy decay on both modes at the full kappa.
    DecayOnly,
    /// Fraction `f` of each kappa reassigned to pure dephasing, the rest
    /// remaining as energy decay.
    DecayPlusDephasing { fraction: f64 },
}

/// Swap Hamiltonian g(b^dag c + b c^dag) + Delta c^dag c, in angular units.
pub fn build_swap_hamiltonian(g_pe_hz: f64, detuning_hz: f64, space: &HilbertSpace) -> CMatrix {
    let c = space.qubit_lowering();
    let b = space.phonon_lowering();
    let g = Complex64::new(to_angular(g_pe_hz), 0.0);
    let delta = Complex64::new(to_angular(detuning_hz), 0.0);
    let coupling = b.adjoint() * &c + &b * c.adjoint();
    coupling * g + c.adjoint() * &c * delta
}

/// Collapse operators for qubit and phonon loss, optionally with dephasing and
/// a thermal mechanical bath at occupancy `n_th`.
pub fn build_collapse_ops(
    kappa_q_hz: f64,
    kappa_m_hz: f64,
    model: DecoherenceModel,
    n_th: f64,
    space: &HilbertSpace,
) -> Vec<CMatrix> {
    let fraction = match model {
        DecoherenceModel::DecayOnly => 0.0,
        DecoherenceModel::DecayPlusDephasing { fraction } => fraction.clamp(0.0, 1.0),
    };
    let c = space.qubit_lowering();
    let b = space.phonon_lowering();
    let mut ops = Vec::new();
    let mut push_scaled = |op: CMatrix, rate_ang: f64| {
        if rate_ang > 0.0 {
            ops.push(op * Complex64::new(rate_ang.sqrt(), 0.0));
        }
    };
    let kq = to_angular(kappa_q_hz);
    let km = to_angular(kappa_m_hz);
    push_scaled(c.clone(), kq * (1.0 - fraction));
    push_scaled(b.clone(), km * (1.0 - fraction) * (n_th + 1.0));
    push_scaled(b.adjoint(), km * (1.0 - fraction) * n_th);
    push_scaled(c.adjoint() * &c, kq * fraction / 2.0);
    push_scaled(b.adjoint() * &b, km * fraction / 2.0);
    ops
}

/// Right-hand side of the master equation:
/// -i[H, rho] + sum_k ( L rho L^dag - 1/2 {L^dag L, rho} ).
pub fn lindblad_rhs(
    rho: &CMatrix,
    hamiltonian: &CMatrix,
    collapse: &[CMatrix],
) -> Result<CMatrix, DynamicsError> {
    if rho.nrows() != hamiltonian.nrows() {
        return Err(DynamicsError::DimensionMismatch(
            rho.nrows(),
            hamiltonian.nrows(),
        ));
    }
    let mut out = (hamiltonian * rho - rho * hamiltonian) * (-I);
    for l in collapse {
        if l.nrows() != rho.nrows() {
            return Err(DynamicsError::DimensionMismatch(rho.nrows(), l.nrows()));
        }
        let ldag = l.adjoint();
        let ldl = &ldag * l;
        out += l * rho * &ldag;
        out -= (&ldl * rho + rho * &ldl) * Complex64::new(0.5, 0.0);
    }
    Ok(out)
}

/// Dormand-Prince 5(4) Butcher tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn error_norm(err: &CMatrix, y: &CMatrix, atol: f64, rtol: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (e, v) in err.iter().zip(y.iter()) {
        let scale = atol + rtol * v.norm();
        worst = worst.max(e.norm() / scale);
    }
    worst
}

/// Integrate the master equation from 0 to `t_final` with an adaptive
/// embedded Runge-Kutta pair. No trace renormalization is applied; trace
/// drift is left visible as a diagnostic.
pub fn evolve(
    rho0: &CMatrix,
    hamiltonian: &CMatrix,
    collapse: &[CMatrix],
    t_final: f64,
    tol: f64,
) -> Result<CMatrix, DynamicsError> {
    assert!(t_final > 0.0, "t_final must be > 0");
    let rtol = tol;
    let atol = tol * 1e-2;
    let mut t = 0.0;
    let mut y = rho0.clone();
    let mut h = t_final / 100.0;
    let h_min = t_final * 1e-14;
    let mut k: Vec<CMatrix> = Vec::with_capacity(7);

    while t < t_final {
        if h < h_min {
            return Err(DynamicsError::StepSizeUnderflow { t });
        }
        if t + h > t_final {
            h = t_final - t;
        }
        k.clear();
        k.push(lindblad_rhs(&y, hamiltonian, collapse)?);
        for stage in 0..6 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = A[stage][j];
                if a != 0.0 {
                    ys += kj * Complex64::new(h * a, 0.0);
                }
            }
            k.push(lindblad_rhs(&ys, hamiltonian, collapse)?);
        }
        let mut y5 = y.clone();
        let mut err = CMatrix::zeros(y.nrows(), y.ncols());
        for (j, kj) in k.iter().enumerate() {
            if B5[j] != 0.0 {
                y5 += kj * Complex64::new(h * B5[j], 0.0);
            }
            let d = B5[j] - B4[j];
            if d != 0.0 {
                err += kj * Complex64::new(h * d, 0.0);
            }
        }
        let norm = error_norm(&err, &y5, atol, rtol);
        if norm <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = if norm > 0.0 {
            (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
    }
    Ok(y)
}

/// One sampled point of the swap population trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopSample {
    pub t: f64,
    pub pop_qubit: f64,
    pub pop_phonon: f64,
    pub trace: f64,
}

/// Outcome of the resonant swap protocol.
#[derive(Debug, Clone)]
pub struct SwapResult {
    pub eta_pe: f64,
    pub t_swap: f64,
    pub trace: Vec<PopSample>,
}

pub fn expectation(rho: &CMatrix, op: &CMatrix) -> f64 {
    (op * rho).trace().re
}

/// Simulate the resonant swap: qubit excited, phonon vacuum, evolve for
/// t = pi / (2 g) in angular units, report the final phonon occupation.
pub fn swap_efficiency(
    rates: &RateSet,
    sim: &SimParams,
    samples: usize,
) -> Result<SwapResult, DynamicsError> {
    assert!(rates.g_pe > 0.0, "swap requires g_pe > 0");
    let space = HilbertSpace::new(sim.fock_levels);
    let h = build_swap_hamiltonian(rates.g_pe, 0.0, &space);
    let model = if sim.dephasing_fraction > 0.0 {
        DecoherenceModel::DecayPlusDephasing {
            fraction: sim.dephasing_fraction,
        }
    } else {
        DecoherenceModel::DecayOnly
    };
    let collapse = build_collapse_ops(rates.kappa_q, rates.kappa_m, model, sim.n_th, &space);
    let t_swap = std::f64::consts::PI / (2.0 * to_angular(rates.g_pe));

    let nq = {
        let c = space.qubit_lowering();
        c.adjoint() * c
    };
    let nb = {
        let b = space.phonon_lowering();
        b.adjoint() * b
    };

    let mut rho = space.basis_state(true, 0);
    let mut trace = Vec::with_capacity(samples + 1);
    let record = |rho: &CMatrix, t: f64, trace: &mut Vec<PopSample>| {
        trace.push(PopSample {
            t,
            pop_qubit: expectation(rho, &nq),
            pop_phonon: expectation(rho, &nb),
            trace: rho.trace().re,
        });
    };
    record(&rho, 0.0, &mut trace);
    let samples = samples.max(1);
    let dt = t_swap / samples as f64;
    for i in 1..=samples {
        rho = evolve(&rho, &h, &collapse, dt, 1e-10)?;
        record(&rho, dt * i as f64, &mut trace);
    }
    let eta_pe = expectation(&rho, &nb);
    Ok(SwapResult {
        eta_pe,
        t_swap,
        trace,
    })
}
