//! Reduced coupled-mode model of a piezoacoustic mode hybridizing with the
//! mechanical modes of an optomechanical crystal, plus the mechanical and
//! qubit loss-budget estimates.
//!
//! The phonon-waveguide-mediated interaction is collapsed into a static
//! symmetric coupling matrix J; diagonalizing diag(freqs) + J gives the
//! hybrid modes, whose couplings and participations follow from the
//! eigenvectors.

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HybridizationError {
    #[error("coupling matrix J is not symmetric (|J - J^T| = {0:.3e})")]
    NonSymmetricCoupling(f64),
    #[error("coupling matrix dimension {0} does not match mode count {1}")]
    DimensionMismatch(usize, usize),
}

/// A bare (uncoupled) mechanical mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BareMode {
    pub freq: f64,
    /// Bare piezoelectric coupling (Hz); nonzero only for the piezo mode.
    pub g_pe0: f64,
    /// Bare optomechanical coupling (Hz); nonzero only for OMC modes.
    pub g_om0: f64,
    /// Bare piezo-region energy fraction.
    pub piezo_weight: f64,
    /// Bare radiation loss (Hz).
    pub kappa_rad0: f64,
}

/// Bare modes plus a symmetric inter-mode coupling matrix (zero diagonal).
#[derive(Debug, Clone)]
pub struct CoupledModeSystem {
    pub modes: Vec<BareMode>,
    pub coupling: DMatrix<f64>,
}

/// One hybridized mode.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridMode {
    pub freq: f64,
    pub g_pe: f64,
    pub g_om: f64,
    /// Piezo-region energy participation.
    pub zeta_m: f64,
    /// Energy-weighted radiation loss inherited from the bare modes (Hz).
    pub kappa_rad: f64,
    pub eigvec: Vec<f64>,
}

/// Cyclic Jacobi diagonalization of a real symmetric matrix with fixed pivot
/// order, so degenerate subspaces come out the same way on every run.
/// Returns (eigenvalues, eigenvectors as columns), unsorted.
fn jacobi_eigen(mut a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale: f64 = a.norm().max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() < 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigenvalues = (0..n).map(|i| a[(i, i)]).collect();
    (eigenvalues, v)
}

/// Diagonalize the coupled-mode system. Output is sorted by frequency
/// ascending; eigenvector signs are fixed so the largest-magnitude entry is
/// positive.
pub fn hybridize(system: &CoupledModeSystem) -> Result<Vec<HybridMode>, HybridizationError> {
    let n = system.modes.len();
    let j = &system.coupling;
    if j.nrows() != n || j.ncols() != n {
        return Err(HybridizationError::DimensionMismatch(j.nrows(), n));
    }
    let asym = (j - j.transpose()).norm();
    if asym > 1e-12 * j.norm().max(1.0) {
        return Err(HybridizationError::NonSymmetricCoupling(asym));
    }
    let mut m = j.clone();
    for (i, mode) in system.modes.iter().enumerate() {
        m[(i, i)] = mode.freq;
    }
    let (vals, vecs) = jacobi_eigen(m);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());

    let mut out = Vec::with_capacity(n);
    for &k in &order {
        let mut c: Vec<f64> = (0..n).map(|i| vecs[(i, k)]).collect();
        let (imax, _) = c
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .unwrap();
        if c[imax] < 0.0 {
            for x in c.iter_mut() {
                *x = -*x;
            }
        }
        let mut g_pe = 0.0;
        let mut g_om = 0.0;
        let mut zeta_m = 0.0;
        let mut kappa_rad = 0.0;
        for (ci, mode) in c.iter().zip(&system.modes) {
            g_pe += ci * mode.g_pe0;
            g_om += ci * mode.g_om0;
            zeta_m += ci * ci * mode.piezo_weight;
            kappa_rad += ci * ci * mode.kappa_rad0;
        }
        out.push(HybridMode {
            freq: vals[k],
            g_pe,
            g_om,
            zeta_m,
            kappa_rad,
            eigvec: c,
        });
    }
    Ok(out)
}

/// Reduced-model configuration: one piezo mode coupled uniformly to a comb of
/// OMC modes.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridizationConfig {
    pub piezo_freq: f64,
    pub piezo_g_pe: f64,
    pub piezo_kappa_rad: f64,
    pub omc_freqs: Vec<f64>,
    pub omc_g_oms: Vec<f64>,
    pub omc_kappa_rads: Vec<f64>,
    /// Piezo-OMC coupling (Hz), uniform across OMC modes.
    pub coupling_j: f64,
    pub sweep_start: f64,
    pub sweep_stop: f64,
    pub sweep_points: usize,
    /// TLS-limited linewidth of lithium niobate (Hz).
    pub kappa_ln: f64,
    /// TLS-limited linewidth of silicon (Hz).
    pub kappa_si: f64,
    /// Minimum |g_pe| for the best-mode selection.
    pub g_pe_threshold: f64,
}

impl Default for HybridizationConfig {
    fn default() -> Self {
        Self {
            piezo_freq: 5.1e9,
            piezo_g_pe: 9.01e6,
            piezo_kappa_rad: 2.3e3,
            omc_freqs: vec![5.0e9, 5.0625e9, 5.125e9, 5.1875e9, 5.25e9],
            omc_g_oms: vec![854e3; 5],
            omc_kappa_rads: vec![2.3e3; 5],
            coupling_j: 12e6,
            sweep_start: 4.98e9,
            sweep_stop: 5.27e9,
            sweep_points: 59,
            kappa_ln: 300e3,
            kappa_si: 4e3,
            g_pe_threshold: 1e6,
        }
    }
}

impl HybridizationConfig {
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if !(self.piezo_freq > 0.0) {
            return Err(("piezo_freq", "must be > 0".to_string()));
        }
        let n = self.omc_freqs.len();
        if n == 0 {
            return Err(("omc_freqs", "at least one OMC mode required".to_string()));
        }
        if self.omc_g_oms.len() != n || self.omc_kappa_rads.len() != n {
            return Err((
                "omc_g_oms",
                format!(
                    "omc_freqs ({n}), omc_g_oms ({}), omc_kappa_rads ({}) must have equal length",
                    self.omc_g_oms.len(),
                    self.omc_kappa_rads.len()
                ),
            ));
        }
        for &f in &self.omc_freqs {
            if !(f > 0.0) {
                return Err(("omc_freqs", "frequencies must be > 0".to_string()));
            }
        }
        if self.sweep_points < 2 {
            return Err(("sweep_points", "must be >= 2".to_string()));
        }
        if !(self.sweep_start < self.sweep_stop) {
            return Err(("sweep_start", "must be < sweep_stop".to_string()));
        }
        Ok(())
    }

    /// Build the coupled-mode system with the piezo mode at `piezo_freq`.
    pub fn system_at(&self, piezo_freq: f64) -> CoupledModeSystem {
        let n = self.omc_freqs.len() + 1;
        let mut modes = Vec::with_capacity(n);
        modes.push(BareMode {
            freq: piezo_freq,
            g_pe0: self.piezo_g_pe,
            g_om0: 0.0,
            piezo_weight: 1.0,
            kappa_rad0: self.piezo_kappa_rad,
        });
        for i in 0..self.omc_freqs.len() {
            modes.push(BareMode {
                freq: self.omc_freqs[i],
                g_pe0: 0.0,
                g_om0: self.omc_g_oms[i],
                piezo_weight: 0.0,
                kappa_rad0: self.omc_kappa_rads[i],
            });
        }
        let mut coupling = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            coupling[(0, i)] = self.coupling_j;
            coupling[(i, 0)] = self.coupling_j;
        }
        CoupledModeSystem { modes, coupling }
    }

    pub fn sweep_freqs(&self) -> Vec<f64> {
        let n = self.sweep_points;
        (0..n)
            .map(|i| {
                self.sweep_start
                    + (self.sweep_stop - self.sweep_start) * i as f64 / (n - 1) as f64
            })
            .collect()
    }
}

/// One point of an anticrossing sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub piezo_freq: f64,
    pub modes: Vec<HybridMode>,
    /// Index of the best simultaneous mode: max |g_om| among modes with
    /// |g_pe| >= threshold, if any qualifies.
    pub best: Option<usize>,
}

/// Hybridize at each piezo frequency of the sweep.
pub fn sweep_anticrossing(
    config: &HybridizationConfig,
    piezo_freqs: &[f64],
) -> Result<Vec<SweepPoint>, HybridizationError> {
    assert!(!piezo_freqs.is_empty(), "sweep range must be non-empty");
    let mut out = Vec::with_capacity(piezo_freqs.len());
    for &f in piezo_freqs {
        let modes = hybridize(&config.system_at(f))?;
        let best = modes
            .iter()
            .enumerate()
            .filter(|(_, m)| m.g_pe.abs() >= config.g_pe_threshold)
            .max_by(|a, b| a.1.g_om.abs().partial_cmp(&b.1.g_om.abs()).unwrap())
            .map(|(i, _)| i);
        out.push(SweepPoint {
            piezo_freq: f,
            modes,
            best,
        });
    }
    Ok(out)
}

/// Total mechanical decoherence: TLS mixing rule plus radiation loss.
pub fn mechanical_loss_budget(zeta_m: f64, kappa_ln: f64, kappa_si: f64, kappa_rad: f64) -> f64 {
    assert!((0.0..=1.0).contains(&zeta_m), "zeta_m must be in [0, 1]");
    zeta_m * kappa_ln + (1.0 - zeta_m) * kappa_si + kappa_rad
}

/// Dielectric loss rate from a loss tangent: kappa = f * tan(delta).
pub fn dielectric_loss_rate(freq: f64, tan_delta: f64) -> f64 {
    assert!(freq > 0.0 && tan_delta >= 0.0);
    freq * tan_delta
}

/// Qubit-loss participation of the piezo region: zeta_q = C_IDT / C_q and the
/// resulting qubit loss contribution.
pub fn qubit_loss_contribution(
    c_idt: f64,
    c_q: f64,
    kappa_ln_dielectric: f64,
) -> (f64, f64) {
    assert!(c_q > 0.0, "qubit capacitance must be > 0");
    let zeta_q = c_idt / c_q;
    (zeta_q, zeta_q * kappa_ln_dielectric)
}

/// Scale a piezoelectric coupling to a new qubit capacitance via the
/// (C_q + C_IDT)^(-1/2) law.
pub fn gpe_capacitance_scaling(g_ref: f64, c_q_ref: f64, c_idt: f64, c_q_new: f64) -> f64 {
    assert!(c_q_ref > 0.0 && c_q_new > 0.0 && c_idt >= 0.0);
    g_ref * ((c_q_ref + c_idt) / (c_q_new + c_idt)).sqrt()
}
