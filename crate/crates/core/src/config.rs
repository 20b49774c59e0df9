//! Validated configuration ingestion.
//!
//! The on-disk format is a flat sectioned key-value text file: `[section]`
//! headers, `key = value` lines, `#` comments, SI units without prefixes.
//! Unknown sections and keys are rejected with a nearest-known-key hint.
//! Every key has a built-in default taken from the reference device, so a
//! minimal config only needs the values it wants to override; provenance
//! (`paper-default` vs `user`) is tracked per key for report output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::hybridization::HybridizationConfig;
use crate::readout::{ExternalEfficiencies, HeatingModel};

/// All frequencies and decay rates of the three-mode chain, in ordinary
/// frequency units (Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct RateSet {
    pub omega_m: f64,
    pub omega_q: f64,
    pub omega_o: f64,
    pub g_pe: f64,
    pub g_om: f64,
    pub kappa_q: f64,
    pub kappa_m: f64,
    pub kappa_o_i: f64,
    pub kappa_o_e: f64,
}

impl RateSet {
    /// Total optical linewidth κ_o = κ_{o,i} + κ_{o,e}.
    pub fn kappa_o(&self) -> f64 {
        self.kappa_o_i + self.kappa_o_e
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("omega_m", self.omega_m),
            ("omega_q", self.omega_q),
            ("omega_o", self.omega_o),
        ];
        for (key, v) in positive {
            if !(v > 0.0) {
                return Err(ConfigError::validation(key, "must be > 0"));
            }
        }
        let nonneg = [
            ("g_pe", self.g_pe),
            ("g_om", self.g_om),
            ("kappa_q", self.kappa_q),
            ("kappa_m", self.kappa_m),
            ("kappa_o_i", self.kappa_o_i),
            ("kappa_o_e", self.kappa_o_e),
        ];
        for (key, v) in nonneg {
            if !(v >= 0.0) {
                return Err(ConfigError::validation(key, "must be >= 0"));
            }
        }
        Ok(())
    }
}

impl Default for RateSet {
    fn default() -> Self {
        Self {
            omega_m: 5.0e9,
            omega_q: 5.0e9,
            omega_o: 1.934e14,
            g_pe: 2.8e6,
            g_om: 826e3,
            kappa_q: 50e3,
            kappa_m: 20e3,
            kappa_o_i: 400e6,
            kappa_o_e: 400e6,
        }
    }
}

/// Readout pulse parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseParams {
    /// Intracavity photon number at pulse peak.
    pub n_o: f64,
    /// Pulse duration (s).
    pub tau: f64,
    /// Repetition rate (Hz).
    pub rep_rate: f64,
}

impl PulseParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.n_o >= 0.0) {
            return Err(ConfigError::validation("n_o", "must be >= 0"));
        }
        if !(self.tau > 0.0) {
            return Err(ConfigError::validation("tau", "must be > 0"));
        }
        if !(self.rep_rate > 0.0) {
            return Err(ConfigError::validation("rep_rate", "must be > 0"));
        }
        if self.rep_rate * self.tau >= 1.0 {
            return Err(ConfigError::validation(
                "rep_rate",
                "duty cycle rep_rate * tau must be < 1",
            ));
        }
        Ok(())
    }
}

impl Default for PulseParams {
    fn default() -> Self {
        Self {
            n_o: 45.0,
            tau: 500e-9,
            rep_rate: 10e3,
        }
    }
}

/// Simulation knobs for the swap master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    /// Phonon Fock truncation.
    pub fock_levels: usize,
    /// Fraction of each kappa reassigned from energy decay to pure dephasing.
    pub dephasing_fraction: f64,
    /// Thermal occupancy of the mechanical bath.
    pub n_th: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            fock_levels: 3,
            dephasing_fraction: 0.0,
            n_th: 0.0,
        }
    }
}

/// How the budget command obtains eta_pe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaPeMode {
    /// Use `eta_pe_fixed` as-is.
    Fixed,
    /// Run the swap master equation.
    Computed,
}

/// How the budget command picks the readout pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseMode {
    /// Use the `[pulse]` section as-is.
    Fixed,
    /// Optimize (n_o, tau) under the noise budget.
    Optimized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetConfig {
    pub ext: ExternalEfficiencies,
    pub eta_pe_mode: EtaPeMode,
    pub eta_pe_fixed: f64,
    pub pulse_mode: PulseMode,
    pub noise_budget: f64,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self {
            ext: ExternalEfficiencies::default(),
            eta_pe_mode: EtaPeMode::Fixed,
            eta_pe_fixed: 0.95,
            pulse_mode: PulseMode::Fixed,
            noise_budget: 0.5,
        }
    }
}

/// Where a configuration value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    PaperDefault,
    User,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::PaperDefault => "paper-default",
            Provenance::User => "user",
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("io error reading config: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid value for `{key}`: {reason}")]
    Validation { key: String, reason: String },
}

impl ConfigError {
    pub(crate) fn validation(key: &str, reason: &str) -> Self {
        ConfigError::Validation {
            key: key.to_string(),
            reason: reason.to_string(),
        }
    }
}

const SECTIONS: &[&str] = &["rates", "pulse", "heating", "hybridization", "budget"];

const RATES_KEYS: &[&str] = &[
    "omega_m",
    "omega_q",
    "omega_o",
    "g_pe",
    "g_om",
    "kappa_q",
    "kappa_m",
    "kappa_o_i",
    "kappa_o_e",
    "fock_levels",
    "dephasing_fraction",
    "n_th",
];
const PULSE_KEYS: &[&str] = &["n_o", "tau", "rep_rate"];
const HEATING_KEYS: &[&str] = &["n_hot_ref", "gamma_h_ref", "n_o_ref", "alpha_n", "alpha_g"];
const HYBRIDIZATION_KEYS: &[&str] = &[
    "piezo_freq",
    "piezo_g_pe",
    "piezo_kappa_rad",
    "omc_freqs",
    "omc_g_oms",
    "omc_kappa_rads",
    "coupling_j",
    "sweep_start",
    "sweep_stop",
    "sweep_points",
    "kappa_ln",
    "kappa_si",
    "g_pe_threshold",
];
const BUDGET_KEYS: &[&str] = &[
    "eta_fiber",
    "eta_filter",
    "eta_detector",
    "eta_pe_mode",
    "eta_pe_fixed",
    "pulse_mode",
    "noise_budget",
];

fn keys_for(section: &str) -> &'static [&'static str] {
    match section {
        "rates" => RATES_KEYS,
        "pulse" => PULSE_KEYS,
        "heating" => HEATING_KEYS,
        "hybridization" => HYBRIDIZATION_KEYS,
        "budget" => BUDGET_KEYS,
        _ => &[],
    }
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn nearest(candidates: &[&'static str], word: &str) -> Option<&'static str> {
    candidates
        .iter()
        .map(|&c| (levenshtein(c, word), c))
        .min()
        .map(|(_, c)| c)
}

/// Fully resolved device configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub rates: RateSet,
    pub pulse: PulseParams,
    pub sim: SimParams,
    pub heating: HeatingModel,
    pub hybridization: HybridizationConfig,
    pub budget: BudgetConfig,
    sections_present: Vec<String>,
    provenance: BTreeMap<String, Provenance>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            rates: RateSet::default(),
            pulse: PulseParams::default(),
            sim: SimParams::default(),
            heating: HeatingModel::paper_default(),
            hybridization: HybridizationConfig::default(),
            budget: BudgetConfig::default(),
            sections_present: Vec::new(),
            provenance: BTreeMap::new(),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        let mut section: Option<String> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    let hint = nearest(SECTIONS, name).unwrap();
                    return Err(ConfigError::Parse {
                        line: line_no,
                        message: format!("unknown section `{name}` (did you mean `{hint}`?)"),
                    });
                }
                if !cfg.sections_present.iter().any(|s| s == name) {
                    cfg.sections_present.push(name.to_string());
                }
                section = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Parse {
                    line: line_no,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            let Some(section) = section.as_deref() else {
                return Err(ConfigError::Parse {
                    line: line_no,
                    message: format!("key `{key}` appears before any [section] header"),
                });
            };
            let known = keys_for(section);
            if !known.contains(&key) {
                let hint = nearest(known, key).unwrap();
                return Err(ConfigError::Parse {
                    line: line_no,
                    message: format!(
                        "unknown key `{key}` in [{section}] (did you mean `{hint}`?)"
                    ),
                });
            }
            cfg.apply(section, key, value, line_no)?;
            cfg.provenance
                .insert(format!("{section}.{key}"), Provenance::User);
        }

        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(
        &mut self,
        section: &str,
        key: &str,
        value: &str,
        line: usize,
    ) -> Result<(), ConfigError> {
        let bad = |msg: String| ConfigError::Parse { line, message: msg };
        let num = |v: &str| -> Result<f64, ConfigError> {
            v.parse::<f64>()
                .map_err(|_| bad(format!("`{key}`: cannot parse `{v}` as a number")))
        };
        let list = |v: &str| -> Result<Vec<f64>, ConfigError> {
            v.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(format!("`{key}`: cannot parse `{s}` as a number")))
                })
                .collect()
        };
        match (section, key) {
            ("rates", "omega_m") => self.rates.omega_m = num(value)?,
            ("rates", "omega_q") => self.rates.omega_q = num(value)?,
            ("rates", "omega_o") => self.rates.omega_o = num(value)?,
            ("rates", "g_pe") => self.rates.g_pe = num(value)?,
            ("rates", "g_om") => self.rates.g_om = num(value)?,
            ("rates", "kappa_q") => self.rates.kappa_q = num(value)?,
            ("rates", "kappa_m") => self.rates.kappa_m = num(value)?,
            ("rates", "kappa_o_i") => self.rates.kappa_o_i = num(value)?,
            ("rates", "kappa_o_e") => self.rates.kappa_o_e = num(value)?,
            ("rates", "fock_levels") => {
                self.sim.fock_levels = value
                    .parse::<usize>()
                    .map_err(|_| bad(format!("`fock_levels`: `{value}` is not an integer")))?;
            }
            ("rates", "dephasing_fraction") => self.sim.dephasing_fraction = num(value)?,
            ("rates", "n_th") => self.sim.n_th = num(value)?,
            ("pulse", "n_o") => self.pulse.n_o = num(value)?,
            ("pulse", "tau") => self.pulse.tau = num(value)?,
            ("pulse", "rep_rate") => self.pulse.rep_rate = num(value)?,
            ("heating", "n_hot_ref") => self.heating.n_hot_ref = num(value)?,
            ("heating", "gamma_h_ref") => self.heating.gamma_h_ref = num(value)?,
            ("heating", "n_o_ref") => self.heating.n_o_ref = num(value)?,
            ("heating", "alpha_n") => self.heating.alpha_n = num(value)?,
            ("heating", "alpha_g") => self.heating.alpha_g = num(value)?,
            ("hybridization", "piezo_freq") => self.hybridization.piezo_freq = num(value)?,
            ("hybridization", "piezo_g_pe") => self.hybridization.piezo_g_pe = num(value)?,
            ("hybridization", "piezo_kappa_rad") => {
                self.hybridization.piezo_kappa_rad = num(value)?
            }
            ("hybridization", "omc_freqs") => self.hybridization.omc_freqs = list(value)?,
            ("hybridization", "omc_g_oms") => self.hybridization.omc_g_oms = list(value)?,
            ("hybridization", "omc_kappa_rads") => {
                self.hybridization.omc_kappa_rads = list(value)?
            }
            ("hybridization", "coupling_j") => self.hybridization.coupling_j = num(value)?,
            ("hybridization", "sweep_start") => self.hybridization.sweep_start = num(value)?,
            ("hybridization", "sweep_stop") => self.hybridization.sweep_stop = num(value)?,
            ("hybridization", "sweep_points") => {
                self.hybridization.sweep_points = value
                    .parse::<usize>()
                    .map_err(|_| bad(format!("`sweep_points`: `{value}` is not an integer")))?;
            }
            ("hybridization", "kappa_ln") => self.hybridization.kappa_ln = num(value)?,
            ("hybridization", "kappa_si") => self.hybridization.kappa_si = num(value)?,
            ("hybridization", "g_pe_threshold") => {
                self.hybridization.g_pe_threshold = num(value)?
            }
            ("budget", "eta_fiber") => self.budget.ext.fiber = num(value)?,
            ("budget", "eta_filter") => self.budget.ext.filter = num(value)?,
            ("budget", "eta_detector") => self.budget.ext.detector = num(value)?,
            ("budget", "eta_pe_mode") => {
                self.budget.eta_pe_mode = match value {
                    "fixed" => EtaPeMode::Fixed,
                    "computed" => EtaPeMode::Computed,
                    other => {
                        return Err(bad(format!(
                            "`eta_pe_mode`: expected `fixed` or `computed`, got `{other}`"
                        )))
                    }
                }
            }
            ("budget", "eta_pe_fixed") => self.budget.eta_pe_fixed = num(value)?,
            ("budget", "pulse_mode") => {
                self.budget.pulse_mode = match value {
                    "fixed" => PulseMode::Fixed,
                    "optimized" => PulseMode::Optimized,
                    other => {
                        return Err(bad(format!(
                            "`pulse_mode`: expected `fixed` or `optimized`, got `{other}`"
                        )))
                    }
                }
            }
            ("budget", "noise_budget") => self.budget.noise_budget = num(value)?,
            _ => unreachable!("key sets are checked before apply"),
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        self.rates.validate()?;
        self.pulse.validate()?;
        if self.sim.fock_levels < 2 {
            return Err(ConfigError::validation("fock_levels", "must be >= 2"));
        }
        if !(0.0..=1.0).contains(&self.sim.dephasing_fraction) {
            return Err(ConfigError::validation(
                "dephasing_fraction",
                "must be in [0, 1]",
            ));
        }
        if !(self.sim.n_th >= 0.0) {
            return Err(ConfigError::validation("n_th", "must be >= 0"));
        }
        self.heating.validate().map_err(|reason| ConfigError::Validation {
            key: "heating".to_string(),
            reason,
        })?;
        self.hybridization
            .validate()
            .map_err(|(key, reason)| ConfigError::Validation {
                key: key.to_string(),
                reason,
            })?;
        let b = &self.budget;
        for (key, v) in [
            ("eta_fiber", b.ext.fiber),
            ("eta_filter", b.ext.filter),
            ("eta_detector", b.ext.detector),
            ("eta_pe_fixed", b.eta_pe_fixed),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::validation(key, "must be in [0, 1]"));
            }
        }
        if !(b.noise_budget > 0.0) {
            return Err(ConfigError::validation("noise_budget", "must be > 0"));
        }
        Ok(())
    }

    pub fn has_section(&self, name: &str) -> bool {
        self.sections_present.iter().any(|s| s == name)
    }

    pub fn provenance(&self, section: &str, key: &str) -> Provenance {
        self.provenance
            .get(&format!("{section}.{key}"))
            .copied()
            .unwrap_or(Provenance::PaperDefault)
    }

    /// Canonical echo of the resolved configuration. Deterministic: the same
    /// parsed config always dumps to the same bytes.
    pub fn dump(&self) -> String {
        fn fmt_list(v: &[f64]) -> String {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
        let mut out = String::new();
        let r = &self.rates;
        let _ = writeln!(out, "[rates]");
        for (k, v) in [
            ("omega_m", r.omega_m),
            ("omega_q", r.omega_q),
            ("omega_o", r.omega_o),
            ("g_pe", r.g_pe),
            ("g_om", r.g_om),
            ("kappa_q", r.kappa_q),
            ("kappa_m", r.kappa_m),
            ("kappa_o_i", r.kappa_o_i),
            ("kappa_o_e", r.kappa_o_e),
        ] {
            let _ = writeln!(out, "{k} = {v}");
        }
        let _ = writeln!(out, "fock_levels = {}", self.sim.fock_levels);
        let _ = writeln!(out, "dephasing_fraction = {}", self.sim.dephasing_fraction);
        let _ = writeln!(out, "n_th = {}", self.sim.n_th);
        let p = &self.pulse;
        let _ = writeln!(out, "\n[pulse]");
        let _ = writeln!(out, "n_o = {}", p.n_o);
        let _ = writeln!(out, "tau = {}", p.tau);
        let _ = writeln!(out, "rep_rate = {}", p.rep_rate);
        let h = &self.heating;
        let _ = writeln!(out, "\n[heating]");
        let _ = writeln!(out, "n_hot_ref = {}", h.n_hot_ref);
        let _ = writeln!(out, "gamma_h_ref = {}", h.gamma_h_ref);
        let _ = writeln!(out, "n_o_ref = {}", h.n_o_ref);
        let _ = writeln!(out, "alpha_n = {}", h.alpha_n);
        let _ = writeln!(out, "alpha_g = {}", h.alpha_g);
        let y = &self.hybridization;
        let _ = writeln!(out, "\n[hybridization]");
        let _ = writeln!(out, "piezo_freq = {}", y.piezo_freq);
        let _ = writeln!(out, "piezo_g_pe = {}", y.piezo_g_pe);
        let _ = writeln!(out, "piezo_kappa_rad = {}", y.piezo_kappa_rad);
        let _ = writeln!(out, "omc_freqs = {}", fmt_list(&y.omc_freqs));
        let _ = writeln!(out, "omc_g_oms = {}", fmt_list(&y.omc_g_oms));
        let _ = writeln!(out, "omc_kappa_rads = {}", fmt_list(&y.omc_kappa_rads));
        let _ = writeln!(out, "coupling_j = {}", y.coupling_j);
        let _ = writeln!(out, "sweep_start = {}", y.sweep_start);
        let _ = writeln!(out, "sweep_stop = {}", y.sweep_stop);
        let _ = writeln!(out, "sweep_points = {}", y.sweep_points);
        let _ = writeln!(out, "kappa_ln = {}", y.kappa_ln);
        let _ = writeln!(out, "kappa_si = {}", y.kappa_si);
        let _ = writeln!(out, "g_pe_threshold = {}", y.g_pe_threshold);
        let b = &self.budget;
        let _ = writeln!(out, "\n[budget]");
        let _ = writeln!(out, "eta_fiber = {}", b.ext.fiber);
        let _ = writeln!(out, "eta_filter = {}", b.ext.filter);
        let _ = writeln!(out, "eta_detector = {}", b.ext.detector);
        let _ = writeln!(
            out,
            "eta_pe_mode = {}",
            match b.eta_pe_mode {
                EtaPeMode::Fixed => "fixed",
                EtaPeMode::Computed => "computed",
            }
        );
        let _ = writeln!(out, "eta_pe_fixed = {}", b.eta_pe_fixed);
        let _ = writeln!(
            out,
            "pulse_mode = {}",
            match b.pulse_mode {
                PulseMode::Fixed => "fixed",
                PulseMode::Optimized => "optimized",
            }
        );
        let _ = writeln!(out, "noise_budget = {}", b.noise_budget);
        out
    }
}
