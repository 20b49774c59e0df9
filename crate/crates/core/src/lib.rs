//! Design-evaluation toolkit for piezo-optomechanical microwave-to-optical
//! quantum transducers.
//!
//! The crate models the pulsed qubit → phonon → photon conversion chain:
//! a resonant piezoelectric swap simulated with a Lindblad master equation,
//! a red-detuned optomechanical readout pulse with an optical-absorption
//! heating model, a reduced coupled-mode picture of piezo/OMC mode
//! hybridization with its loss budgets, and perturbation-theory coupling-rate
//! integrals evaluated by quadrature over user-supplied field data.
//!
//! All rates are stored as ordinary frequencies (Hz, the "/2π" convention);
//! dynamical kernels convert to angular units internally, exactly once.

pub mod config;
pub mod dynamics;
pub mod fields;
pub mod hybridization;
pub mod optimize;
pub mod readout;
pub mod sum;
pub mod svg;
pub mod units;

pub use config::{Config, ConfigError, Provenance};
pub use dynamics::{DecoherenceModel, HilbertSpace, SwapResult};
pub use readout::{BudgetReport, ExternalEfficiencies, HeatingModel, ReadoutResult};
pub use units::{from_angular, to_angular};
