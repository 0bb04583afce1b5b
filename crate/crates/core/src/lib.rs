//! Bayesian reliability inference for fleets of repairable systems whose
//! failure causes compete and share an unobserved system-level frailty.
//!
//! Cause-specific intensities follow a power-law process in the orthogonal
//! `(β, α)` parametrization, which gives closed-form gamma posteriors for the
//! PLP parameters ([`plp`]). The frailty distribution is modelled
//! nonparametrically as a Dirichlet-process mixture of log-normals and
//! sampled with a slice/Gibbs + HMC hybrid ([`dpm`]). [`sim`] generates
//! synthetic fleets and [`diagnostics`] provides convergence checks and the
//! Monte Carlo evaluation harness.

pub mod cli;
pub mod config;
pub mod data;
pub mod diagnostics;
pub mod dist;
pub mod dpm;
pub mod error;
pub mod harness;
pub mod plp;
pub mod sim;

pub use data::{CountSummary, DesignOverrides, FailureDataset, FailureRecord, ObservationDesign};
pub use error::{Error, Result};
pub use plp::{PlpParams, PlpPosterior, PriorConfig};
pub use sim::{SimOutcome, SimScenario};
