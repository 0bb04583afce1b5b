//! Dirichlet-process mixture model for the log-frailties and its hybrid
//! Gibbs/HMC sampler.
//!
//! `log Z_j` follows a stick-breaking mixture of normals. Slice variables
//! `u_j` and allocations `y_j` make each sweep finite; the frailty vector
//! itself is constrained to mean one and moved by HMC in an unconstrained
//! stick-breaking coordinate system.

pub mod chain;
pub mod density;
pub mod gibbs;
pub mod hmc;
pub mod target;
pub mod transform;

pub use chain::{
    frailty_variance, run_chain, run_chain_counts, run_chains, ChainConfig, DpmState, McmcTrace,
    MixtureSnapshot, PosteriorSummary,
};
pub use density::density_estimate;
pub use gibbs::{stick_break, DpmHyperparams, NormalGamma};
pub use hmc::{hmc_update, HmcConfig, Mass};
pub use target::{FrailtyTarget, LogDensity};
pub use transform::{inverse_transform, transform, FrailtyVector};
