//! Run configuration: a flat TOML key/value file merged under command-line
//! flags.
//!
//! ```toml
//! seed = 7
//! T = 20
//! m = 50
//! beta = [1.2, 0.7]
//! alpha = [5, 13.33]
//! eta = 1
//! ```
//!
//! Every key is optional here; each command checks for what it needs.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::data::DesignOverrides;
use crate::dpm::{ChainConfig, DpmHyperparams, HmcConfig, Mass};
use crate::error::{Error, Result};
use crate::plp::PriorConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Input file (dataset for fit/mcmc, trace CSV for diagnose).
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short)]
    pub output: Option<PathBuf>,

    /// Truncation horizon.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    /// Number of systems.
    #[arg(long = "m")]
    #[serde(rename = "m")]
    pub systems: Option<usize>,
    /// Number of failure causes.
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub causes: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Frailty variance.
    #[arg(long)]
    pub eta: Option<f64>,
    /// gamma, point or lognormal-mixture.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub mixture_weights: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub mixture_log_means: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub mixture_log_sds: Option<Vec<f64>>,

    /// Per-cause failure totals, for fitting without a dataset.
    #[arg(long, value_delimiter = ',')]
    pub counts: Option<Vec<u64>>,
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Credible level for intervals.
    #[arg(long)]
    pub level: Option<f64>,

    #[arg(long)]
    pub ac0: Option<f64>,
    #[arg(long)]
    pub bc0: Option<f64>,
    #[arg(long)]
    pub m0: Option<f64>,
    #[arg(long)]
    pub s0: Option<f64>,
    #[arg(long)]
    pub d0: Option<f64>,
    #[arg(long)]
    pub p0: Option<f64>,

    #[arg(long)]
    pub step_size: Option<f64>,
    #[arg(long)]
    pub leapfrog_steps: Option<usize>,
    #[arg(long)]
    pub jitter: Option<f64>,
    #[arg(long)]
    pub target_accept: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub adapt: Option<bool>,
    #[arg(long, value_delimiter = ',')]
    pub mass_diagonal: Option<Vec<f64>>,

    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,

    #[arg(long)]
    pub grid_min: Option<f64>,
    #[arg(long)]
    pub grid_max: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,

    /// Trace column to diagnose; all columns when absent.
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long)]
    pub max_lag: Option<usize>,
    #[arg(long)]
    pub geweke_first: Option<f64>,
    #[arg(long)]
    pub geweke_last: Option<f64>,

    /// table1 or table2.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub with_mcmc: Option<bool>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Values set in `self` win over those in `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        let top = serde_json::to_value(self).expect("config serializes");
        let mut merged = serde_json::to_value(base).expect("config serializes");
        if let (Value::Object(top), Value::Object(out)) = (top, &mut merged) {
            for (k, v) in top {
                if !v.is_null() {
                    out.insert(k, v);
                }
            }
        }
        serde_json::from_value(merged).expect("merged config deserializes")
    }

    pub fn design_overrides(&self) -> DesignOverrides {
        DesignOverrides {
            horizon: self.horizon,
            systems: self.systems,
            causes: self.causes,
        }
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("a seed is required for this command".into()))
    }

    pub fn prior(&self) -> Result<PriorConfig> {
        PriorConfig::new(self.zeta.unwrap_or(PriorConfig::default().zeta))
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn level(&self) -> Result<f64> {
        let level = self.level.unwrap_or(0.95);
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::Config(format!("level must lie in (0, 1), got {level}")));
        }
        Ok(level)
    }

    pub fn hyperparams(&self) -> Result<DpmHyperparams> {
        let d = DpmHyperparams::default();
        let h = DpmHyperparams {
            ac0: self.ac0.unwrap_or(d.ac0),
            bc0: self.bc0.unwrap_or(d.bc0),
            m0: self.m0.unwrap_or(d.m0),
            s0: self.s0.unwrap_or(d.s0),
            d0: self.d0.unwrap_or(d.d0),
            p0: self.p0.unwrap_or(d.p0),
        };
        h.validate()?;
        Ok(h)
    }

    pub fn hmc(&self) -> Result<HmcConfig> {
        let d = HmcConfig::default();
        let h = HmcConfig {
            step_size: self.step_size.unwrap_or(d.step_size),
            leapfrog_steps: self.leapfrog_steps.unwrap_or(d.leapfrog_steps),
            jitter: self.jitter.unwrap_or(d.jitter),
            mass: self.mass_diagonal.clone().map_or(d.mass, Mass::Diagonal),
            adapt: self.adapt.unwrap_or(d.adapt),
            target_accept: self.target_accept.unwrap_or(d.target_accept),
        };
        h.validate()?;
        Ok(h)
    }

    /// Chain settings; `default` supplies the iteration counts not given.
    pub fn chain(&self, default: ChainConfig) -> Result<ChainConfig> {
        let c = ChainConfig {
            iterations: self.iterations.unwrap_or(default.iterations),
            burn_in: self.burn_in.unwrap_or(default.burn_in),
            seed: self.seed.unwrap_or(default.seed),
            keep_mixtures: default.keep_mixtures,
        };
        c.validate()?;
        Ok(c)
    }
}
