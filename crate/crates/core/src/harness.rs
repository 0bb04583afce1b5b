//! Monte Carlo evaluation: simulate `M` fleets from a known scenario, fit
//! each one, and score bias, MSE and interval coverage.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::ObservationDesign;
use crate::dpm::{run_chain_counts, ChainConfig, DpmHyperparams, HmcConfig, PosteriorSummary};
use crate::error::{Error, Result};
use crate::plp::{bayes_estimates, posterior, PlpParams, PriorConfig};
use crate::sim::{simulate, SimScenario};

/// Named scenarios with two causes observed on `(0, 20]`.
pub fn named_scenario(key: &str, systems: usize, eta: f64, seed: u64) -> Result<SimScenario> {
    let (beta, alpha) = match key {
        "table1" => (vec![1.2, 0.7], vec![5.0, 13.33]),
        "table2" => (vec![0.75, 1.25], vec![9.46, 12.69]),
        other => {
            return Err(Error::Config(format!(
                "unknown scenario '{other}' (expected table1 or table2)"
            )))
        }
    };
    let design = ObservationDesign::new(20.0, systems, 2)?;
    SimScenario::gamma(design, PlpParams::new(beta, alpha)?, eta, seed)
}

/// Settings for the per-replication frailty chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcSettings {
    pub hyper: DpmHyperparams,
    pub hmc: HmcConfig,
    pub chain: ChainConfig,
}

impl Default for McmcSettings {
    fn default() -> Self {
        Self {
            hyper: DpmHyperparams::default(),
            hmc: HmcConfig::default(),
            chain: ChainConfig {
                iterations: 2_000,
                burn_in: 1_000,
                seed: 1,
                keep_mixtures: false,
            },
        }
    }
}

/// Accuracy statistics of one parameter across replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterStats {
    pub parameter: String,
    pub truth: f64,
    pub bias: f64,
    pub mse: f64,
    pub cp: f64,
    /// Monte Carlo standard error of `bias`.
    pub bias_se: f64,
    pub replications: usize,
}

impl ParameterStats {
    fn from_draws(parameter: String, truth: f64, estimates: &[f64], covered: &[bool]) -> Self {
        let n = estimates.len();
        let nf = n as f64;
        let errors: Vec<f64> = estimates.iter().map(|e| e - truth).collect();
        let bias = errors.iter().sum::<f64>() / nf;
        let mse = errors.iter().map(|e| e * e).sum::<f64>() / nf;
        let bias_se = if n > 1 {
            let var = errors.iter().map(|e| (e - bias).powi(2)).sum::<f64>() / (nf - 1.0);
            (var / nf).sqrt()
        } else {
            f64::NAN
        };
        let cp = covered.iter().filter(|&&c| c).count() as f64 / nf;
        Self {
            parameter,
            truth,
            bias,
            mse,
            cp,
            bias_se,
            replications: n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub scenario: SimScenario,
    pub replications: usize,
    /// Replications dropped because a posterior was improper.
    pub skipped: usize,
    /// `alpha_q` rows, then `beta_q`, then `eta` when a chain was run.
    pub rows: Vec<ParameterStats>,
}

impl HarnessReport {
    pub fn row(&self, parameter: &str) -> Option<&ParameterStats> {
        self.rows.iter().find(|r| r.parameter == parameter)
    }

    /// Long-format CSV: one line per statistic with a column per parameter.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eta,statistic,m");
        for r in &self.rows {
            out.push(',');
            out.push_str(&r.parameter);
        }
        out.push('\n');
        type Stat = fn(&ParameterStats) -> f64;
        let stats: [(&str, Stat); 3] = [("bias", |r| r.bias), ("mse", |r| r.mse), ("cp95", |r| r.cp)];
        for (name, f) in stats {
            out.push_str(&format!(
                "{},{},{}",
                self.scenario.eta, name, self.scenario.design.systems
            ));
            for r in &self.rows {
                out.push_str(&format!(",{}", f(r)));
            }
            out.push('\n');
        }
        out
    }
}

struct Replication {
    estimates: Vec<f64>,
    covered: Vec<bool>,
}

/// Seeds for `m` replications derived from one base seed.
pub fn replication_seeds(seed: u64, m: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| rng.random()).collect()
}

fn replicate(
    scenario: &SimScenario,
    prior: PriorConfig,
    level: f64,
    mcmc: Option<&McmcSettings>,
) -> Result<Option<Replication>> {
    let out = simulate(scenario)?;
    let counts = out.data.summarize();
    let post = match posterior(&counts, prior) {
        Ok(p) => p,
        Err(Error::ImproperPosterior { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let rows = bayes_estimates(&post, level)?;
    let k = scenario.params.causes();
    let truth: Vec<f64> = scenario
        .params
        .alpha
        .iter()
        .chain(&scenario.params.beta)
        .copied()
        .collect();
    // bayes_estimates yields beta rows first; report alphas first
    let ordered = rows[k..].iter().chain(&rows[..k]);
    let mut estimates = Vec::with_capacity(2 * k + 1);
    let mut covered = Vec::with_capacity(2 * k + 1);
    for (row, t) in ordered.zip(&truth) {
        estimates.push(row.mean);
        covered.push(row.covers(*t));
    }
    if let Some(s) = mcmc {
        let chain = ChainConfig {
            seed: scenario.seed,
            ..s.chain
        };
        let trace = run_chain_counts(&counts.per_system, &s.hyper, &s.hmc, &chain)?;
        let summary: PosteriorSummary = trace.var_z_summary();
        estimates.push(summary.mean);
        covered.push(summary.covers(scenario.frailty_variance()));
    }
    Ok(Some(Replication { estimates, covered }))
}

/// Runs `replications` independent simulate-and-fit rounds in parallel.
/// Each replication's simulation seed comes from [`replication_seeds`]
/// applied to `scenario.seed`, so results do not depend on thread count.
pub fn run_harness(
    scenario: &SimScenario,
    prior: PriorConfig,
    replications: usize,
    mcmc: Option<&McmcSettings>,
) -> Result<HarnessReport> {
    if replications == 0 {
        return Err(Error::Config("replications must be at least 1".into()));
    }
    scenario.validate()?;
    let level = 0.95;
    let seeds = replication_seeds(scenario.seed, replications);
    let results: Vec<Option<Replication>> = seeds
        .par_iter()
        .map(|&seed| {
            let s = SimScenario {
                seed,
                ..scenario.clone()
            };
            replicate(&s, prior, level, mcmc)
        })
        .collect::<Result<_>>()?;
    let kept: Vec<Replication> = results.into_iter().flatten().collect();
    let skipped = replications - kept.len();
    if kept.is_empty() {
        return Err(Error::InsufficientData(
            "every replication had an improper posterior".into(),
        ));
    }

    let k = scenario.params.causes();
    let mut names: Vec<(String, f64)> = Vec::new();
    for q in 0..k {
        names.push((format!("alpha_{}", q + 1), scenario.params.alpha[q]));
    }
    for q in 0..k {
        names.push((format!("beta_{}", q + 1), scenario.params.beta[q]));
    }
    if mcmc.is_some() {
        names.push(("eta".into(), scenario.frailty_variance()));
    }
    let rows = names
        .into_iter()
        .enumerate()
        .map(|(i, (name, truth))| {
            let est: Vec<f64> = kept.iter().map(|r| r.estimates[i]).collect();
            let cov: Vec<bool> = kept.iter().map(|r| r.covered[i]).collect();
            ParameterStats::from_draws(name, truth, &est, &cov)
        })
        .collect();
    Ok(HarnessReport {
        scenario: scenario.clone(),
        replications,
        skipped,
        rows,
    })
}
