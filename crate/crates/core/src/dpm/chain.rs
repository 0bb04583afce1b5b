//! The hybrid sampler: Gibbs sweeps over the stick-breaking mixture and
//! slice latents, then an HMC move on the mean-one frailty vector.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gibbs::{
    extend_levels, level_counts, occupied, stick_break, update_allocations, update_atoms, update_concentration,
    update_slices, update_sticks, DpmHyperparams,
};
use super::hmc::{hmc_update, DualAveraging, HmcConfig};
use super::target::FrailtyTarget;
use super::transform::FrailtyVector;
use crate::data::FailureDataset;
use crate::dist::{empirical_quantile, mean_var};
use crate::error::{Error, Result};

/// Current values of every mixture quantity and latent variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpmState {
    pub c: f64,
    pub xi: f64,
    pub nu: Vec<f64>,
    pub rho: Vec<f64>,
    /// `(μ_l, τ_l)` per instantiated level.
    pub atoms: Vec<(f64, f64)>,
    pub u: Vec<f64>,
    /// 0-based level of each system.
    pub y: Vec<usize>,
    pub l_star: usize,
}

impl DpmState {
    /// One occupied level, unit concentration.
    pub fn initial(systems: usize) -> Self {
        Self {
            c: 1.0,
            xi: 0.5,
            nu: vec![0.5],
            rho: vec![0.5],
            atoms: vec![(0.0, 1.0)],
            u: vec![0.25; systems],
            y: vec![0; systems],
            l_star: 1,
        }
    }

    /// Highest occupied level, 1-based.
    pub fn y_star(&self) -> usize {
        self.y.iter().copied().max().map_or(0, |v| v + 1)
    }

    pub fn occupied(&self) -> usize {
        occupied(&self.y)
    }

    pub fn mixture(&self) -> MixtureSnapshot {
        MixtureSnapshot {
            weights: self.rho.clone(),
            means: self.atoms.iter().map(|a| a.0).collect(),
            precisions: self.atoms.iter().map(|a| a.1).collect(),
            occupancy: level_counts(&self.y, self.atoms.len()),
        }
    }

    /// Target for the frailty move given current allocations.
    pub fn frailty_target(&self, counts: &[u64]) -> FrailtyTarget {
        let means = self.y.iter().map(|&l| self.atoms[l].0).collect();
        let precisions = self.y.iter().map(|&l| self.atoms[l].1).collect();
        FrailtyTarget::new(counts, means, precisions)
    }

    /// Gibbs part of one sweep: concentration, sticks, slices, truncation
    /// level, atoms and allocations.
    pub fn gibbs_sweep<R: rand::Rng + ?Sized>(
        &mut self,
        w: &[f64],
        hyper: &DpmHyperparams,
        rng: &mut R,
    ) {
        let m = self.y.len();
        let (xi, c) = update_concentration(self.c, self.occupied(), m, hyper, rng);
        self.xi = xi;
        self.c = c;
        self.nu = update_sticks(&self.y, c, rng);
        self.rho = stick_break(&self.nu);
        self.u = update_slices(&self.rho, &self.y, rng);
        let min_u = self.u.iter().copied().fold(f64::INFINITY, f64::min);
        self.l_star = extend_levels(&mut self.nu, &mut self.rho, min_u, c, rng);
        self.atoms = update_atoms(w, &self.y, self.l_star, hyper, rng);
        self.y = update_allocations(w, &self.u, &self.rho, &self.atoms, rng);
    }
}

/// Mixture weights and log-scale atoms at one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSnapshot {
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub precisions: Vec<f64>,
    /// Systems allocated to each level.
    pub occupancy: Vec<usize>,
}

impl MixtureSnapshot {
    /// Variance of `Z` under the occupied components, weighted by the
    /// number of systems in each.
    pub fn variance(&self) -> f64 {
        let total: usize = self.occupancy.iter().sum();
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for ((n, mu), tau) in self.occupancy.iter().zip(&self.means).zip(&self.precisions) {
            if *n == 0 {
                continue;
            }
            let w = *n as f64 / total as f64;
            let v = 1.0 / tau;
            m1 += w * (mu + 0.5 * v).exp();
            m2 += w * (2.0 * mu + 2.0 * v).exp();
        }
        m2 - m1 * m1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Keep post-burn-in mixture snapshots for density estimation.
    pub keep_mixtures: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            burn_in: 5_000,
            seed: 1,
            keep_mixtures: true,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations <= self.burn_in {
            return Err(Error::Config(format!(
                "iterations ({}) must exceed burn-in ({})",
                self.iterations, self.burn_in
            )));
        }
        Ok(())
    }
}

/// Posterior mean, SD, median and equal-tail 95% interval of a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl PosteriorSummary {
    pub fn from_draws(draws: &[f64]) -> Self {
        let (mean, var) = mean_var(draws);
        let mut sorted = draws.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            mean,
            sd: if draws.len() > 1 { var.sqrt() } else { 0.0 },
            median: empirical_quantile(&sorted, 0.5),
            ci_low: empirical_quantile(&sorted, 0.025),
            ci_high: empirical_quantile(&sorted, 0.975),
        }
    }

    pub fn covers(&self, truth: f64) -> bool {
        self.ci_low <= truth && truth <= self.ci_high
    }
}

/// Iteration-indexed output of one chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McmcTrace {
    /// `z[i][j]`: frailty of system `j` at iteration `i`.
    pub z: Vec<Vec<f64>>,
    pub var_z: Vec<f64>,
    pub c: Vec<f64>,
    pub clusters: Vec<usize>,
    pub accepted: Vec<bool>,
    pub accept_prob: Vec<f64>,
    pub divergent: Vec<bool>,
    pub step_size: Vec<f64>,
    pub burn_in: usize,
    /// Post-burn-in mixtures, empty unless requested.
    pub mixtures: Vec<MixtureSnapshot>,
}

/// Empirical variance of a frailty vector around its constrained mean of one.
pub fn frailty_variance(z: &[f64]) -> f64 {
    let m = z.len();
    if m < 2 {
        return 0.0;
    }
    z.iter().map(|v| (v - 1.0).powi(2)).sum::<f64>() / (m - 1) as f64
}

impl McmcTrace {
    pub fn len(&self) -> usize {
        self.var_z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.var_z.is_empty()
    }

    pub fn systems(&self) -> usize {
        self.z.first().map_or(0, Vec::len)
    }

    fn kept(&self) -> std::ops::Range<usize> {
        self.burn_in..self.len()
    }

    /// Bayes estimate of each frailty: the post-burn-in average.
    pub fn z_hat(&self) -> Vec<f64> {
        let m = self.systems();
        let mut acc = vec![0.0; m];
        for row in &self.z[self.kept()] {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        let n = self.kept().len() as f64;
        acc.iter().map(|a| a / n).collect()
    }

    /// Posterior summary of each frailty.
    pub fn z_summaries(&self) -> Vec<PosteriorSummary> {
        (0..self.systems())
            .map(|j| PosteriorSummary::from_draws(&self.z_series(j)[self.burn_in..]))
            .collect()
    }

    /// Full trace of one system's frailty (0-based).
    pub fn z_series(&self, system: usize) -> Vec<f64> {
        self.z.iter().map(|row| row[system]).collect()
    }

    pub fn var_z_summary(&self) -> PosteriorSummary {
        PosteriorSummary::from_draws(&self.var_z[self.kept()])
    }

    /// Posterior summary of the mixture-implied variance of `Z`. A sparsely
    /// occupied component with very low precision makes this variance
    /// overflow; such draws are left out.
    pub fn mixture_variance_summary(&self) -> Option<PosteriorSummary> {
        let v: Vec<f64> = self
            .mixtures
            .iter()
            .map(MixtureSnapshot::variance)
            .filter(|v| v.is_finite())
            .collect();
        (!v.is_empty()).then(|| PosteriorSummary::from_draws(&v))
    }

    pub fn acceptance_rate(&self) -> f64 {
        let kept = &self.accepted[self.kept()];
        kept.iter().filter(|&&a| a).count() as f64 / kept.len() as f64
    }

    pub fn divergences(&self) -> usize {
        self.divergent.iter().filter(|&&d| d).count()
    }
}

/// Runs one chain on per-system failure counts.
pub fn run_chain_counts(
    counts: &[u64],
    hyper: &DpmHyperparams,
    hmc: &HmcConfig,
    chain: &ChainConfig,
) -> Result<McmcTrace> {
    run_chain_stream(counts, hyper, hmc, chain, 0)
}

/// Runs the sampler on a dataset.
pub fn run_chain(
    data: &FailureDataset,
    hyper: &DpmHyperparams,
    hmc: &HmcConfig,
    chain: &ChainConfig,
) -> Result<McmcTrace> {
    run_chain_counts(&data.summarize().per_system, hyper, hmc, chain)
}

/// Independent chains on separate RNG streams, run in parallel.
pub fn run_chains(
    data: &FailureDataset,
    hyper: &DpmHyperparams,
    hmc: &HmcConfig,
    chain: &ChainConfig,
    chains: usize,
) -> Result<Vec<McmcTrace>> {
    let counts = data.summarize().per_system;
    (0..chains as u64)
        .into_par_iter()
        .map(|s| run_chain_stream(&counts, hyper, hmc, chain, s))
        .collect()
}

fn run_chain_stream(
    counts: &[u64],
    hyper: &DpmHyperparams,
    hmc: &HmcConfig,
    chain: &ChainConfig,
    stream: u64,
) -> Result<McmcTrace> {
    chain.validate()?;
    hyper.validate()?;
    hmc.validate()?;
    let m = counts.len();
    if m == 0 {
        return Err(Error::InsufficientData("no systems".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(chain.seed);
    rng.set_stream(stream);

    let mean_count = counts.iter().map(|&n| n as f64 + 1.0).sum::<f64>() / m as f64;
    let start: Vec<f64> = counts
        .iter()
        .map(|&n| (n as f64 + 1.0) / mean_count)
        .collect();
    let mut frailty = FrailtyVector::from_frailties(&start)?;
    let mut state = DpmState::initial(m);

    let mut adapt = hmc.adapt.then(|| DualAveraging::new(hmc.step_size, hmc.target_accept));
    let mut eps = hmc.step_size;

    let n = chain.iterations;
    let mut trace = McmcTrace {
        z: Vec::with_capacity(n),
        var_z: Vec::with_capacity(n),
        c: Vec::with_capacity(n),
        clusters: Vec::with_capacity(n),
        accepted: Vec::with_capacity(n),
        accept_prob: Vec::with_capacity(n),
        divergent: Vec::with_capacity(n),
        step_size: Vec::with_capacity(n),
        burn_in: chain.burn_in,
        mixtures: Vec::new(),
    };

    for i in 0..n {
        state.gibbs_sweep(&frailty.w, hyper, &mut rng);

        if let Some(da) = &adapt {
            eps = da.step_size();
        }
        let target = state.frailty_target(counts);
        let mut x = frailty.z_star.clone();
        let step = hmc_update(&target, &mut x, eps, hmc, &mut rng);
        if step.accepted {
            frailty = FrailtyVector::from_unconstrained(x);
        }
        if let Some(da) = adapt.as_mut() {
            da.update(step.accept_prob);
            if i + 1 == chain.burn_in {
                eps = da.final_step_size();
                adapt = None;
            }
        }

        trace.var_z.push(frailty_variance(&frailty.z));
        trace.z.push(frailty.z.clone());
        trace.c.push(state.c);
        trace.clusters.push(state.occupied());
        trace.accepted.push(step.accepted);
        trace.accept_prob.push(step.accept_prob);
        trace.divergent.push(step.divergent);
        trace.step_size.push(eps);
        if chain.keep_mixtures && i >= chain.burn_in {
            trace.mixtures.push(state.mixture());
        }
    }
    Ok(trace)
}
