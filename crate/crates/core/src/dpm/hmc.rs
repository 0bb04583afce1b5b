//! Hamiltonian Monte Carlo with leapfrog integration and dual-averaging
//! step-size adaptation.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::target::LogDensity;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mass {
    Identity,
    /// Diagonal of the mass matrix.
    Diagonal(Vec<f64>),
}

impl Mass {
    fn inv(&self, i: usize) -> f64 {
        match self {
            Mass::Identity => 1.0,
            Mass::Diagonal(d) => 1.0 / d[i],
        }
    }

    fn sqrt(&self, i: usize) -> f64 {
        match self {
            Mass::Identity => 1.0,
            Mass::Diagonal(d) => d[i].sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmcConfig {
    pub step_size: f64,
    pub leapfrog_steps: usize,
    /// Trajectory length is drawn uniformly from `steps·(1 ± jitter)`.
    pub jitter: f64,
    pub mass: Mass,
    /// Adapt the step size during burn-in.
    pub adapt: bool,
    pub target_accept: f64,
}

impl Default for HmcConfig {
    fn default() -> Self {
        Self {
            step_size: 0.1,
            leapfrog_steps: 20,
            jitter: 0.2,
            mass: Mass::Identity,
            adapt: true,
            target_accept: 0.8,
        }
    }
}

impl HmcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::Config(format!(
                "step_size must be positive, got {}",
                self.step_size
            )));
        }
        if self.leapfrog_steps == 0 {
            return Err(Error::Config("leapfrog_steps must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return Err(Error::Config("jitter must lie in [0, 1)".into()));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(Error::Config("target_accept must lie in (0, 1)".into()));
        }
        if let Mass::Diagonal(d) = &self.mass {
            if d.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::Config("mass diagonal must be positive".into()));
            }
        }
        Ok(())
    }

    fn draw_steps<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let base = self.leapfrog_steps as f64;
        let lo = (base * (1.0 - self.jitter)).round().max(1.0) as usize;
        let hi = (base * (1.0 + self.jitter)).round().max(1.0) as usize;
        if hi > lo {
            rng.random_range(lo..=hi)
        } else {
            lo
        }
    }
}

/// Phase-space point with cached log-density and gradient.
#[derive(Debug, Clone)]
pub struct PhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub log_density: f64,
    pub grad: Vec<f64>,
}

impl PhasePoint {
    pub fn new<T: LogDensity + ?Sized>(target: &T, q: Vec<f64>, p: Vec<f64>) -> Self {
        let mut grad = vec![0.0; q.len()];
        let log_density = target.log_density_grad(&q, &mut grad);
        Self {
            q,
            p,
            log_density,
            grad,
        }
    }

    pub fn kinetic(&self, mass: &Mass) -> f64 {
        self.p
            .iter()
            .enumerate()
            .map(|(i, p)| 0.5 * p * p * mass.inv(i))
            .sum()
    }

    /// Total energy `H = -log π(q) + K(p)`.
    pub fn hamiltonian(&self, mass: &Mass) -> f64 {
        -self.log_density + self.kinetic(mass)
    }

    fn is_finite(&self) -> bool {
        self.log_density.is_finite() && self.grad.iter().all(|g| g.is_finite())
    }
}

/// Runs `steps` leapfrog steps of size `eps` in place.
pub fn leapfrog<T: LogDensity + ?Sized>(
    target: &T,
    point: &mut PhasePoint,
    eps: f64,
    steps: usize,
    mass: &Mass,
) {
    let n = point.q.len();
    for _ in 0..steps {
        for i in 0..n {
            point.p[i] += 0.5 * eps * point.grad[i];
            point.q[i] += eps * mass.inv(i) * point.p[i];
        }
        point.log_density = target.log_density_grad(&point.q, &mut point.grad);
        if !point.is_finite() {
            return;
        }
        for i in 0..n {
            point.p[i] += 0.5 * eps * point.grad[i];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmcStep {
    pub accepted: bool,
    pub accept_prob: f64,
    /// Non-finite energy along the trajectory; the proposal was rejected.
    pub divergent: bool,
}

/// One HMC transition from `q` with step size `eps`. `q` is updated in
/// place on acceptance.
pub fn hmc_update<T, R>(
    target: &T,
    q: &mut Vec<f64>,
    eps: f64,
    config: &HmcConfig,
    rng: &mut R,
) -> HmcStep
where
    T: LogDensity + ?Sized,
    R: Rng + ?Sized,
{
    let n = q.len();
    if n == 0 {
        return HmcStep {
            accepted: true,
            accept_prob: 1.0,
            divergent: false,
        };
    }
    let p: Vec<f64> = (0..n)
        .map(|i| {
            let s: f64 = StandardNormal.sample(rng);
            s * config.mass.sqrt(i)
        })
        .collect();
    let start = PhasePoint::new(target, q.clone(), p);
    let h0 = start.hamiltonian(&config.mass);
    if !start.is_finite() || !h0.is_finite() {
        return HmcStep {
            accepted: false,
            accept_prob: 0.0,
            divergent: true,
        };
    }
    let steps = config.draw_steps(rng);
    let mut end = start;
    leapfrog(target, &mut end, eps, steps, &config.mass);
    let h1 = end.hamiltonian(&config.mass);
    if !end.is_finite() || !h1.is_finite() {
        return HmcStep {
            accepted: false,
            accept_prob: 0.0,
            divergent: true,
        };
    }
    let accept_prob = (h0 - h1).exp().min(1.0);
    let accepted = rng.random::<f64>() < accept_prob;
    if accepted {
        *q = end.q;
    }
    HmcStep {
        accepted,
        accept_prob,
        divergent: h1 - h0 > 1000.0,
    }
}

/// Nesterov dual averaging of `log ε` toward a target acceptance rate.
#[derive(Debug, Clone)]
pub struct DualAveraging {
    mu: f64,
    target: f64,
    gamma: f64,
    t0: f64,
    kappa: f64,
    count: f64,
    h_bar: f64,
    log_eps: f64,
    log_eps_bar: f64,
}

impl DualAveraging {
    pub fn new(initial_step: f64, target: f64) -> Self {
        Self {
            mu: (10.0 * initial_step).ln(),
            target,
            gamma: 0.05,
            t0: 10.0,
            kappa: 0.75,
            count: 0.0,
            h_bar: 0.0,
            log_eps: initial_step.ln(),
            log_eps_bar: 0.0,
        }
    }

    pub fn step_size(&self) -> f64 {
        self.log_eps.exp()
    }

    /// Step size to use once adaptation ends.
    pub fn final_step_size(&self) -> f64 {
        if self.count == 0.0 {
            self.step_size()
        } else {
            self.log_eps_bar.exp()
        }
    }

    pub fn update(&mut self, accept_prob: f64) {
        self.count += 1.0;
        let t = self.count;
        let w = 1.0 / (t + self.t0);
        self.h_bar = (1.0 - w) * self.h_bar + w * (self.target - accept_prob);
        self.log_eps = self.mu - t.sqrt() / self.gamma * self.h_bar;
        let eta = t.powf(-self.kappa);
        self.log_eps_bar = eta * self.log_eps + (1.0 - eta) * self.log_eps_bar;
    }
}
