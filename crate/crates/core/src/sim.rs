//! Synthetic failure histories from the shared-frailty PLP model.
//!
//! For each system: draw a frailty `z_j`, draw `n_jq ~ Poisson(z_j α_q)` per
//! cause, place the failures at `T U^(1/β_q)` for sorted uniforms `U`, and
//! merge the causes into one time-ordered stream. Every system owns its own
//! ChaCha stream keyed by `(seed, system_id)`, so output does not depend on
//! how systems are scheduled across threads.

use rand::distr::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{FailureDataset, FailureRecord, ObservationDesign};
use crate::error::{Error, Result};
use crate::plp::PlpParams;

/// One log-normal component: `log z ~ N(log_mean, log_sd²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalComponent {
    pub weight: f64,
    pub log_mean: f64,
    pub log_sd: f64,
}

/// Distribution the simulator draws frailties from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FrailtyFamily {
    /// Gamma with mean 1 and variance `eta` (point mass at 1 when `eta = 0`).
    Gamma,
    /// Every system has `z = 1`.
    PointMass,
    /// Log-normal mixture rescaled so its population mean is 1.
    LogNormalMixture(Vec<LogNormalComponent>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub design: ObservationDesign,
    pub params: PlpParams,
    /// Frailty variance for the gamma family.
    pub eta: f64,
    pub family: FrailtyFamily,
    pub seed: u64,
}

impl SimScenario {
    pub fn gamma(design: ObservationDesign, params: PlpParams, eta: f64, seed: u64) -> Result<Self> {
        let s = Self {
            design,
            params,
            eta,
            family: FrailtyFamily::Gamma,
            seed,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.design.validate()?;
        if self.params.causes() != self.design.causes {
            return Err(Error::Dimension(format!(
                "{} causes in parameters, design has {}",
                self.params.causes(),
                self.design.causes
            )));
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::domain(format!("eta must be >= 0, got {}", self.eta)));
        }
        if let FrailtyFamily::LogNormalMixture(comps) = &self.family {
            if comps.is_empty()
                || comps
                    .iter()
                    .any(|c| !(c.weight > 0.0 && c.log_sd >= 0.0 && c.log_mean.is_finite()))
            {
                return Err(Error::domain(
                    "mixture needs components with positive weight and non-negative sd",
                ));
            }
        }
        Ok(())
    }

    /// Population variance of the frailty distribution.
    pub fn frailty_variance(&self) -> f64 {
        match &self.family {
            FrailtyFamily::Gamma => self.eta,
            FrailtyFamily::PointMass => 0.0,
            FrailtyFamily::LogNormalMixture(comps) => {
                let (mean, second) = mixture_moments(comps);
                second / (mean * mean) - 1.0
            }
        }
    }
}

fn mixture_moments(comps: &[LogNormalComponent]) -> (f64, f64) {
    let total: f64 = comps.iter().map(|c| c.weight).sum();
    let mut mean = 0.0;
    let mut second = 0.0;
    for c in comps {
        let v = c.log_sd * c.log_sd;
        mean += c.weight / total * (c.log_mean + 0.5 * v).exp();
        second += c.weight / total * (2.0 * c.log_mean + 2.0 * v).exp();
    }
    (mean, second)
}

/// RNG stream for one system (1-based id).
pub fn system_rng(seed: u64, system: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(system as u64);
    rng
}

fn draw_frailty<R: rand::Rng>(scenario: &SimScenario, rng: &mut R) -> f64 {
    match &scenario.family {
        FrailtyFamily::PointMass => 1.0,
        FrailtyFamily::Gamma if scenario.eta == 0.0 => 1.0,
        FrailtyFamily::Gamma => {
            let k = 1.0 / scenario.eta;
            // rand_distr's Gamma takes (shape, scale)
            Gamma::new(k, scenario.eta)
                .expect("validated eta")
                .sample(rng)
        }
        FrailtyFamily::LogNormalMixture(comps) => {
            let total: f64 = comps.iter().map(|c| c.weight).sum();
            let mut u = rng.random::<f64>() * total;
            let mut chosen = comps[comps.len() - 1];
            for c in comps {
                if u < c.weight {
                    chosen = *c;
                    break;
                }
                u -= c.weight;
            }
            let (mean, _) = mixture_moments(comps);
            let w = Normal::new(chosen.log_mean, chosen.log_sd)
                .expect("validated sd")
                .sample(rng);
            w.exp() / mean
        }
    }
}

/// Frailties `z_1..z_m` exactly as [`simulate`] would draw them.
pub fn draw_frailties(scenario: &SimScenario) -> Vec<f64> {
    (1..=scenario.design.systems)
        .map(|j| draw_frailty(scenario, &mut system_rng(scenario.seed, j)))
        .collect()
}

fn simulate_system(scenario: &SimScenario, system: usize) -> (f64, Vec<FailureRecord>) {
    let mut rng = system_rng(scenario.seed, system);
    let z = draw_frailty(scenario, &mut rng);
    let horizon = scenario.design.horizon;
    let mut records = Vec::new();
    for (q, (&beta, &alpha)) in scenario
        .params
        .beta
        .iter()
        .zip(&scenario.params.alpha)
        .enumerate()
    {
        let mean = z * alpha;
        let n = if mean > 0.0 {
            Poisson::new(mean).expect("positive mean").sample(&mut rng) as usize
        } else {
            0
        };
        let mut u: Vec<f64> = (0..n).map(|_| Open01.sample(&mut rng)).collect();
        u.sort_by(f64::total_cmp);
        let inv_beta = 1.0 / beta;
        records.extend(u.into_iter().map(|u| FailureRecord {
            system,
            cause: q + 1,
            time: horizon * u.powf(inv_beta),
        }));
    }
    records.sort_by(|a, b| a.time.total_cmp(&b.time));
    (z, records)
}

/// Simulated dataset together with the frailties that generated it.
#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub data: FailureDataset,
    pub frailty: Vec<f64>,
}

pub fn simulate(scenario: &SimScenario) -> Result<SimOutcome> {
    scenario.validate()?;
    let per_system: Vec<(f64, Vec<FailureRecord>)> = (1..=scenario.design.systems)
        .into_par_iter()
        .map(|j| simulate_system(scenario, j))
        .collect();
    let mut frailty = Vec::with_capacity(per_system.len());
    let mut records = Vec::new();
    for (z, recs) in per_system {
        frailty.push(z);
        records.extend(recs);
    }
    let data = FailureDataset::new(scenario.design, records)?;
    Ok(SimOutcome { data, frailty })
}

/// Sidecar file of the true frailties: `system_id,z`.
pub fn frailty_to_csv(frailty: &[f64]) -> String {
    let mut out = String::from("system_id,z\n");
    for (j, z) in frailty.iter().enumerate() {
        out.push_str(&format!("{},{}\n", j + 1, z));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(m: usize, eta: f64, seed: u64) -> SimScenario {
        SimScenario::gamma(
            ObservationDesign::new(20.0, m, 2).unwrap(),
            PlpParams::new(vec![1.2, 0.7], vec![5.0, 13.33]).unwrap(),
            eta,
            seed,
        )
        .unwrap()
    }

    #[test]
    fn zero_eta_gives_unit_frailty() {
        assert!(draw_frailties(&scenario(50, 0.0, 1)).iter().all(|&z| z == 1.0));
    }

    #[test]
    fn gamma_frailty_moments() {
        for &eta in &[1.0, 5.0] {
            let m = 100_000;
            let z = draw_frailties(&scenario(m, eta, 11));
            let (mean, var) = crate::dist::mean_var(&z);
            // Var(sample var) ≈ (μ4 - σ⁴)/m, gamma shape k: μ4 = 3σ⁴ + 6σ⁴/k with σ² = η = 1/k
            let mu4 = 3.0 * eta * eta + 6.0 * eta * eta * eta;
            let se_var = ((mu4 - eta * eta) / m as f64).sqrt();
            assert!((mean - 1.0).abs() < 3.0 * (eta / m as f64).sqrt(), "mean {mean}");
            assert!((var - eta).abs() < 3.0 * se_var, "eta {eta}: var {var} se {se_var}");
        }
    }

    #[test]
    fn same_seed_same_dataset() {
        let a = simulate(&scenario(30, 1.0, 42)).unwrap();
        let b = simulate(&scenario(30, 1.0, 42)).unwrap();
        assert_eq!(a.data, b.data);
        assert_eq!(a.frailty, b.frailty);
        let c = simulate(&scenario(30, 1.0, 43)).unwrap();
        assert_ne!(a.data, c.data);
    }

    #[test]
    fn frailties_match_simulation() {
        let s = scenario(20, 0.5, 9);
        assert_eq!(draw_frailties(&s), simulate(&s).unwrap().frailty);
    }

    #[test]
    fn mixture_is_mean_one() {
        let comps = vec![
            LogNormalComponent {
                weight: 0.5,
                log_mean: -1.0,
                log_sd: 0.2,
            },
            LogNormalComponent {
                weight: 0.5,
                log_mean: 0.8,
                log_sd: 0.2,
            },
        ];
        let mut s = scenario(200_000, 0.0, 5);
        s.family = FrailtyFamily::LogNormalMixture(comps);
        let z = draw_frailties(&s);
        let (mean, var) = crate::dist::mean_var(&z);
        assert!((mean - 1.0).abs() < 3.0 * (var / z.len() as f64).sqrt());
        assert!((var - s.frailty_variance()).abs() < 0.05 * s.frailty_variance());
    }
}
