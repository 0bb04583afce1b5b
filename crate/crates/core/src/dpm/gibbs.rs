//! Gibbs updates for the stick-breaking mixture: concentration, stick
//! fractions, slice variables, atoms and allocations.

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::dist::normal_ln_pdf;

/// Levels beyond this indicate a degenerate state, not a real posterior.
const MAX_LEVELS: usize = 100_000;

/// Hyperparameters of the mixture prior.
///
/// `c ~ Gamma(ac0, rate bc0)`; atoms follow the normal-gamma prior
/// `τ ~ Gamma(d0/2, rate d0·p0/2)`, `μ | τ ~ N(m0, 1/(s0 τ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpmHyperparams {
    pub ac0: f64,
    pub bc0: f64,
    pub m0: f64,
    pub s0: f64,
    pub d0: f64,
    pub p0: f64,
}

impl Default for DpmHyperparams {
    fn default() -> Self {
        Self {
            ac0: 1.0,
            bc0: 1.0,
            m0: 0.0,
            s0: 1.0,
            d0: 2.0,
            p0: 1.0,
        }
    }
}

impl DpmHyperparams {
    pub fn validate(&self) -> crate::Result<()> {
        let all = [self.ac0, self.bc0, self.s0, self.d0, self.p0];
        if all.iter().any(|v| !(*v > 0.0 && v.is_finite())) || !self.m0.is_finite() {
            return Err(crate::Error::Config(
                "ac0, bc0, s0, d0, p0 must be positive and m0 finite".into(),
            ));
        }
        Ok(())
    }

    pub fn atom_prior(&self) -> NormalGamma {
        NormalGamma {
            mean: self.m0,
            scale: self.s0,
            rate: self.d0 * self.p0,
            dof: self.d0,
        }
    }
}

/// Normal-gamma `NG(m, s, d·p, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalGamma {
    pub mean: f64,
    pub scale: f64,
    /// The `d·p` slot.
    pub rate: f64,
    pub dof: f64,
}

impl NormalGamma {
    /// Conjugate update with observations `w`.
    pub fn posterior(&self, w: &[f64]) -> NormalGamma {
        if w.is_empty() {
            return *self;
        }
        let n = w.len() as f64;
        let w_bar = w.iter().sum::<f64>() / n;
        let ss: f64 = w.iter().map(|v| (v - w_bar).powi(2)).sum();
        NormalGamma {
            mean: (self.scale * self.mean + n * w_bar) / (self.scale + n),
            scale: self.scale + n,
            rate: self.rate
                + ss
                + self.scale * n / (self.scale + n) * (self.mean - w_bar).powi(2),
            dof: self.dof + n,
        }
    }

    /// Draws `(μ, τ)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let tau = Gamma::new(0.5 * self.dof, 2.0 / self.rate)
            .expect("positive normal-gamma parameters")
            .sample(rng)
            .max(f64::MIN_POSITIVE);
        let mu = Normal::new(self.mean, (self.scale * tau).sqrt().recip())
            .expect("finite sd")
            .sample(rng);
        (mu, tau)
    }
}

/// Stick-breaking weights `ρ_l = ν_l Π_{o<l} (1 - ν_o)`.
pub fn stick_break(nu: &[f64]) -> Vec<f64> {
    let mut rest = 1.0;
    nu.iter()
        .map(|&v| {
            let r = v * rest;
            rest *= 1.0 - v;
            r
        })
        .collect()
}

/// Occupancy of levels `0..levels` under allocations `y` (0-based).
pub fn level_counts(y: &[usize], levels: usize) -> Vec<usize> {
    let mut counts = vec![0; levels];
    for &l in y {
        counts[l] += 1;
    }
    counts
}

/// Number of distinct occupied levels.
pub fn occupied(y: &[usize]) -> usize {
    let top = y.iter().copied().max().map_or(0, |v| v + 1);
    level_counts(y, top).iter().filter(|&&n| n > 0).count()
}

/// Escobar–West auxiliary-variable update of the concentration given `k`
/// occupied clusters among `m` observations. Returns `(ξ, c)`.
pub fn update_concentration<R: Rng + ?Sized>(
    c: f64,
    k: usize,
    m: usize,
    hyper: &DpmHyperparams,
    rng: &mut R,
) -> (f64, f64) {
    let m_f = m as f64;
    let xi: f64 = Beta::new(c + 1.0, m_f)
        .expect("positive beta parameters")
        .sample(rng);
    let xi = xi.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    let rate = hyper.bc0 - xi.ln();
    let shape_hi = hyper.ac0 + k as f64;
    let shape_lo = shape_hi - 1.0;
    let odds = shape_lo / (m_f * rate);
    let p_hi = odds / (1.0 + odds);
    let shape = if shape_lo <= 0.0 || rng.random::<f64>() < p_hi {
        shape_hi
    } else {
        shape_lo
    };
    let c_new = Gamma::new(shape, 1.0 / rate)
        .expect("positive gamma parameters")
        .sample(rng)
        .max(f64::MIN_POSITIVE);
    (xi, c_new)
}

/// Draws `ν_l ~ Beta(1 + n_l, c + m - Σ_{o≤l} n_o)` for every level up to the
/// highest occupied one.
pub fn update_sticks<R: Rng + ?Sized>(y: &[usize], c: f64, rng: &mut R) -> Vec<f64> {
    let top = y.iter().copied().max().map_or(0, |v| v + 1);
    let counts = level_counts(y, top);
    let mut remaining = y.len();
    counts
        .iter()
        .map(|&n| {
            remaining -= n;
            draw_beta(1.0 + n as f64, c + remaining as f64, rng)
        })
        .collect()
}

fn draw_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    let v: f64 = Beta::new(a, b).expect("positive beta parameters").sample(rng);
    v.clamp(1e-300, 1.0 - 1e-16)
}

/// `u_j ~ Uniform(0, ρ_{y_j})`.
pub fn update_slices<R: Rng + ?Sized>(rho: &[f64], y: &[usize], rng: &mut R) -> Vec<f64> {
    y.iter()
        .map(|&l| {
            let s: f64 = Open01.sample(rng);
            s * rho[l]
        })
        .collect()
}

/// Appends `Beta(1, c)` sticks until the weights cover `1 - min(u)`.
/// Returns the resulting number of levels `l*`.
pub fn extend_levels<R: Rng + ?Sized>(
    nu: &mut Vec<f64>,
    rho: &mut Vec<f64>,
    min_u: f64,
    c: f64,
    rng: &mut R,
) -> usize {
    let mut covered: f64 = rho.iter().sum();
    let mut rest: f64 = nu.iter().map(|v| 1.0 - v).product();
    // smallest prefix already covering
    let mut prefix = 0.0;
    for (l, r) in rho.iter().enumerate() {
        prefix += r;
        if prefix > 1.0 - min_u {
            nu.truncate(l + 1);
            rho.truncate(l + 1);
            return l + 1;
        }
    }
    while covered <= 1.0 - min_u {
        assert!(nu.len() < MAX_LEVELS, "stick-breaking truncation runaway");
        let v = draw_beta(1.0, c, rng);
        let r = v * rest;
        rest *= 1.0 - v;
        covered += r;
        nu.push(v);
        rho.push(r);
    }
    nu.len()
}

/// Draws `(μ_l, τ_l)` for each level: posterior for occupied levels, prior
/// otherwise.
pub fn update_atoms<R: Rng + ?Sized>(
    w: &[f64],
    y: &[usize],
    levels: usize,
    hyper: &DpmHyperparams,
    rng: &mut R,
) -> Vec<(f64, f64)> {
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); levels];
    for (&wj, &l) in w.iter().zip(y) {
        members[l].push(wj);
    }
    let prior = hyper.atom_prior();
    members
        .iter()
        .map(|ws| prior.posterior(ws).sample(rng))
        .collect()
}

/// `Pr(y_j = l) ∝ N(w_j | μ_l, 1/τ_l) 1(ρ_l > u_j)`.
pub fn update_allocations<R: Rng + ?Sized>(
    w: &[f64],
    u: &[f64],
    rho: &[f64],
    atoms: &[(f64, f64)],
    rng: &mut R,
) -> Vec<usize> {
    let mut logp = Vec::with_capacity(rho.len());
    let mut idx = Vec::with_capacity(rho.len());
    w.iter()
        .zip(u)
        .map(|(&wj, &uj)| {
            logp.clear();
            idx.clear();
            for (l, (&r, &(mu, tau))) in rho.iter().zip(atoms).enumerate() {
                if r > uj {
                    idx.push(l);
                    logp.push(normal_ln_pdf(wj, mu, tau));
                }
            }
            assert!(!idx.is_empty(), "no admissible mixture level for slice {uj}");
            let max = logp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !max.is_finite() {
                return idx[rng.random_range(0..idx.len())];
            }
            let total: f64 = logp.iter().map(|v| (v - max).exp()).sum();
            let mut pick = rng.random::<f64>() * total;
            for (k, v) in logp.iter().enumerate() {
                pick -= (v - max).exp();
                if pick <= 0.0 {
                    return idx[k];
                }
            }
            idx[idx.len() - 1]
        })
        .collect()
}
