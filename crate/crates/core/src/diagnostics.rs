//! Single-chain convergence diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of the Geweke comparison of early and late chain segments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GewekeResult {
    pub z_score: f64,
    pub first_frac: f64,
    pub last_frac: f64,
    /// `|z| < 1.96`.
    pub pass: bool,
}

/// Spectral density at frequency zero with a Bartlett lag window covering
/// 4% of the series.
pub fn spectral_density_zero(x: &[f64]) -> f64 {
    let n = x.len();
    let lags = ((0.04 * n as f64).floor() as usize).max(1).min(n - 1);
    let acov = autocovariance(x, lags);
    let mut s = acov[0];
    for (k, g) in acov.iter().enumerate().skip(1) {
        s += 2.0 * (1.0 - k as f64 / (lags + 1) as f64) * g;
    }
    s.max(0.0)
}

fn autocovariance(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let d: Vec<f64> = x.iter().map(|v| v - mean).collect();
    (0..=max_lag.min(n - 1))
        .map(|k| d[..n - k].iter().zip(&d[k..]).map(|(a, b)| a * b).sum::<f64>() / n as f64)
        .collect()
}

pub fn geweke(chain: &[f64], first_frac: f64, last_frac: f64) -> Result<GewekeResult> {
    if chain.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "Geweke needs at least 100 draws, got {}",
            chain.len()
        )));
    }
    if !(first_frac > 0.0 && last_frac > 0.0 && first_frac + last_frac <= 1.0) {
        return Err(Error::Config(format!(
            "invalid Geweke windows {first_frac}, {last_frac}"
        )));
    }
    let n = chain.len();
    let na = ((first_frac * n as f64).floor() as usize).max(2);
    let nb = ((last_frac * n as f64).floor() as usize).max(2);
    let a = &chain[..na];
    let b = &chain[n - nb..];
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let diff = mean(a) - mean(b);
    let var = spectral_density_zero(a) / na as f64 + spectral_density_zero(b) / nb as f64;
    let z_score = if diff == 0.0 {
        0.0
    } else if var > 0.0 {
        diff / var.sqrt()
    } else {
        diff.signum() * f64::INFINITY
    };
    Ok(GewekeResult {
        z_score,
        first_frac,
        last_frac,
        pass: z_score.abs() < 1.96,
    })
}

/// Geweke with the default 10% / 50% windows.
pub fn geweke_default(chain: &[f64]) -> Result<GewekeResult> {
    geweke(chain, 0.1, 0.5)
}

/// Sample autocorrelations at lags `0..=max_lag`. A constant chain has
/// autocorrelation 1 at lag 0 and 0 elsewhere.
pub fn autocorrelation(chain: &[f64], max_lag: usize) -> Vec<f64> {
    if chain.is_empty() {
        return Vec::new();
    }
    let acov = autocovariance(chain, max_lag);
    if acov[0] == 0.0 {
        let mut out = vec![0.0; acov.len()];
        out[0] = 1.0;
        return out;
    }
    acov.iter().map(|g| g / acov[0]).collect()
}

/// Effective sample size from Geyer's initial monotone sequence. Zero for a
/// constant chain.
pub fn ess(chain: &[f64]) -> f64 {
    let n = chain.len();
    if n < 4 {
        return 0.0;
    }
    if autocovariance(chain, 0)[0] == 0.0 {
        return 0.0;
    }
    let rho = autocorrelation(chain, n - 1);
    let mut tau = -1.0;
    let mut prev_pair = f64::INFINITY;
    let mut k = 0;
    while k + 1 < n {
        let mut pair = rho[k] + rho[k + 1];
        if pair <= 0.0 {
            break;
        }
        pair = pair.min(prev_pair);
        tau += 2.0 * pair;
        prev_pair = pair;
        k += 2;
    }
    let n_f = n as f64;
    (n_f / tau.max(f64::EPSILON)).min(n_f * n_f.log10())
}
