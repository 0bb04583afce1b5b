//! Posterior frailty density `f_Z(z) = Σ ρ_l LN(z | μ_l, 1/τ_l)`, averaged
//! over stored mixture states.

use super::chain::MixtureSnapshot;
use crate::dist::lognormal_ln_pdf;
use crate::error::{Error, Result};

/// Density of a single mixture state on `grid`. Mass beyond the
/// instantiated levels is left out, so the result integrates to at most one.
pub fn mixture_density(mix: &MixtureSnapshot, grid: &[f64]) -> Vec<f64> {
    grid.iter()
        .map(|&z| {
            mix.weights
                .iter()
                .zip(&mix.means)
                .zip(&mix.precisions)
                .map(|((w, mu), tau)| w * lognormal_ln_pdf(z, *mu, *tau).exp())
                .sum()
        })
        .collect()
}

/// Average of [`mixture_density`] over `mixtures`.
pub fn density_estimate(mixtures: &[MixtureSnapshot], grid: &[f64]) -> Result<Vec<f64>> {
    if grid.iter().any(|z| !(*z > 0.0)) {
        return Err(Error::domain("density grid must be positive"));
    }
    if mixtures.is_empty() {
        return Err(Error::InsufficientData("no stored mixture states".into()));
    }
    let mut acc = vec![0.0; grid.len()];
    for mix in mixtures {
        for (a, v) in acc.iter_mut().zip(mixture_density(mix, grid)) {
            *a += v;
        }
    }
    let n = mixtures.len() as f64;
    Ok(acc.into_iter().map(|a| a / n).collect())
}

/// Evenly spaced grid on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + i as f64 * step).collect()
}

/// Indices of strict interior local maxima.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

/// Local maxima whose height is at least `rel` times the global maximum.
pub fn prominent_modes(values: &[f64], rel: f64) -> Vec<usize> {
    let top = values.iter().copied().fold(0.0, f64::max);
    local_maxima(values)
        .into_iter()
        .filter(|&i| values[i] >= rel * top)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(mu: f64, tau: f64) -> MixtureSnapshot {
        MixtureSnapshot {
            weights: vec![1.0],
            means: vec![mu],
            precisions: vec![tau],
            occupancy: vec![1],
        }
    }

    #[test]
    fn standard_lognormal_at_one() {
        let d = density_estimate(&[single(0.0, 1.0)], &[1.0]).unwrap();
        assert!((d[0] - 0.398_942_280_401_432_7).abs() < 1e-12);
    }

    #[test]
    fn two_separated_atoms_are_bimodal() {
        let mix = MixtureSnapshot {
            weights: vec![0.5, 0.5],
            means: vec![-1.2, 0.9],
            precisions: vec![25.0, 25.0],
            occupancy: vec![1, 1],
        };
        let grid = linear_grid(0.01, 6.0, 2000);
        let d = density_estimate(&[mix], &grid).unwrap();
        assert_eq!(local_maxima(&d).len(), 2);
    }

    #[test]
    fn rejects_nonpositive_grid() {
        assert!(density_estimate(&[single(0.0, 1.0)], &[0.0, 1.0]).is_err());
    }
}
