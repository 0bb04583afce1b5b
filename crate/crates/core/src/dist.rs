//! Gamma marginals and the log-normal kernel used by the mixture density.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Gamma distribution in shape/rate form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaDist {
    pub shape: f64,
    pub rate: f64,
}

impl GammaDist {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite() && rate > 0.0 && rate.is_finite()) {
            return Err(Error::domain(format!(
                "gamma needs positive finite shape and rate, got ({shape}, {rate})"
            )));
        }
        Ok(Self { shape, rate })
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn variance(&self) -> f64 {
        self.shape / (self.rate * self.rate)
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        self.shape * self.rate.ln() - ln_gamma(self.shape) + (self.shape - 1.0) * x.ln()
            - self.rate * x
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            gamma_lr(self.shape, self.rate * x)
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            gamma_ur(self.shape, self.rate * x)
        }
    }

    /// Inverse CDF by safeguarded Newton iteration inside a shrinking
    /// bracket; iterates to within a few ulps of `x`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("quantile level {p} outside (0, 1)")));
        }
        // Work in the standardized variable y = rate * x.
        let a = self.shape;
        let upper_tail = p > 0.5;
        // residual with the better-conditioned tail
        let resid = |y: f64| {
            if upper_tail {
                (1.0 - p) - gamma_ur(a, y)
            } else {
                gamma_lr(a, y) - p
            }
        };

        let mut lo = 0.0_f64;
        let mut hi = a.max(1.0);
        while resid(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::Numerical("gamma quantile bracket overflow".into()));
            }
        }
        let ln_norm = ln_gamma(a);
        let density = |y: f64| ((a - 1.0) * y.ln() - y - ln_norm).exp();

        let mut y = 0.5 * (lo + hi);
        for _ in 0..500 {
            let r = resid(y);
            if r == 0.0 {
                return Ok(y / self.rate);
            }
            if r < 0.0 {
                lo = y;
            } else {
                hi = y;
            }
            let d = density(y);
            let mut next = if d > 0.0 { y - r / d } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - y).abs() <= 4.0 * f64::EPSILON * next.abs() || (hi - lo) <= 4.0 * f64::EPSILON * hi {
                return Ok(next / self.rate);
            }
            y = next;
        }
        Err(Error::Numerical(format!(
            "gamma quantile did not converge for shape {a}, p {p}"
        )))
    }

    /// Equal-tail interval with total tail mass `1 - level`.
    pub fn equal_tail(&self, level: f64) -> Result<(f64, f64)> {
        let tail = 0.5 * (1.0 - level);
        Ok((self.quantile(tail)?, self.quantile(1.0 - tail)?))
    }
}

/// Log density of N(mean, 1/precision).
pub fn normal_ln_pdf(x: f64, mean: f64, precision: f64) -> f64 {
    let d = x - mean;
    0.5 * precision.ln() - LN_SQRT_2PI - 0.5 * precision * d * d
}

/// Log density of the log-normal whose logarithm is N(mean, 1/precision).
pub fn lognormal_ln_pdf(z: f64, mean: f64, precision: f64) -> f64 {
    if z <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let w = z.ln();
    normal_ln_pdf(w, mean, precision) - w
}

/// Sample mean and unbiased variance, NaN for fewer than two values.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = p * (n - 1) as f64;
    let i = h.floor() as usize;
    let frac = h - i as f64;
    if i + 1 >= n {
        sorted[n - 1]
    } else {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    }
}
