//! Power-law process intensities, likelihood, and closed-form Bayesian
//! estimates for cause-specific shape and mean parameters.
//!
//! The cause-`q` intensity of system `j` is
//!
//! ```text
//! λ_q(t | z_j) = z_j β_q α_q t^(β_q - 1) T^(-β_q)
//! ```
//!
//! so that `α_q` is the expected number of cause-`q` failures per unit-frailty
//! system on `(0, T]`. In this parametrization the likelihood factors into a
//! frailty part, a shape part and a mean part, and with the prior
//! `π(α, β) ∝ Π α_q^{-1} β_q^{-ζ}` both marginal posteriors are gamma.

use serde::{Deserialize, Serialize};

use crate::data::{CountSummary, FailureDataset};
use crate::dist::GammaDist;
use crate::error::{Error, Result};

/// Per-cause shape `β_q` and expected count `α_q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlpParams {
    pub beta: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl PlpParams {
    pub fn new(beta: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        if beta.len() != alpha.len() || beta.is_empty() {
            return Err(Error::Dimension(format!(
                "{} shape values but {} mean values",
                beta.len(),
                alpha.len()
            )));
        }
        if beta
            .iter()
            .chain(&alpha)
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(Error::domain("PLP parameters must be positive and finite"));
        }
        Ok(Self { beta, alpha })
    }

    pub fn causes(&self) -> usize {
        self.beta.len()
    }

    /// Classic scale `μ_q` with `α_q = (T / μ_q)^β_q`.
    pub fn alpha_to_scale(&self, cause: usize, horizon: f64) -> f64 {
        let q = cause - 1;
        horizon * self.alpha[q].powf(-1.0 / self.beta[q])
    }

    /// Sum of `α_q` over causes: expected failures of a unit-frailty system.
    pub fn total_alpha(&self) -> f64 {
        self.alpha.iter().sum()
    }

    fn check_cause(&self, cause: usize) -> Result<usize> {
        if cause == 0 || cause > self.causes() {
            return Err(Error::domain(format!(
                "cause {cause} outside 1..={}",
                self.causes()
            )));
        }
        Ok(cause - 1)
    }
}

/// Shape-prior exponent `ζ`. The default 2 makes the shape estimator unbiased.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorConfig {
    pub zeta: f64,
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self { zeta: 2.0 }
    }
}

impl PriorConfig {
    pub fn new(zeta: f64) -> Result<Self> {
        if !(zeta.is_finite() && zeta >= 0.0) {
            return Err(Error::domain(format!("zeta must be >= 0, got {zeta}")));
        }
        Ok(Self { zeta })
    }
}

/// Cause-`q` failure intensity at time `t` for frailty `z`.
pub fn intensity(params: &PlpParams, cause: usize, t: f64, horizon: f64, z: f64) -> Result<f64> {
    let q = params.check_cause(cause)?;
    if !(t > 0.0 && t <= horizon) {
        return Err(Error::domain(format!("time {t} outside (0, {horizon}]")));
    }
    if !(z > 0.0) {
        return Err(Error::domain(format!("frailty must be positive, got {z}")));
    }
    let b = params.beta[q];
    Ok(z * b * params.alpha[q] * (t / horizon).powf(b - 1.0) / horizon)
}

/// Expected cause-`q` failures on `(0, T]` for frailty `z`.
pub fn mean_function(params: &PlpParams, cause: usize, z: f64) -> f64 {
    z * params.alpha[cause - 1]
}

/// Full log-likelihood of the frailty model, computed in log space.
///
/// Includes every constant, so `exp` of it equals the product of per-system
/// event-density contributions.
pub fn log_likelihood(params: &PlpParams, frailty: &[f64], data: &FailureDataset) -> Result<f64> {
    let d = data.design();
    if frailty.len() != d.systems {
        return Err(Error::Dimension(format!(
            "{} frailties for {} systems",
            frailty.len(),
            d.systems
        )));
    }
    if params.causes() != d.causes {
        return Err(Error::Dimension(format!(
            "{} causes in parameters, {} in data",
            params.causes(),
            d.causes
        )));
    }
    let ln_t = d.horizon.ln();
    let ln_beta: Vec<f64> = params.beta.iter().map(|b| b.ln()).collect();
    let ln_alpha: Vec<f64> = params.alpha.iter().map(|a| a.ln()).collect();
    let mut ll = 0.0;
    for r in data.records() {
        let q = r.cause - 1;
        ll += frailty[r.system - 1].ln() + ln_beta[q] + ln_alpha[q]
            + (params.beta[q] - 1.0) * r.time.ln()
            - params.beta[q] * ln_t;
    }
    let total_alpha = params.total_alpha();
    ll -= frailty.iter().sum::<f64>() * total_alpha;
    Ok(ll)
}

/// Log of the frailty factor `Π z_j^{n_j}`.
pub fn log_frailty_factor(frailty: &[f64], counts: &CountSummary) -> f64 {
    frailty
        .iter()
        .zip(&counts.per_system)
        .map(|(z, &n)| n as f64 * z.ln())
        .sum()
}

/// Log of `Π_q γ(β_q | n_q + 1, Σ log(T/t))`, the shape factor.
pub fn log_shape_factor(beta: &[f64], counts: &CountSummary) -> f64 {
    beta.iter()
        .enumerate()
        .map(|(q, &b)| {
            let n = counts.per_cause[q] as f64;
            GammaDist {
                shape: n + 1.0,
                rate: counts.log_ratio_sums[q],
            }
            .ln_pdf(b)
        })
        .sum()
}

/// Log of `Π_q γ(α_q | n_q + 1, m)`, the mean factor.
pub fn log_mean_factor(alpha: &[f64], counts: &CountSummary) -> f64 {
    let m = counts.systems as f64;
    alpha
        .iter()
        .enumerate()
        .map(|(q, &a)| {
            GammaDist {
                shape: counts.per_cause[q] as f64 + 1.0,
                rate: m,
            }
            .ln_pdf(a)
        })
        .sum()
}

/// Classic single-system estimates `(β̂, μ̂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicMle {
    pub beta: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleEstimates {
    pub beta: Vec<f64>,
    /// Present only for a single system with a single cause.
    pub classic: Option<ClassicMle>,
}

/// Shape MLE `β̂_q = n_q / Σ log(T/t)` for one cause (1-based).
pub fn mle_beta(counts: &CountSummary, cause: usize) -> Result<f64> {
    let q = cause - 1;
    let n = counts.per_cause[q];
    if n == 0 {
        return Err(Error::UndefinedMle { cause });
    }
    Ok(n as f64 / counts.log_ratio_sums[q])
}

pub fn mle(data: &FailureDataset) -> Result<MleEstimates> {
    let counts = data.summarize();
    let beta = (1..=counts.causes())
        .map(|q| mle_beta(&counts, q))
        .collect::<Result<Vec<_>>>()?;
    let d = data.design();
    let classic = (d.systems == 1 && d.causes == 1).then(|| {
        let n = counts.per_cause[0] as f64;
        ClassicMle {
            beta: beta[0],
            mu: d.horizon / n.powf(1.0 / beta[0]),
        }
    });
    Ok(MleEstimates { beta, classic })
}

/// Gamma marginal posteriors of one cause.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CausePosterior {
    pub beta: GammaDist,
    pub alpha: GammaDist,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlpPosterior {
    pub causes: Vec<CausePosterior>,
}

/// `α_q | D ~ γ(n_q, m)`.
pub fn alpha_posterior(count: u64, systems: usize, cause: usize) -> Result<GammaDist> {
    if count == 0 {
        return Err(Error::ImproperPosterior {
            cause,
            count,
            limit: 0.0,
        });
    }
    GammaDist::new(count as f64, systems as f64)
}

/// `β_q | D ~ γ(n_q + 1 - ζ, n_q / β̂_q)`.
pub fn beta_posterior(count: u64, log_ratio_sum: f64, prior: PriorConfig, cause: usize) -> Result<GammaDist> {
    let shape = count as f64 + 1.0 - prior.zeta;
    if !(shape > 0.0) || count == 0 {
        return Err(Error::ImproperPosterior {
            cause,
            count,
            limit: prior.zeta - 1.0,
        });
    }
    if !(log_ratio_sum > 0.0) {
        return Err(Error::domain(format!(
            "cause {cause}: shape statistic must be positive, got {log_ratio_sum}"
        )));
    }
    GammaDist::new(shape, log_ratio_sum)
}

pub fn posterior(counts: &CountSummary, prior: PriorConfig) -> Result<PlpPosterior> {
    let causes = (0..counts.causes())
        .map(|q| {
            Ok(CausePosterior {
                beta: beta_posterior(
                    counts.per_cause[q],
                    counts.log_ratio_sums[q],
                    prior,
                    q + 1,
                )?,
                alpha: alpha_posterior(counts.per_cause[q], counts.systems, q + 1)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PlpPosterior { causes })
}

/// One row of an estimates table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterEstimate {
    pub parameter: String,
    pub mean: f64,
    pub sd: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ParameterEstimate {
    pub fn from_gamma(parameter: impl Into<String>, g: &GammaDist, level: f64) -> Result<Self> {
        let (ci_low, ci_high) = g.equal_tail(level)?;
        Ok(Self {
            parameter: parameter.into(),
            mean: g.mean(),
            sd: g.sd(),
            ci_low,
            ci_high,
        })
    }

    pub fn covers(&self, truth: f64) -> bool {
        self.ci_low <= truth && truth <= self.ci_high
    }
}

/// Posterior means, SDs and equal-tail intervals, shapes first then means.
pub fn bayes_estimates(posterior: &PlpPosterior, level: f64) -> Result<Vec<ParameterEstimate>> {
    let mut rows = Vec::with_capacity(2 * posterior.causes.len());
    for (q, c) in posterior.causes.iter().enumerate() {
        rows.push(ParameterEstimate::from_gamma(format!("beta_{}", q + 1), &c.beta, level)?);
    }
    for (q, c) in posterior.causes.iter().enumerate() {
        rows.push(ParameterEstimate::from_gamma(format!("alpha_{}", q + 1), &c.alpha, level)?);
    }
    Ok(rows)
}

/// Mean-parameter rows from cause totals alone.
pub fn alpha_estimates(per_cause: &[u64], systems: usize, level: f64) -> Result<Vec<ParameterEstimate>> {
    per_cause
        .iter()
        .enumerate()
        .map(|(q, &n)| {
            let g = alpha_posterior(n, systems, q + 1)?;
            ParameterEstimate::from_gamma(format!("alpha_{}", q + 1), &g, level)
        })
        .collect()
}

pub fn estimates_to_csv(rows: &[ParameterEstimate]) -> String {
    let mut out = String::from("parameter,mean,sd,ci_low,ci_high\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.parameter, r.mean, r.sd, r.ci_low, r.ci_high
        ));
    }
    out
}

/// Duane-plot coordinates for one cause with their least-squares slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuanePlot {
    pub cause: usize,
    /// `(ln t, ln N(t))` at each cause-`q` failure, pooled over systems.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
}

pub fn duane_points(data: &FailureDataset, cause: usize) -> Result<DuanePlot> {
    if cause == 0 || cause > data.design().causes {
        return Err(Error::domain(format!("no cause {cause} in dataset")));
    }
    let mut times: Vec<f64> = data
        .records()
        .iter()
        .filter(|r| r.cause == cause)
        .map(|r| r.time)
        .collect();
    if times.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "Duane plot for cause {cause} needs at least two failures, found {}",
            times.len()
        )));
    }
    times.sort_by(f64::total_cmp);
    let points: Vec<(f64, f64)> = times
        .iter()
        .enumerate()
        .map(|(i, t)| (t.ln(), ((i + 1) as f64).ln()))
        .collect();
    let (slope, intercept) = least_squares(&points)?;
    Ok(DuanePlot {
        cause,
        points,
        slope,
        intercept,
    })
}

fn least_squares(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Numerical("Duane abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
