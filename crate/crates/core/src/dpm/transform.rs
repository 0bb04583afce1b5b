//! Bijection between `R^(m-1)` and frailty vectors with mean exactly one.
//!
//! Stick-breaking on the simplex: `b_j = logistic(x_j - ln(m - j))`,
//! `a_j = b_j (1 - Σ_{i<j} a_i)` for `j < m`, `a_m` takes the remainder, and
//! `z = m a`. The offset `ln(m - j)` maps `x = 0` to `z = (1, ..., 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Frailty vector in its constrained, log and unconstrained forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrailtyVector {
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub z_star: Vec<f64>,
}

impl FrailtyVector {
    pub fn from_unconstrained(z_star: Vec<f64>) -> Self {
        let (z, _) = transform(&z_star);
        let w = z.iter().map(|v| v.ln()).collect();
        Self { z, w, z_star }
    }

    pub fn from_frailties(z: &[f64]) -> Result<Self> {
        let z_star = inverse_transform(z)?;
        Ok(Self::from_unconstrained(z_star))
    }

    /// All frailties equal to one.
    pub fn unit(systems: usize) -> Self {
        Self::from_unconstrained(vec![0.0; systems.saturating_sub(1)])
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

/// Intermediate quantities of the forward map, shared with the gradient.
pub(crate) struct Breaks {
    /// `b_j` for `j < m`.
    pub b: Vec<f64>,
    /// `ln z_j` for all `m` systems.
    pub w: Vec<f64>,
    pub log_jacobian: f64,
}

pub(crate) fn forward(z_star: &[f64]) -> Breaks {
    let m = z_star.len() + 1;
    let ln_m = (m as f64).ln();
    let mut b = Vec::with_capacity(m - 1);
    let mut w = Vec::with_capacity(m);
    let mut log_rem = 0.0; // ln(1 - Σ_{i<j} a_i)
    let mut log_jacobian = 0.0;
    for (j, &x) in z_star.iter().enumerate() {
        let s = x - ((m - 1 - j) as f64).ln();
        let log_b = log_sigmoid(s);
        let log_1mb = log_sigmoid(-s);
        b.push(log_b.exp());
        w.push(ln_m + log_rem + log_b);
        log_jacobian += log_b + log_1mb + log_rem;
        log_rem += log_1mb;
    }
    w.push(ln_m + log_rem);
    Breaks {
        b,
        w,
        log_jacobian,
    }
}

/// Maps `z*` (length `m - 1`) to `z` (length `m`, mean one) and returns the
/// log absolute Jacobian determinant of `z* -> (a_1, ..., a_{m-1})`.
pub fn transform(z_star: &[f64]) -> (Vec<f64>, f64) {
    let f = forward(z_star);
    (f.w.iter().map(|w| w.exp()).collect(), f.log_jacobian)
}

/// Inverse of [`transform`]. Requires positive entries averaging to one.
pub fn inverse_transform(z: &[f64]) -> Result<Vec<f64>> {
    let m = z.len();
    if m == 0 {
        return Err(Error::domain("empty frailty vector"));
    }
    if z.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::domain("frailties must be positive and finite"));
    }
    let mean = z.iter().sum::<f64>() / m as f64;
    if (mean - 1.0).abs() > 1e-8 {
        return Err(Error::domain(format!("frailty mean is {mean}, expected 1")));
    }
    let a: Vec<f64> = z.iter().map(|v| v / m as f64).collect();
    // remaining[j] = Σ_{i>=j} a_i, summed from the tail for accuracy
    let mut remaining = vec![0.0; m + 1];
    for j in (0..m).rev() {
        remaining[j] = remaining[j + 1] + a[j];
    }
    let out = (0..m - 1)
        .map(|j| {
            let b = a[j] / remaining[j];
            let logit = a[j].ln() - remaining[j + 1].ln();
            debug_assert!(b > 0.0 && b < 1.0);
            logit + ((m - 1 - j) as f64).ln()
        })
        .collect();
    Ok(out)
}
