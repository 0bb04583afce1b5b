//! Conditional log-density of the unconstrained frailties and its gradient.

use super::transform::forward;

/// Anything HMC can sample: a log-density with an analytic gradient.
pub trait LogDensity {
    fn dim(&self) -> usize;

    /// Writes the gradient into `grad` and returns the log-density.
    fn log_density_grad(&self, x: &[f64], grad: &mut [f64]) -> f64;

    fn log_density(&self, x: &[f64]) -> f64 {
        let mut g = vec![0.0; self.dim()];
        self.log_density_grad(x, &mut g)
    }
}

/// `π(z* | Ω, U, Y, D) ∝ |J(z*)| Π_j LN(z_j | μ_{Y_j}, τ_{Y_j}⁻¹) Π_j z_j^{n_j}`.
///
/// Each system carries the mean and precision of the mixture component it
/// is currently allocated to.
#[derive(Debug, Clone, PartialEq)]
pub struct FrailtyTarget {
    pub counts: Vec<f64>,
    pub means: Vec<f64>,
    pub precisions: Vec<f64>,
}

impl FrailtyTarget {
    pub fn new(counts: &[u64], means: Vec<f64>, precisions: Vec<f64>) -> Self {
        assert_eq!(counts.len(), means.len());
        assert_eq!(counts.len(), precisions.len());
        Self {
            counts: counts.iter().map(|&n| n as f64).collect(),
            means,
            precisions,
        }
    }

    pub fn systems(&self) -> usize {
        self.counts.len()
    }
}

impl LogDensity for FrailtyTarget {
    fn dim(&self) -> usize {
        self.counts.len() - 1
    }

    fn log_density_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let m = self.counts.len();
        let f = forward(x);
        // d/dw_j of [ -w - τ/2 (w-μ)² + n w ]
        let mut dw = vec![0.0; m];
        let mut value = f.log_jacobian;
        for j in 0..m {
            let w = f.w[j];
            let d = w - self.means[j];
            let tau = self.precisions[j];
            value += -w - 0.5 * tau * d * d + self.counts[j] * w;
            dw[j] = self.counts[j] - 1.0 - tau * d;
        }
        // kernel normalizers, constant in x
        for j in 0..m {
            value += 0.5 * self.precisions[j].ln();
        }
        let mut tail = dw[m - 1];
        for k in (0..m - 1).rev() {
            let b = f.b[k];
            let later = (m - 2 - k) as f64;
            grad[k] = 1.0 - 2.0 * b - later * b + dw[k] * (1.0 - b) - b * tail;
            tail += dw[k];
        }
        value
    }
}
