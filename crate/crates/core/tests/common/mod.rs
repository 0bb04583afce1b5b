//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use statrs::function::beta::ln_beta;

/// Unnormalized log-density on the 3-system simplex `z_1 + z_2 + z_3 = 3`
/// with fixed log-normal atoms, in `(z_1, z_2)` coordinates.
fn simplex_log_kernel(z: [f64; 3], counts: [f64; 3], means: [f64; 3], precisions: [f64; 3]) -> f64 {
    (0..3)
        .map(|j| {
            let w = z[j].ln();
            (counts[j] - 1.0) * w - 0.5 * precisions[j] * (w - means[j]).powi(2)
        })
        .sum()
}

/// Posterior means of `z` by midpoint quadrature on an `n x n` grid over the
/// triangle.
pub fn simplex_posterior_means(
    counts: [f64; 3],
    means: [f64; 3],
    precisions: [f64; 3],
    n: usize,
) -> [f64; 3] {
    let h = 3.0 / n as f64;
    let mut pts = Vec::new();
    let mut top = f64::NEG_INFINITY;
    for i in 0..n {
        let z1 = (i as f64 + 0.5) * h;
        for k in 0..n {
            let z2 = (k as f64 + 0.5) * h;
            let z3 = 3.0 - z1 - z2;
            if z3 <= 0.0 {
                continue;
            }
            let lp = simplex_log_kernel([z1, z2, z3], counts, means, precisions);
            top = top.max(lp);
            pts.push(([z1, z2, z3], lp));
        }
    }
    let mut mass = 0.0;
    let mut acc = [0.0; 3];
    for (z, lp) in pts {
        let w = (lp - top).exp();
        mass += w;
        for j in 0..3 {
            acc[j] += w * z[j];
        }
    }
    acc.map(|a| a / mass)
}

/// `log π(c | k)` up to a constant for a Gamma(a, rate b) prior on the
/// concentration with `k` clusters among `m` observations.
pub fn concentration_log_density(c: f64, k: usize, m: usize, a: f64, b: f64) -> f64 {
    (a - 1.0 + k as f64 - 1.0) * c.ln() - b * c + (c + m as f64).ln() + ln_beta(c + 1.0, m as f64)
}

/// Probabilities of the bins `[edges[i], edges[i+1])` under
/// [`concentration_log_density`], by Simpson quadrature.
pub fn concentration_bin_probs(edges: &[f64], k: usize, m: usize, a: f64, b: f64) -> Vec<f64> {
    let lo = edges[0];
    let hi = *edges.last().unwrap();
    let n = 200_000;
    let h = (hi - lo) / n as f64;
    let f = |c: f64| {
        if c <= 0.0 {
            0.0
        } else {
            concentration_log_density(c, k, m, a, b).exp()
        }
    };
    let bins = edges.len() - 1;
    let mut probs = vec![0.0; bins];
    let mut total = 0.0;
    for i in 0..n {
        let x0 = lo + i as f64 * h;
        let piece = h / 6.0 * (f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h));
        total += piece;
        let mid = x0 + 0.5 * h;
        let bin = edges.partition_point(|e| *e <= mid).saturating_sub(1);
        probs[bin.min(bins - 1)] += piece;
    }
    probs.iter().map(|p| p / total).collect()
}

/// `ln |det A|` by Gaussian elimination with partial pivoting.
pub fn ln_abs_det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut out = 0.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        let p = a[col][col];
        out += p.abs().ln();
        for r in col + 1..n {
            let f = a[r][col] / p;
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    out
}

/// Central-difference Jacobian of `x -> (z_1, ..., z_{m-1}) / m`.
pub fn fd_log_jacobian(x: &[f64], map: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    let d = x.len();
    let mut jac = vec![vec![0.0; d]; d];
    for k in 0..d {
        let h = 1e-5 * (1.0 + x[k].abs());
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        let fp = map(&xp);
        let fm = map(&xm);
        for i in 0..d {
            jac[i][k] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    ln_abs_det(jac)
}

/// Uniform point on the simplex scaled to mean one.
pub fn random_unit_mean<R: rand::Rng>(m: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v * m as f64 / s).collect()
}
