use plp_frailty::sim::simulate;
use plp_frailty::{ObservationDesign, PlpParams, SimScenario};

fn scenario(m: usize, beta: Vec<f64>, alpha: Vec<f64>, eta: f64, seed: u64) -> SimScenario {
    let k = beta.len();
    SimScenario::gamma(
        ObservationDesign::new(20.0, m, k).unwrap(),
        PlpParams::new(beta, alpha).unwrap(),
        eta,
        seed,
    )
    .unwrap()
}

fn cause_counts(s: &SimScenario, cause: usize) -> Vec<f64> {
    let c = simulate(s).unwrap().data.summarize();
    c.by_system_cause.iter().map(|row| row[cause - 1] as f64).collect()
}

fn mean_sd(x: &[f64]) -> (f64, f64) {
    let (mean, var) = plp_frailty::dist::mean_var(x);
    (mean, var.sqrt())
}

#[test]
fn unit_shape_gives_uniform_times() {
    let s = scenario(2_000, vec![1.0], vec![5.0], 0.0, 21);
    let mut u: Vec<f64> = simulate(&s).unwrap().data.records().iter().map(|r| r.time / 20.0).collect();
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let ks = u
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max);
    assert!(n > 9_000.0);
    assert!(ks < 1.628 / n.sqrt(), "KS {ks}");
}

#[test]
fn poisson_mean_without_frailty() {
    let s = scenario(2_000, vec![1.2, 0.7], vec![5.0, 13.33], 0.0, 22);
    let (mean, _) = mean_sd(&cause_counts(&s, 1));
    assert!((mean - 5.0).abs() < 3.0 * (5.0f64 / 2_000.0).sqrt(), "{mean}");
}

#[test]
fn expected_total_failures_per_system() {
    let s = scenario(2_000, vec![1.2, 0.7], vec![5.0, 13.33], 0.5, 23);
    let c = simulate(&s).unwrap().data.summarize();
    let totals: Vec<f64> = c.per_system.iter().map(|&n| n as f64).collect();
    let (mean, sd) = mean_sd(&totals);
    assert!((mean - 18.33).abs() < 3.0 * sd / (totals.len() as f64).sqrt(), "{mean}");
}

#[test]
fn counts_are_negative_binomial_marginally() {
    let (alpha, eta, m) = (5.0, 1.0, 20_000);
    let s = scenario(m, vec![1.2], vec![alpha], eta, 24);
    let n = cause_counts(&s, 1);
    let (mean, sd) = mean_sd(&n);
    let var = sd * sd;
    let m4 = n.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / m as f64;
    let se = ((m4 - var * var) / m as f64).sqrt();
    let expect = alpha + eta * alpha * alpha;
    assert!((var - expect).abs() < 3.0 * se, "{var} vs {expect} (SE {se})");
}

#[test]
fn causes_uncorrelated_without_frailty_and_correlated_with_it() {
    let corr = |eta: f64, seed: u64| {
        let s = scenario(5_000, vec![1.2, 0.7], vec![5.0, 13.33], eta, seed);
        let a = cause_counts(&s, 1);
        let b = cause_counts(&s, 2);
        let (ma, sa) = mean_sd(&a);
        let (mb, sb) = mean_sd(&b);
        let cov = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (a.len() - 1) as f64;
        cov / (sa * sb)
    };
    assert!(corr(0.0, 25).abs() < 3.0 / 5_000f64.sqrt());
    assert!(corr(1.0, 26) > 0.5);
}
