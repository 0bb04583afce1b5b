//! Geweke z-scores, autocorrelations and effective sample sizes for an iid
//! chain, a sticky AR(1) chain and a chain with a shift in mean.

use plp_frailty::diagnostics::{autocorrelation, ess, geweke_default};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> plp_frailty::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 10_000;
    let noise: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut ar = vec![0.0; n];
    for i in 1..n {
        ar[i] = 0.9 * ar[i - 1] + noise[i];
    }
    let shifted: Vec<f64> = noise
        .iter()
        .enumerate()
        .map(|(i, v)| if i < n / 2 { *v } else { v + 0.5 })
        .collect();

    println!("{:<8} {:>9} {:>6} {:>8} {:>8}", "chain", "geweke z", "pass", "acf(1)", "ESS");
    for (name, x) in [("iid", &noise), ("ar(0.9)", &ar), ("shifted", &shifted)] {
        let g = geweke_default(x)?;
        let acf = autocorrelation(x, 1);
        println!(
            "{name:<8} {:>9.3} {:>6} {:>8.3} {:>8.0}",
            g.z_score,
            g.pass,
            acf[1],
            ess(x)
        );
    }
    Ok(())
}
