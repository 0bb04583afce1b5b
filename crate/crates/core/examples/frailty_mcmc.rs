//! Simulate a fleet with gamma frailty, run the DPM sampler and compare the
//! recovered frailty variance and individual frailties with the truth.
//!
//! cargo run --release --example frailty_mcmc -- [eta] [m] [seed]

use plp_frailty::diagnostics::geweke_default;
use plp_frailty::dpm::{run_chain, ChainConfig, DpmHyperparams, HmcConfig};
use plp_frailty::sim::simulate;
use plp_frailty::{ObservationDesign, PlpParams, SimScenario};

fn main() -> plp_frailty::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let eta: f64 = args.first().map_or(1.0, |s| s.parse().expect("eta"));
    let m: usize = args.get(1).map_or(100, |s| s.parse().expect("m"));
    let seed: u64 = args.get(2).map_or(2024, |s| s.parse().expect("seed"));

    let design = ObservationDesign::new(20.0, m, 2)?;
    let params = PlpParams::new(vec![1.2, 0.7], vec![5.0, 13.33])?;
    let scenario = SimScenario::gamma(design, params, eta, seed)?;
    let sim = simulate(&scenario)?;

    let chain = ChainConfig {
        seed,
        ..ChainConfig::default()
    };
    let trace = run_chain(&sim.data, &DpmHyperparams::default(), &HmcConfig::default(), &chain)?;

    let v = trace.var_z_summary();
    let kept = &trace.var_z[trace.burn_in..];
    let g = geweke_default(kept)?;
    let sample_var = plp_frailty::dpm::frailty_variance(&sim.frailty);
    println!("true eta {eta}, sample variance of drawn z {sample_var:.3}");
    println!(
        "posterior Var(Z): mean {:.3}, 95% CI [{:.3}, {:.3}]",
        v.mean, v.ci_low, v.ci_high
    );
    if let Some(mv) = trace.mixture_variance_summary() {
        println!("mixture-implied variance: median {:.3}", mv.median);
    }
    println!("Geweke z {:.2} ({})", g.z_score, if g.pass { "pass" } else { "fail" });
    println!(
        "HMC acceptance {:.3}, step size {:.4}, divergences {}",
        trace.acceptance_rate(),
        trace.step_size.last().unwrap(),
        trace.divergences()
    );

    let z_hat = trace.z_hat();
    let counts = sim.data.summarize().per_system;
    println!("system  failures  z_true  z_hat");
    for j in 0..m.min(10) {
        println!("{:>6}  {:>8}  {:>6.3}  {:>5.3}", j + 1, counts[j], sim.frailty[j], z_hat[j]);
    }
    Ok(())
}
