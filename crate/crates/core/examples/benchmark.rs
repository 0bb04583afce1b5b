//! Monte Carlo bias, MSE and 95% coverage of the closed-form estimators
//! under a named scenario, printed as a table.
//!
//! cargo run --release --example benchmark -- [table1|table2] [eta] [m] [M] [seed]

use plp_frailty::harness::{named_scenario, run_harness};
use plp_frailty::PriorConfig;

fn main() -> plp_frailty::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let key = args.first().map_or("table1", String::as_str);
    let eta: f64 = args.get(1).map_or(0.5, |s| s.parse().expect("eta"));
    let m: usize = args.get(2).map_or(50, |s| s.parse().expect("m"));
    let reps: usize = args.get(3).map_or(2_000, |s| s.parse().expect("M"));
    let seed: u64 = args.get(4).map_or(1, |s| s.parse().expect("seed"));

    let scenario = named_scenario(key, m, eta, seed)?;
    let report = run_harness(&scenario, PriorConfig::default(), reps, None)?;
    println!("{key}: eta = {eta}, m = {m}, M = {reps}, skipped = {}", report.skipped);
    println!("{:<9} {:>8} {:>10} {:>9} {:>9} {:>7}", "param", "truth", "bias", "bias SE", "MSE", "CP95");
    for r in &report.rows {
        println!(
            "{:<9} {:>8.3} {:>10.5} {:>9.5} {:>9.5} {:>7.4}",
            r.parameter, r.truth, r.bias, r.bias_se, r.mse, r.cp
        );
    }
    Ok(())
}
