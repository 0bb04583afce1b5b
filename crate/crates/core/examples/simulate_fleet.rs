//! Simulate a fleet of repairable systems with two competing failure causes
//! and a shared gamma frailty, then write it in the dataset CSV format.
//!
//! cargo run --example simulate_fleet -- [out.csv]

use plp_frailty::sim::simulate;
use plp_frailty::{ObservationDesign, PlpParams, SimScenario};

fn main() -> plp_frailty::Result<()> {
    let design = ObservationDesign::new(20.0, 10, 2)?;
    let params = PlpParams::new(vec![1.2, 0.7], vec![5.0, 13.33])?;
    let scenario = SimScenario::gamma(design, params, 1.0, 7)?;
    let out = simulate(&scenario)?;

    let counts = out.data.summarize();
    println!("system  z      cause1  cause2");
    for j in 0..counts.systems {
        let row = &counts.by_system_cause[j];
        println!("{:>6}  {:.3}  {:>6}  {:>6}", j + 1, out.frailty[j], row[0], row[1]);
    }
    println!("first failures of system 1:");
    for r in out.data.system_records(1).iter().take(5) {
        println!("  t = {:.3}, cause {}", r.time, r.cause);
    }

    if let Some(path) = std::env::args().nth(1) {
        out.data.write(&path)?;
        println!("wrote {path}");
    }
    Ok(())
}
