//! Fit a dataset in closed form: Bayes estimates with credible intervals,
//! the shape MLEs, and Duane-plot coordinates per cause. Reads a dataset
//! CSV if given, otherwise simulates one.
//!
//! cargo run --example duane_plot -- [data.csv]

use plp_frailty::plp::{bayes_estimates, duane_points, mle, posterior};
use plp_frailty::sim::simulate;
use plp_frailty::{FailureDataset, ObservationDesign, PlpParams, PriorConfig, SimScenario};

fn main() -> plp_frailty::Result<()> {
    let data = match std::env::args().nth(1) {
        Some(path) => FailureDataset::read(path, Default::default())?,
        None => {
            let design = ObservationDesign::new(20.0, 50, 2)?;
            let params = PlpParams::new(vec![0.75, 1.25], vec![9.46, 12.69])?;
            simulate(&SimScenario::gamma(design, params, 0.5, 3)?)?.data
        }
    };
    let counts = data.summarize();
    let post = posterior(&counts, PriorConfig::default())?;
    for r in bayes_estimates(&post, 0.95)? {
        println!(
            "{:<8} {:.4} (sd {:.4})  [{:.4}, {:.4}]",
            r.parameter, r.mean, r.sd, r.ci_low, r.ci_high
        );
    }
    let m = mle(&data)?;
    println!("shape MLEs: {:?}", m.beta);

    for q in 1..=counts.causes() {
        let d = duane_points(&data, q)?;
        println!(
            "cause {q}: Duane slope {:.3} over {} points",
            d.slope,
            d.points.len()
        );
        for (x, y) in d.points.iter().step_by((d.points.len() / 5).max(1)) {
            println!("  ln t = {x:.3}  ln N = {y:.3}");
        }
    }
    Ok(())
}
