//! `plpfrail` command-line front end.
//!
//! Each subcommand takes an optional `--config FILE` (flat TOML) plus flags
//! that override it. Outputs are CSV/JSON files in `--output DIR`; a short
//! summary goes to stdout. Exit codes: 0 success, 2 config error, 3 data
//! error, 4 numerical failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::RunConfig;
use crate::data::FailureDataset;
use crate::diagnostics::{autocorrelation, ess, geweke};
use crate::dpm::density::linear_grid;
use crate::dpm::{density_estimate, run_chain, ChainConfig};
use crate::error::{Error, Result};
use crate::harness::{named_scenario, run_harness, McmcSettings};
use crate::plp::{
    alpha_estimates, bayes_estimates, duane_points, estimates_to_csv, mle, posterior, PlpParams,
};
use crate::sim::{frailty_to_csv, simulate, FrailtyFamily, LogNormalComponent, SimScenario};

#[derive(Debug, Parser)]
#[command(name = "plpfrail", version, about = "Reliability inference for fleets of repairable systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommandArgs {
    /// Flat TOML file of defaults; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a fleet and write failures.csv and frailty.csv.
    Simulate(CommandArgs),
    /// Closed-form posterior estimates, MLEs and Duane data.
    Fit(CommandArgs),
    /// Run the frailty sampler and write traces and summaries.
    Mcmc(CommandArgs),
    /// Geweke, autocorrelation and ESS for a trace CSV.
    Diagnose(CommandArgs),
    /// Monte Carlo bias / MSE / coverage report.
    Benchmark(CommandArgs),
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 2,
        Error::Numerical(_) => 4,
        _ => 3,
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a command and returns its stdout summary.
pub fn run(command: Command) -> Result<String> {
    let (f, args): (fn(&RunConfig) -> Result<String>, CommandArgs) = match command {
        Command::Simulate(a) => (cmd_simulate, a),
        Command::Fit(a) => (cmd_fit, a),
        Command::Mcmc(a) => (cmd_mcmc, a),
        Command::Diagnose(a) => (cmd_diagnose, a),
        Command::Benchmark(a) => (cmd_benchmark, a),
    };
    let base = match &args.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    f(&args.run.over(base))
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Domain(m) | Error::Dimension(m) => Error::Config(m),
        other => other,
    }
}

fn output_dir(cfg: &RunConfig) -> Result<Option<&Path>> {
    match &cfg.output {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            Ok(Some(dir.as_path()))
        }
        None => Ok(None),
    }
}

fn require_output(cfg: &RunConfig) -> Result<&Path> {
    output_dir(cfg)?.ok_or_else(|| Error::Config("--output directory is required".into()))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Builds the simulation scenario described by `cfg`.
pub fn scenario_from_config(cfg: &RunConfig) -> Result<SimScenario> {
    let seed = cfg.require_seed()?;
    let beta = cfg
        .beta
        .clone()
        .ok_or_else(|| Error::Config("beta is required".into()))?;
    let alpha = cfg
        .alpha
        .clone()
        .ok_or_else(|| Error::Config("alpha is required".into()))?;
    let mut overrides = cfg.design_overrides();
    overrides.causes = overrides.causes.or(Some(beta.len()));
    let design = overrides.resolve()?;
    let params = PlpParams::new(beta, alpha).map_err(as_config)?;
    let family = match cfg.family.as_deref().unwrap_or("gamma") {
        "gamma" => FrailtyFamily::Gamma,
        "point" => FrailtyFamily::PointMass,
        "lognormal-mixture" => {
            let missing = || Error::Config("mixture_weights, mixture_log_means and mixture_log_sds are required".into());
            let w = cfg.mixture_weights.as_ref().ok_or_else(missing)?;
            let mu = cfg.mixture_log_means.as_ref().ok_or_else(missing)?;
            let sd = cfg.mixture_log_sds.as_ref().ok_or_else(missing)?;
            if w.len() != mu.len() || w.len() != sd.len() {
                return Err(Error::Config("mixture vectors differ in length".into()));
            }
            FrailtyFamily::LogNormalMixture(
                (0..w.len())
                    .map(|i| LogNormalComponent {
                        weight: w[i],
                        log_mean: mu[i],
                        log_sd: sd[i],
                    })
                    .collect(),
            )
        }
        other => return Err(Error::Config(format!("unknown frailty family '{other}'"))),
    };
    let s = SimScenario {
        design,
        params,
        eta: cfg.eta.unwrap_or(0.0),
        family,
        seed,
    };
    s.validate().map_err(as_config)?;
    Ok(s)
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<String> {
    let scenario = scenario_from_config(cfg)?;
    let dir = require_output(cfg)?;
    let out = simulate(&scenario)?;
    out.data.write(dir.join("failures.csv"))?;
    write(dir, "frailty.csv", &frailty_to_csv(&out.frailty))?;
    let counts = out.data.summarize();
    let mut s = String::new();
    let _ = writeln!(s, "systems: {}", scenario.design.systems);
    let _ = writeln!(s, "failures: {}", counts.total());
    for (q, n) in counts.per_cause.iter().enumerate() {
        let _ = writeln!(s, "cause {}: {n}", q + 1);
    }
    let _ = writeln!(s, "wrote {}", dir.display());
    Ok(s)
}

pub fn cmd_fit(cfg: &RunConfig) -> Result<String> {
    let level = cfg.level()?;
    let dir = output_dir(cfg)?;
    if let Some(per_cause) = &cfg.counts {
        let m = cfg
            .systems
            .ok_or_else(|| Error::Config("counts need the number of systems m".into()))?;
        let rows = alpha_estimates(per_cause, m, level)?;
        let csv = estimates_to_csv(&rows);
        if let Some(dir) = dir {
            write(dir, "estimates.csv", &csv)?;
            write(dir, "estimates.json", &to_json(&json!({ "estimates": rows })))?;
        }
        return Ok(csv);
    }
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("fit needs --input or --counts".into()))?;
    let data = FailureDataset::read(input, cfg.design_overrides())?;
    if data.is_empty() {
        return Err(Error::InsufficientData("dataset contains no failures".into()));
    }
    let counts = data.summarize();
    let post = posterior(&counts, cfg.prior()?)?;
    let rows = bayes_estimates(&post, level)?;
    let mles = mle(&data)?;
    let duane: Vec<_> = (1..=counts.causes())
        .filter_map(|q| duane_points(&data, q).ok())
        .collect();

    let csv = estimates_to_csv(&rows);
    let mut s = csv.clone();
    for (q, b) in mles.beta.iter().enumerate() {
        let _ = writeln!(s, "mle beta_{}: {b}", q + 1);
    }
    if let Some(c) = &mles.classic {
        let _ = writeln!(s, "classic mle: beta = {}, mu = {}", c.beta, c.mu);
    }
    for d in &duane {
        let _ = writeln!(s, "duane cause {}: slope = {}", d.cause, d.slope);
    }
    if let Some(dir) = dir {
        write(dir, "estimates.csv", &csv)?;
        let slopes: Vec<_> = duane
            .iter()
            .map(|d| json!({ "cause": d.cause, "slope": d.slope, "intercept": d.intercept }))
            .collect();
        write(
            dir,
            "estimates.json",
            &to_json(&json!({ "estimates": rows, "mle": mles, "duane": slopes })),
        )?;
        for d in &duane {
            let mut f = String::from("log_time,log_cumulative_failures\n");
            for (x, y) in &d.points {
                let _ = writeln!(f, "{x},{y}");
            }
            write(dir, &format!("duane_cause_{}.csv", d.cause), &f)?;
        }
    }
    Ok(s)
}

pub fn cmd_mcmc(cfg: &RunConfig) -> Result<String> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("mcmc needs --input".into()))?;
    let hyper = cfg.hyperparams()?;
    let hmc = cfg.hmc()?;
    let chain = cfg.chain(ChainConfig::default())?;
    let grid_points = cfg.grid_points.unwrap_or(200);
    let (lo, hi) = (cfg.grid_min.unwrap_or(0.01), cfg.grid_max.unwrap_or(5.0));
    if !(lo > 0.0 && hi > lo && grid_points >= 2) {
        return Err(Error::Config("density grid needs 0 < grid_min < grid_max and at least 2 points".into()));
    }
    let dir = require_output(cfg)?;
    let data = FailureDataset::read(input, cfg.design_overrides())?;
    let counts = data.summarize();
    let trace = run_chain(&data, &hyper, &hmc, &chain)?;
    let m = trace.systems();

    let mut z = String::from("iteration");
    for j in 1..=m {
        let _ = write!(z, ",z_{j}");
    }
    z.push('\n');
    for (i, row) in trace.z.iter().enumerate() {
        let _ = write!(z, "{}", i + 1);
        for v in row {
            let _ = write!(z, ",{v}");
        }
        z.push('\n');
    }
    write(dir, "trace_z.csv", &z)?;

    let mut scalars = String::from("iteration,var_z,c,clusters,accept_prob,accepted,divergent,step_size\n");
    for i in 0..trace.len() {
        let _ = writeln!(
            scalars,
            "{},{},{},{},{},{},{},{}",
            i + 1,
            trace.var_z[i],
            trace.c[i],
            trace.clusters[i],
            trace.accept_prob[i],
            u8::from(trace.accepted[i]),
            u8::from(trace.divergent[i]),
            trace.step_size[i]
        );
    }
    write(dir, "trace_scalars.csv", &scalars)?;

    let summaries = trace.z_summaries();
    let mut zt = String::from("system_id,failures,z_hat,sd,ci_low,ci_high\n");
    for (j, s) in summaries.iter().enumerate() {
        let _ = writeln!(
            zt,
            "{},{},{},{},{},{}",
            j + 1,
            counts.per_system[j],
            s.mean,
            s.sd,
            s.ci_low,
            s.ci_high
        );
    }
    write(dir, "frailty.csv", &zt)?;

    let grid = linear_grid(lo, hi, grid_points);
    let dens = density_estimate(&trace.mixtures, &grid)?;
    let mut d = String::from("z,density\n");
    for (x, y) in grid.iter().zip(&dens) {
        let _ = writeln!(d, "{x},{y}");
    }
    write(dir, "density.csv", &d)?;

    let var_z = trace.var_z_summary();
    let kept = &trace.var_z[trace.burn_in..];
    let gw = geweke(kept, 0.1, 0.5).ok();
    let divergent_frac = trace.divergences() as f64 / trace.len() as f64;
    let summary = json!({
        "systems": m,
        "iterations": trace.len(),
        "burn_in": trace.burn_in,
        "var_z": var_z,
        "mixture_var_z": trace.mixture_variance_summary(),
        "geweke_var_z": gw,
        "ess_var_z": ess(kept),
        "acceptance_rate": trace.acceptance_rate(),
        "divergent_fraction": divergent_frac,
        "final_step_size": trace.step_size.last(),
    });
    write(dir, "summary.json", &to_json(&summary))?;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "Var(Z): mean {:.4}, sd {:.4}, 95% CI [{:.4}, {:.4}]",
        var_z.mean, var_z.sd, var_z.ci_low, var_z.ci_high
    );
    if let Some(g) = gw {
        let _ = writeln!(s, "Geweke z (Var(Z)): {:.3} ({})", g.z_score, if g.pass { "pass" } else { "fail" });
    }
    let _ = writeln!(s, "acceptance rate: {:.3}", trace.acceptance_rate());
    let _ = writeln!(s, "wrote {}", dir.display());
    if divergent_frac > 0.5 {
        eprint!("{s}");
        return Err(Error::Numerical(format!(
            "{:.0}% of HMC transitions diverged",
            100.0 * divergent_frac
        )));
    }
    Ok(s)
}

/// Numeric columns of a trace CSV, skipping an `iteration` column.
pub fn read_trace(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        msg: "empty trace file".into(),
    })?;
    let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != names.len() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("expected {} fields, found {}", names.len(), fields.len()),
            });
        }
        for (c, f) in cols.iter_mut().zip(fields) {
            c.push(f.trim().parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("not a number: '{}'", f.trim()),
            })?);
        }
    }
    Ok(names
        .into_iter()
        .zip(cols)
        .filter(|(n, _)| n != "iteration")
        .collect())
}

pub fn cmd_diagnose(cfg: &RunConfig) -> Result<String> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("diagnose needs --input".into()))?;
    let first = cfg.geweke_first.unwrap_or(0.1);
    let last = cfg.geweke_last.unwrap_or(0.5);
    let max_lag = cfg.max_lag.unwrap_or(40);
    let burn = cfg.burn_in.unwrap_or(0);
    let mut columns = read_trace(input)?;
    if let Some(name) = &cfg.column {
        columns.retain(|(n, _)| n == name);
        if columns.is_empty() {
            return Err(Error::Config(format!("no column '{name}' in trace")));
        }
    }
    let mut table = String::from("column,n,mean,geweke_z,geweke_pass,ess,acf_1\n");
    let mut acf_cols = Vec::new();
    for (name, values) in &columns {
        let kept = values.get(burn..).unwrap_or(&[]);
        let g = geweke(kept, first, last)?;
        let acf = autocorrelation(kept, max_lag);
        let mean = kept.iter().sum::<f64>() / kept.len() as f64;
        let _ = writeln!(
            table,
            "{name},{},{mean},{},{},{},{}",
            kept.len(),
            g.z_score,
            g.pass,
            ess(kept),
            acf.get(1).copied().unwrap_or(f64::NAN)
        );
        acf_cols.push(acf);
    }
    if let Some(dir) = output_dir(cfg)? {
        write(dir, "diagnostics.csv", &table)?;
        let mut a = String::from("lag");
        for (n, _) in &columns {
            let _ = write!(a, ",{n}");
        }
        a.push('\n');
        let lags = acf_cols.iter().map(Vec::len).min().unwrap_or(0);
        for k in 0..lags {
            let _ = write!(a, "{k}");
            for c in &acf_cols {
                let _ = write!(a, ",{}", c[k]);
            }
            a.push('\n');
        }
        write(dir, "acf.csv", &a)?;
    }
    Ok(table)
}

pub fn cmd_benchmark(cfg: &RunConfig) -> Result<String> {
    let seed = cfg.require_seed()?;
    let key = cfg.scenario.as_deref().unwrap_or("table1");
    let scenario = named_scenario(
        key,
        cfg.systems.unwrap_or(50),
        cfg.eta.unwrap_or(0.5),
        seed,
    )
    .map_err(as_config)?;
    let replications = cfg.replications.unwrap_or(2_000);
    let mcmc = if cfg.with_mcmc.unwrap_or(false) {
        let d = McmcSettings::default();
        Some(McmcSettings {
            hyper: cfg.hyperparams()?,
            hmc: cfg.hmc()?,
            chain: cfg.chain(d.chain)?,
        })
    } else {
        None
    };
    let report = run_harness(&scenario, cfg.prior()?, replications, mcmc.as_ref())?;
    let csv = report.to_csv();
    if let Some(dir) = output_dir(cfg)? {
        write(dir, "report.csv", &csv)?;
        write(dir, "report.json", &to_json(&report))?;
    }
    Ok(csv)
}
