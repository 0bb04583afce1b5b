use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn plpfrail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plpfrail"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn simulate_with_eta(dir: &Path, eta: &str) -> Output {
    plpfrail(&[
        "simulate", "--m", "50", "--T", "20", "--beta", "1.2,0.7", "--alpha", "5,13.33", "--eta", eta,
        "--seed", "7", "--output", dir.to_str().unwrap(),
    ])
}

fn simulate_into(dir: &Path) -> Output {
    simulate_with_eta(dir, "1")
}

#[test]
fn simulate_writes_dataset_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = simulate_into(dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let data = fs::read_to_string(dir.path().join("failures.csv")).unwrap();
    assert!(data.starts_with("# T=20\n# m=50\n# K=2\nsystem_id,cause,time\n"));
    let z = fs::read_to_string(dir.path().join("frailty.csv")).unwrap();
    assert_eq!(z.lines().count(), 51);
}

#[test]
fn simulate_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    simulate_into(a.path());
    simulate_into(b.path());
    for f in ["failures.csv", "frailty.csv"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap()
        );
    }
}

#[test]
fn zero_eta_sidecar_is_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&simulate_with_eta(dir.path(), "0")), 0);
    let z = fs::read_to_string(dir.path().join("frailty.csv")).unwrap();
    assert!(z.lines().skip(1).all(|l| l.ends_with(",1")));
}

#[test]
fn simulate_requires_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = plpfrail(&[
        "simulate", "--m", "5", "--T", "20", "--beta", "1", "--alpha", "5", "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn invalid_parameter_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&simulate_with_eta(dir.path(), "-1")), 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "seed = 7\nT = 20\nm = 50\nbeta = [1.2, 0.7]\nalpha = [5, 13.33]\neta = 1\n").unwrap();
    let out = dir.path().join("out");
    let o = plpfrail(&[
        "simulate", "--config", cfg.to_str().unwrap(), "--m", "5", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let data = fs::read_to_string(out.join("failures.csv")).unwrap();
    assert!(data.contains("# m=5\n"));
}

#[test]
fn unknown_config_key_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "sead = 7\n").unwrap();
    let o = plpfrail(&["benchmark", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn fit_from_warranty_counts() {
    let o = plpfrail(&["fit", "--counts", "76,87,111", "--m", "439"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let means: Vec<String> = text
        .lines()
        .skip(1)
        .map(|l| format!("{:.3}", l.split(',').nth(1).unwrap().parse::<f64>().unwrap()))
        .collect();
    assert_eq!(means, ["0.173", "0.198", "0.253"]);
}

#[test]
fn fit_writes_table_and_duane_files() {
    let dir = tempfile::tempdir().unwrap();
    simulate_into(dir.path());
    let out = dir.path().join("fit");
    let o = plpfrail(&[
        "fit", "--input", dir.path().join("failures.csv").to_str().unwrap(), "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("estimates.csv")).unwrap();
    assert!(table.starts_with("parameter,mean,sd,ci_low,ci_high\nbeta_1,"));
    assert_eq!(table.lines().count(), 5);
    assert!(out.join("duane_cause_1.csv").exists());
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("estimates.json")).unwrap()).unwrap();
    assert_eq!(json["estimates"].as_array().unwrap().len(), 4);
}

#[test]
fn fit_single_system_prints_classic_mle() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("one.csv");
    fs::write(&p, "# T=10\n# m=1\n# K=1\nsystem_id,cause,time\n1,1,2\n1,1,5\n1,1,7\n1,1,9\n").unwrap();
    let o = plpfrail(&["fit", "--input", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("classic mle: beta ="));
}

#[test]
fn fit_empty_dataset_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.csv");
    fs::write(&p, "# T=10\n# m=3\n# K=1\nsystem_id,cause,time\n").unwrap();
    assert_eq!(code(&plpfrail(&["fit", "--input", p.to_str().unwrap()])), 3);
}

#[test]
fn fit_improper_posterior_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("thin.csv");
    fs::write(&p, "# T=10\n# m=2\n# K=2\nsystem_id,cause,time\n1,1,2\n1,2,3\n2,1,4\n").unwrap();
    let o = plpfrail(&["fit", "--input", p.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8(o.stderr).unwrap().contains("improper posterior"));
}

#[test]
fn malformed_dataset_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    fs::write(&p, "# T=10\n# m=2\n# K=1\nsystem_id,cause,time\n1,1,abc\n").unwrap();
    assert_eq!(code(&plpfrail(&["fit", "--input", p.to_str().unwrap()])), 3);
}

#[test]
fn mcmc_rejects_burn_in_beyond_iterations() {
    let dir = tempfile::tempdir().unwrap();
    simulate_into(dir.path());
    let o = plpfrail(&[
        "mcmc", "--input", dir.path().join("failures.csv").to_str().unwrap(), "--iterations", "100",
        "--burn-in", "200", "--output", dir.path().join("chain").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn mcmc_then_diagnose() {
    let dir = tempfile::tempdir().unwrap();
    simulate_into(dir.path());
    let chain = dir.path().join("chain");
    let o = plpfrail(&[
        "mcmc", "--input", dir.path().join("failures.csv").to_str().unwrap(), "--iterations", "600",
        "--burn-in", "300", "--seed", "3", "--output", chain.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let table = fs::read_to_string(chain.join("frailty.csv")).unwrap();
    let z_hat: Vec<f64> = table
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(z_hat.len(), 50);
    assert!((z_hat.iter().sum::<f64>() / 50.0 - 1.0).abs() < 1e-10);
    for f in ["trace_z.csv", "trace_scalars.csv", "density.csv", "summary.json"] {
        assert!(chain.join(f).exists(), "{f}");
    }
    assert_eq!(fs::read_to_string(chain.join("trace_z.csv")).unwrap().lines().count(), 601);

    let diag = dir.path().join("diag");
    let o = plpfrail(&[
        "diagnose", "--input", chain.join("trace_scalars.csv").to_str().unwrap(), "--column", "var_z",
        "--burn-in", "300", "--output", diag.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let d = fs::read_to_string(diag.join("diagnostics.csv")).unwrap();
    assert!(d.starts_with("column,n,mean,geweke_z,geweke_pass,ess,acf_1\nvar_z,300,"));
    assert!(diag.join("acf.csv").exists());
}

#[test]
fn diagnose_short_trace_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.csv");
    let mut s = String::from("iteration,x\n");
    for i in 0..50 {
        s.push_str(&format!("{i},{}\n", i % 7));
    }
    fs::write(&p, s).unwrap();
    assert_eq!(code(&plpfrail(&["diagnose", "--input", p.to_str().unwrap()])), 3);
}

#[test]
fn benchmark_smoke_and_unknown_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let o = plpfrail(&[
        "benchmark", "--scenario", "table1", "--replications", "1", "--seed", "5", "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.starts_with("eta,statistic,m,alpha_1,alpha_2,beta_1,beta_2\n"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["replications"], 1);

    let o = plpfrail(&["benchmark", "--scenario", "table7", "--seed", "5", "--replications", "1"]);
    assert_eq!(code(&o), 2);
    let o = plpfrail(&["benchmark", "--replications", "1"]);
    assert_eq!(code(&o), 2);
}
