mod common;

use plp_frailty::diagnostics::geweke_default;
use plp_frailty::dist::GammaDist;
use plp_frailty::dpm::gibbs::stick_break;
use plp_frailty::dpm::{inverse_transform, transform, FrailtyTarget, LogDensity};
use plp_frailty::plp::{
    log_frailty_factor, log_likelihood, log_mean_factor, log_shape_factor, posterior,
};
use plp_frailty::sim::simulate;
use plp_frailty::{
    FailureDataset, FailureRecord, ObservationDesign, PlpParams, PriorConfig, SimScenario,
};
use proptest::prelude::*;

fn records_strategy() -> impl Strategy<Value = Vec<FailureRecord>> {
    prop::collection::vec((1usize..=5, 1usize..=3, 0.001f64..9.999), 0..40).prop_map(|v| {
        let mut seen = std::collections::HashSet::new();
        v.into_iter()
            .filter(|(s, _, t)| seen.insert((*s, t.to_bits())))
            .map(|(system, cause, time)| FailureRecord { system, cause, time })
            .collect()
    })
}

fn design() -> ObservationDesign {
    ObservationDesign::new(10.0, 5, 3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn summary_ignores_record_order(recs in records_strategy(), seed in any::<u64>()) {
        let mut shuffled = recs.clone();
        let n = shuffled.len();
        if n > 1 {
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
        }
        let a = FailureDataset::new(design(), recs).unwrap().summarize();
        let b = FailureDataset::new(design(), shuffled).unwrap().summarize();
        prop_assert_eq!(a.by_system_cause, b.by_system_cause);
        prop_assert_eq!(a.per_cause, b.per_cause);
        for (x, y) in a.log_ratio_sums.iter().zip(&b.log_ratio_sums) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn csv_round_trip(recs in records_strategy()) {
        let data = FailureDataset::new(design(), recs).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        data.write(&path).unwrap();
        let back = FailureDataset::read(&path, Default::default()).unwrap();
        prop_assert_eq!(back.design(), data.design());
        prop_assert_eq!(back.records(), data.records());
    }

    #[test]
    fn transform_is_a_bijection(x in prop::collection::vec(-6.0f64..6.0, 1..30)) {
        let (z, _) = transform(&x);
        let mean = z.iter().sum::<f64>() / z.len() as f64;
        prop_assert!((mean - 1.0).abs() < 1e-12);
        prop_assert!(z.iter().all(|v| *v > 0.0));
        let back = inverse_transform(&z).unwrap();
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
        }
    }

    #[test]
    fn log_jacobian_matches_finite_differences(x in prop::collection::vec(-2.0f64..2.0, 1..12)) {
        let m = x.len() + 1;
        let (_, lj) = transform(&x);
        let fd = common::fd_log_jacobian(&x, |v| {
            let (z, _) = transform(v);
            z[..m - 1].iter().map(|zi| zi / m as f64).collect()
        });
        prop_assert!((fd - lj).abs() < 1e-5 * lj.abs().max(1.0), "{} vs {}", fd, lj);
    }

    #[test]
    fn target_gradient_matches_finite_differences(
        x in prop::collection::vec(-2.0f64..2.0, 1..10),
        seed in 0u64..1000,
    ) {
        let m = x.len() + 1;
        let counts: Vec<u64> = (0..m).map(|j| (seed * 7 + j as u64 * 13) % 20).collect();
        let means: Vec<f64> = (0..m).map(|j| ((j as f64) * 0.37).sin()).collect();
        let precisions: Vec<f64> = (0..m).map(|j| 0.5 + (j % 3) as f64).collect();
        let target = FrailtyTarget::new(&counts, means, precisions);
        let mut grad = vec![0.0; m - 1];
        target.log_density_grad(&x, &mut grad);
        for k in 0..m - 1 {
            let h = 1e-6;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let fd = (target.log_density(&xp) - target.log_density(&xm)) / (2.0 * h);
            prop_assert!((fd - grad[k]).abs() < 1e-5 * grad[k].abs().max(1.0), "k={} {} vs {}", k, fd, grad[k]);
        }
    }

    #[test]
    fn likelihood_factorizes_on_the_simplex(
        seed in 0u64..500,
        b in prop::collection::vec(0.3f64..3.0, 4),
        a in prop::collection::vec(0.5f64..20.0, 4),
        x in prop::collection::vec(-2.0f64..2.0, 8),
    ) {
        let s = SimScenario::gamma(
            ObservationDesign::new(20.0, 5, 2).unwrap(),
            PlpParams::new(vec![1.2, 0.7], vec![5.0, 13.33]).unwrap(),
            1.0,
            seed,
        ).unwrap();
        let data = simulate(&s).unwrap().data;
        let counts = data.summarize();
        prop_assume!(counts.per_cause.iter().all(|&n| n > 0));
        let residual = |beta: &[f64], alpha: &[f64], z_star: &[f64]| {
            let (z, _) = transform(z_star);
            let p = PlpParams::new(beta.to_vec(), alpha.to_vec()).unwrap();
            log_likelihood(&p, &z, &data).unwrap()
                - log_frailty_factor(&z, &counts)
                - log_shape_factor(beta, &counts)
                - log_mean_factor(alpha, &counts)
        };
        let r1 = residual(&b[..2], &a[..2], &x[..4]);
        let r2 = residual(&b[2..], &a[2..], &x[4..]);
        prop_assert!((r1 - r2).abs() < 1e-8 * r1.abs().max(1.0), "{} vs {}", r1, r2);
    }

    #[test]
    fn beta_posterior_mean_is_scaled_mle(
        n in 2u64..500,
        s in 0.1f64..500.0,
        zeta in 0.0f64..2.0,
    ) {
        let counts = plp_frailty::CountSummary {
            by_system_cause: vec![vec![n]],
            per_system: vec![n],
            per_cause: vec![n],
            log_ratio_sums: vec![s],
            systems: 1,
        };
        let post = posterior(&counts, PriorConfig::new(zeta).unwrap()).unwrap();
        let mle = n as f64 / s;
        let expect = (n as f64 + 1.0 - zeta) / n as f64 * mle;
        prop_assert!((post.causes[0].beta.mean() - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn gamma_quantile_is_monotone(shape in 0.2f64..200.0, rate in 0.01f64..100.0, p in 0.001f64..0.998) {
        let g = GammaDist::new(shape, rate).unwrap();
        let lo = g.quantile(p).unwrap();
        let hi = g.quantile(p + 0.001).unwrap();
        prop_assert!(lo < hi);
        prop_assert!((g.cdf(lo) - p).abs() < 1e-9);
    }

    #[test]
    fn stick_weights_are_subprobabilities(nu in prop::collection::vec(0.0f64..1.0, 1..50)) {
        let rho = stick_break(&nu);
        let total: f64 = rho.iter().sum();
        prop_assert!(rho.iter().all(|r| *r >= 0.0));
        prop_assert!(total <= 1.0 + 1e-12);
    }

    #[test]
    fn geweke_is_affine_invariant(seed in 0u64..200, shift in -50.0f64..50.0, scale in 0.1f64..10.0) {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..500).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y: Vec<f64> = x.iter().map(|v| shift + scale * v).collect();
        let a = geweke_default(&x).unwrap().z_score;
        let b = geweke_default(&y).unwrap().z_score;
        prop_assert!((a - b).abs() < 1e-6 * a.abs().max(1.0));
    }

    #[test]
    fn simulated_times_lie_in_window(seed in any::<u64>(), eta in 0.0f64..5.0) {
        let s = SimScenario::gamma(
            ObservationDesign::new(20.0, 8, 2).unwrap(),
            PlpParams::new(vec![0.75, 1.25], vec![9.46, 12.69]).unwrap(),
            eta,
            seed,
        ).unwrap();
        let out = simulate(&s).unwrap();
        prop_assert!(out.data.records().iter().all(|r| r.time > 0.0 && r.time < 20.0));
        for j in 1..=8 {
            let times: Vec<f64> = out.data.system_records(j).iter().map(|r| r.time).collect();
            prop_assert!(times.windows(2).all(|w| w[0] < w[1]));
        }
        prop_assert_eq!(simulate(&s).unwrap().data, out.data);
    }
}

#[test]
fn bias_standard_error_halves_when_m_quadruples() {
    use plp_frailty::harness::{named_scenario, run_harness};
    let s = named_scenario("table1", 10, 0.5, 12).unwrap();
    let small = run_harness(&s, PriorConfig::default(), 500, None).unwrap();
    let large = run_harness(&s, PriorConfig::default(), 2_000, None).unwrap();
    for name in ["alpha_1", "beta_1"] {
        let ratio = small.row(name).unwrap().bias_se / large.row(name).unwrap().bias_se;
        assert!((ratio - 2.0).abs() < 0.3, "{name}: {ratio}");
    }
}

#[test]
fn harness_mse_dominates_squared_bias() {
    use plp_frailty::harness::{named_scenario, run_harness};
    let s = named_scenario("table2", 10, 1.0, 13).unwrap();
    let r = run_harness(&s, PriorConfig::default(), 200, None).unwrap();
    for row in &r.rows {
        assert!(row.mse >= row.bias * row.bias);
        assert!((0.0..=1.0).contains(&row.cp));
    }
}
