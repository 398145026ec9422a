use pareto_bandit::environments::{load_gains, save_gains};
use pareto_bandit::experiments::{build_policy, fig2, BoundSpec, ExperimentConfig, Fig2Plan, PolicyBlock};
use pareto_bandit::frontier::{contains, harmonic_point, lower_bound_certificate};
use pareto_bandit::policies::exp3_params;
use pareto_bandit::simulation::{monte_carlo, run_adversarial, run_episode_seeded};
use pareto_bandit::{Executor, GainMatrix, PolicySpec, StochasticInstance};

#[test]
fn frontier_point_drives_a_policy() {
    let b: BoundSpec = "harmonic:40".parse().unwrap();
    let bounds = b.resolve(2000, 4).unwrap();
    assert!(contains(&bounds).member);
    let spec = build_policy(
        "umoss",
        &PolicyBlock { b: Some("harmonic:40".into()), ..Default::default() },
        2000,
        4,
    )
    .unwrap();
    let inst = StochasticInstance::gaussian(vec![0.3, 0.0, 0.1, -0.2]).unwrap();
    let ep = run_episode_seeded(&spec, &inst, 2000, 11, false).unwrap();
    assert_eq!(ep.pulls.iter().sum::<u64>(), 2000);
    // favoured and best arm: pulled most
    assert_eq!(ep.pulls.iter().enumerate().max_by_key(|(_, &c)| c).unwrap().0, 0);
    assert!(ep.identity_error(&inst) <= 1e-9);
}

#[test]
fn empirical_regret_vector_is_certified() {
    // worst cases of a real strategy can never be refuted by the certificate;
    // for an empirical scan this is a consistency check
    let n = 1000;
    let spec = build_policy("moss", &PolicyBlock::default(), n, 2).unwrap();
    let mut worst = [0.0f64; 2];
    for d in [-0.3, -0.1, 0.1, 0.3] {
        let inst = StochasticInstance::gaussian(vec![0.0, d]).unwrap();
        let est = monte_carlo(&spec, &inst, n, 50, 3, &Executor::sequential()).unwrap();
        for (w, m) in worst.iter_mut().zip(&est.mean) {
            *w = w.max(*m);
        }
    }
    assert!(lower_bound_certificate(&worst, n).unwrap().member);
}

#[test]
fn exp3_on_saved_gains() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let g = GainMatrix::from_fn(500, 3, |t, i| if i == 2 || t % 7 == 0 { 1.0 } else { 0.25 }).unwrap();
    save_gains(&g, &path).unwrap();
    let loaded = load_gains(&path).unwrap();
    assert_eq!(loaded, g);
    let params = exp3_params(60.0, 500, 3).unwrap();
    let est = run_adversarial(&params, &loaded, 30, 4, &Executor::sequential()).unwrap();
    assert_eq!(est.best_arm, 2);
    assert!(est.regret <= params.regret_bound(2) + 3.0 * est.stderr);
}

#[test]
fn fig2_rows_are_independent_of_the_sweep() {
    let cfg = ExperimentConfig::from_json(
        r#"{"n":400,"k":3,"reps":5,"grid":{"start":0,"stop":0.4,"step":0.2},"policies":{"umoss":{"b":"harmonic:15"}}}"#,
    )
    .unwrap();
    let exec = Executor::sequential();
    let full = fig2(&Fig2Plan::resolve(&cfg).unwrap(), &exec).unwrap();
    let only3 = fig2(&Fig2Plan::resolve(&cfg).unwrap().with_i_stars(vec![3]).unwrap(), &exec).unwrap();
    let full_csv = full.to_csv();
    for line in only3.to_csv().lines().filter(|l| !l.starts_with('#')) {
        assert!(full_csv.lines().any(|l| l == line), "{line}");
    }
    assert!(harmonic_point(15.0, 400, 3).is_ok());
    assert!(matches!(
        build_policy("exp3g", &PolicyBlock::default(), 400, 3).unwrap(),
        PolicySpec::Exp3(_)
    ));
}
