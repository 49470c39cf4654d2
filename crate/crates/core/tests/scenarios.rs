use rsd_market::equilibrium::brute_force_optimal;
use rsd_market::scenarios;
use rsd_market::simulate::{batch_run, run_housing_sim, SimConfig};
use rsd_market::MarketInstance;

fn table(m: &MarketInstance) -> Vec<Vec<i64>> {
    m.rows()
        .into_iter()
        .map(|r| r.into_iter().map(|v| v as i64).collect())
        .collect()
}

#[test]
fn catalog_matches_the_published_tables() {
    assert_eq!(table(&scenarios::two_agent_swap()), [[2, 1], [10, 1]]);
    assert_eq!(
        table(&scenarios::stable_but_inefficient()),
        [[5, 0, 10], [0, 4, 0], [-10, 0, 5]]
    );
    assert_eq!(
        table(&scenarios::resale_manipulation()),
        [
            [20, 10, 10, 10],
            [10, 200, 10, 10],
            [10, 10, 10, 10],
            [10, 10, 10, 10]
        ]
    );
    assert_eq!(
        table(&scenarios::interim_shortfall()),
        [[10, 9, 0], [0, 10, 9], [4, 0, 1]]
    );
    assert_eq!(
        table(&scenarios::interim_with_latecomer()),
        [[10, 9, 0, 0], [0, 10, 9, 0], [4, 0, 1, 0], [0, 0, 100, 0]]
    );
    assert_eq!(scenarios::two_agent_swap().budgets(), [5.0, 5.0]);
    assert_eq!(scenarios::resale_manipulation().budgets(), [0.0, 500.0, 0.0, 0.0]);
}

#[test]
fn catalog_optima() {
    let optimum = |m: MarketInstance| brute_force_optimal(&m).unwrap().1;
    assert_eq!(optimum(scenarios::two_agent_swap()), 11.0);
    assert_eq!(optimum(scenarios::stable_but_inefficient()), 14.0);
    assert_eq!(optimum(scenarios::interim_shortfall()), 22.0);
    assert_eq!(optimum(scenarios::interim_with_latecomer()), 120.0);
}

#[test]
fn housing_runs_are_reproducible() {
    let mut cfg = SimConfig::new(200);
    cfg.replications = 4;
    let a = run_housing_sim(&cfg, 99).unwrap();
    let b = run_housing_sim(&cfg, 99).unwrap();
    assert_eq!(a, b);
    assert!(run_housing_sim(&cfg, 100).unwrap() != a);
    let (s1, r1) = batch_run(&cfg, 7, Some(1)).unwrap();
    let (s4, r4) = batch_run(&cfg, 7, Some(4)).unwrap();
    assert_eq!(r1, r4);
    assert_eq!(
        serde_json::to_string(&s1).unwrap(),
        serde_json::to_string(&s4).unwrap()
    );
}

#[test]
fn housing_welfare_accounting() {
    let cfg = SimConfig::new(300);
    let r = run_housing_sim(&cfg, 3).unwrap();
    assert!(r.money_imbalance() < 1e-6);
    let by_agent: f64 = r.deltas.iter().sum();
    assert!((by_agent - r.total_gain).abs() < 1e-6 * r.total_welfare_baseline.abs());
    for (after, before) in r.welfare_treatment.iter().zip(&r.welfare_pretrade) {
        assert!(after - before >= -1e-9 * before.abs());
    }
    assert_eq!(r.trades.len(), r.trade_count);
}
