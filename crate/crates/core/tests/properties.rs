use proptest::prelude::*;
use rsd_market::equilibrium::{brute_force_optimal, optimal_assignment, verify_ce};
use rsd_market::mechanisms::{
    expost_ce_transfers, expost_pairwise_transfers, interim_transfers, rsd_then_ttc,
    serial_dictatorship, truthful_picks, AgentModel, PairwiseMode, TradePolicy, TransactionCost,
};
use rsd_market::suite::TradeAudit;
use rsd_market::market::{total_welfare, utilities};
use rsd_market::{Market, MarketInstance, NumericMode, PickOrder};

fn market(rows: Vec<Vec<i64>>, budgets: Vec<i64>) -> MarketInstance {
    let rows = rows
        .into_iter()
        .map(|r| r.into_iter().map(|v| v as f64).collect())
        .collect();
    MarketInstance::new(rows, budgets.into_iter().map(|b| b as f64).collect()).unwrap()
}

/// Square market, random order.
fn square(max_n: usize, lo: i64, hi: i64) -> impl Strategy<Value = (MarketInstance, PickOrder)> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(prop::collection::vec(lo..=hi, n), n),
            prop::collection::vec(0i64..=30, n),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        )
            .prop_map(move |(rows, budgets, order)| {
                (market(rows, budgets), PickOrder::new(order, n).unwrap())
            })
    })
}

/// At least as many items as agents.
fn wide(max_n: usize) -> impl Strategy<Value = (MarketInstance, PickOrder)> {
    (1..=max_n, 0..=2usize).prop_flat_map(|(n, extra)| {
        (
            prop::collection::vec(prop::collection::vec(0i64..=12, n + extra), n),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        )
            .prop_map(move |(rows, order)| {
                (market(rows, vec![0; n]), PickOrder::new(order, n).unwrap())
            })
    })
}

fn policies() -> impl Strategy<Value = TradePolicy> {
    (0..=4u8, any::<bool>(), any::<bool>(), any::<bool>()).prop_map(|(k, floor, single, budgets)| {
        let mode = if single {
            PairwiseMode::SinglePassBuyerExit
        } else {
            PairwiseMode::FixedPoint
        };
        TradePolicy::new(f64::from(k) / 4.0, floor, mode, budgets).unwrap()
    })
}

fn costs() -> impl Strategy<Value = TransactionCost> {
    prop_oneof![
        Just(TransactionCost::None),
        (0..=16u32).prop_map(|q| TransactionCost::Fixed(f64::from(q) / 4.0)),
        (0..=8u32).prop_map(|q| TransactionCost::Proportional(f64::from(q) / 8.0)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ce_transfers_reach_the_brute_force_optimum((m, order) in square(6, -8, 20)) {
        let ce = expost_ce_transfers(&m, &order).unwrap();
        let (best, optimum) = brute_force_optimal(&m).unwrap();
        prop_assert_eq!(total_welfare(&m, &ce.outcome.allocation), optimum);
        prop_assert_eq!(&best, &ce.outcome.allocation);
        prop_assert!(verify_ce(&m, &ce.endowment, &ce.outcome.allocation, &ce.prices));
        prop_assert!(ce.outcome.transfers.sum().abs() < 1e-9);
        prop_assert!(ce.prices.as_slice().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn ce_transfers_never_hurt_anyone((m, order) in square(6, -8, 20)) {
        let sd = serial_dictatorship(&m, &order).unwrap();
        let ce = expost_ce_transfers(&m, &order).unwrap();
        for (after, before) in utilities(&m, &ce.outcome).iter().zip(utilities(&m, &sd)) {
            prop_assert!(*after >= before - 1e-9);
        }
    }

    #[test]
    fn hungarian_matches_brute_force((m, _) in wide(5)) {
        let agents: Vec<usize> = (0..m.n_agents()).collect();
        let items: Vec<usize> = (0..m.n_items()).collect();
        let fast = optimal_assignment(&m, &agents, &items).unwrap();
        let (slow, optimum) = brute_force_optimal(&m).unwrap();
        prop_assert_eq!(total_welfare(&m, &fast), optimum);
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn ttc_keeps_truthful_picks((m, order) in wide(7)) {
        let picks = truthful_picks(&m, &order).unwrap();
        prop_assert_eq!(rsd_then_ttc(&m, &order).unwrap().allocation, picks);
    }

    #[test]
    fn identical_preferences_do_not_trade(
        row in prop::collection::vec(0i64..=6, 1..=7),
        policy in policies(),
        cost in costs(),
        seed in any::<u64>(),
    ) {
        let n = row.len();
        let m = market(vec![row; n], vec![100; n]);
        let order = PickOrder::random(n, seed);
        let pw = expost_pairwise_transfers(&m, &order, &policy, &cost).unwrap();
        prop_assert!(pw.trade_log.is_empty());
        prop_assert_eq!(pw.allocation, serial_dictatorship(&m, &order).unwrap().allocation);
    }

    #[test]
    fn aftermarket_trades_are_pareto_improving(
        (m, order) in square(6, -5, 25),
        policy in policies(),
        cost in costs(),
    ) {
        // Proportional prices are not dyadic, so integer mode cannot be exact.
        let m = match cost {
            TransactionCost::Proportional(_) => m.with_mode(NumericMode::Real).unwrap(),
            _ => m,
        };
        let out = expost_pairwise_transfers(&m, &order, &policy, &cost).unwrap();
        let mut audit = TradeAudit::default();
        audit.check("pairwise", &m, &out);
        prop_assert!(audit.failures.is_empty(), "{:?}", audit.failures);
        let paid: f64 = out.trade_log.iter().map(|r| r.cost).sum();
        prop_assert!((out.trade_log.total_cost() - paid).abs() < 1e-9);
        if policy.budget_enforced {
            for j in 0..m.n_agents() {
                let cash = m.budget(j) + out.transfers.get(j)
                    - out.trade_log.costs_by_agent(m.n_agents())[j];
                prop_assert!(cash >= -1e-9);
            }
        }
    }

    #[test]
    fn fixed_point_leaves_no_feasible_trade((m, order) in square(6, 0, 20)) {
        let out = expost_pairwise_transfers(
            &m, &order, &TradePolicy::at_reservation(), &TransactionCost::None,
        ).unwrap();
        for j in 0..m.n_agents() {
            for k in 0..m.n_agents() {
                if j != k {
                    let (ok, _) = rsd_market::equilibrium::trade_feasible(
                        &m, &out.allocation, j, k,
                    ).unwrap();
                    prop_assert!(!ok);
                }
            }
        }
    }

    #[test]
    fn interim_runs_are_valid(
        (m, order) in square(6, 0, 20),
        lookback in any::<bool>(),
        policy in policies(),
    ) {
        let model = if lookback { AgentModel::LookbackStrategic } else { AgentModel::Myopic };
        let out = interim_transfers(&m, &order, model, &policy).unwrap();
        let mut audit = TradeAudit::default();
        audit.check("interim", &m, &out);
        prop_assert!(audit.failures.is_empty(), "{:?}", audit.failures);
    }

    #[test]
    fn instance_json_round_trips((m, _) in square(5, -20, 20)) {
        let back = MarketInstance::from_json(&m.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, m);
    }
}
