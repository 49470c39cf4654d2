//! Housing-market simulation.
//!
//! Each replication draws room distributions, budgets and a pick order,
//! then compares two arms on the same draw:
//!
//! * baseline: truthful RSD on private values;
//! * treatment: RSD on resale-aware (augmented) values, followed by a
//!   single-pass, budget-constrained aftermarket on private values.
//!
//! Private values are generated on demand from `(seed, agent, room)`, so a
//! 10,000 × 10,000 market never materialises its valuation matrix.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use rand_pcg::Pcg64Mcg;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::trade_feasible;
use crate::error::{Error, Result};
use crate::market::{AgentId, Allocation, ItemId, Market, PickOrder, TradeRecord};
use crate::mechanisms::{
    truthful_picks, Aftermarket, PairwiseMode, TradePolicy, TransactionCost,
};

pub const MEAN_RANGE: (f64, f64) = (100.0, 10_000.0);
pub const VARIANCE_RANGE: (f64, f64) = (500.0, 1000.0);

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent seed for stream `stream` of `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream))
}

const STREAM_ROOMS: u64 = 1;
const STREAM_VALUES: u64 = 2;
const STREAM_ORDER: u64 = 3;

/// Per-room value distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomModel {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    value_seed: u64,
}

impl RoomModel {
    pub fn generate(n_rooms: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_ROOMS));
        let mean_dist = Uniform::new_inclusive(MEAN_RANGE.0, MEAN_RANGE.1).expect("valid range");
        let var_dist =
            Uniform::new_inclusive(VARIANCE_RANGE.0, VARIANCE_RANGE.1).expect("valid range");
        let mut mean = Vec::with_capacity(n_rooms);
        let mut variance = Vec::with_capacity(n_rooms);
        for _ in 0..n_rooms {
            mean.push(mean_dist.sample(&mut rng));
            variance.push(var_dist.sample(&mut rng));
        }
        RoomModel {
            mean,
            variance,
            value_seed: derive_seed(seed, STREAM_VALUES),
        }
    }

    pub fn n_rooms(&self) -> usize {
        self.mean.len()
    }

    /// Agent's private value for a room; a pure function of the seed.
    pub fn private_value(&self, agent: AgentId, room: ItemId) -> f64 {
        let key = mix64(self.value_seed ^ mix64(((agent as u64) << 32) | room as u64));
        let mut rng = Pcg64Mcg::seed_from_u64(key);
        let normal =
            Normal::new(self.mean[room], self.variance[room].sqrt()).expect("positive variance");
        normal.sample(&mut rng)
    }
}

/// How initial budgets are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WealthModel {
    Equal { amount: f64 },
    /// Agent `j` is in group `j / per_group` and group `g` holds `base^g`.
    PowerLaw { groups: usize, base: f64, per_group: usize },
}

impl Default for WealthModel {
    fn default() -> Self {
        WealthModel::Equal { amount: 10_000.0 }
    }
}

impl WealthModel {
    pub fn validate(&self, n_agents: usize) -> Result<()> {
        match *self {
            WealthModel::Equal { amount } if amount.is_finite() && amount > 0.0 => Ok(()),
            WealthModel::PowerLaw {
                groups,
                base,
                per_group,
            } if base.is_finite() && base > 0.0 && groups * per_group == n_agents => Ok(()),
            _ => Err(Error::arg(format!(
                "wealth model {self:?} does not fit {n_agents} agents"
            ))),
        }
    }

    pub fn budgets(&self, n_agents: usize) -> Vec<f64> {
        match *self {
            WealthModel::Equal { amount } => vec![amount; n_agents],
            WealthModel::PowerLaw { base, per_group, .. } => (0..n_agents)
                .map(|j| base.powf((j / per_group) as f64))
                .collect(),
        }
    }

    /// Agents needed for the model, if it fixes the count.
    pub fn n_agents(&self) -> Option<usize> {
        match *self {
            WealthModel::Equal { .. } => None,
            WealthModel::PowerLaw {
                groups, per_group, ..
            } => Some(groups * per_group),
        }
    }
}

impl std::str::FromStr for WealthModel {
    type Err = Error;
    /// `equal:AMOUNT` or `powerlaw:GROUPS,BASE,PER_GROUP`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::arg(format!("cannot parse wealth model '{s}'"));
        match s.split_once(':').ok_or_else(bad)? {
            ("equal", x) => Ok(WealthModel::Equal {
                amount: x.trim().parse().map_err(|_| bad())?,
            }),
            ("powerlaw", args) => {
                let parts: Vec<&str> = args.split(',').map(str::trim).collect();
                let [g, b, p] = parts.as_slice() else {
                    return Err(bad());
                };
                Ok(WealthModel::PowerLaw {
                    groups: g.parse().map_err(|_| bad())?,
                    base: b.parse().map_err(|_| bad())?,
                    per_group: p.parse().map_err(|_| bad())?,
                })
            }
            _ => Err(bad()),
        }
    }
}

/// Market with on-demand private values.
#[derive(Debug, Clone, PartialEq)]
pub struct HousingInstance {
    pub rooms: RoomModel,
    pub budgets: Vec<f64>,
}

impl Market for HousingInstance {
    fn n_agents(&self) -> usize {
        self.budgets.len()
    }
    fn n_items(&self) -> usize {
        self.rooms.n_rooms()
    }
    fn value(&self, agent: AgentId, item: ItemId) -> f64 {
        self.rooms.private_value(agent, item)
    }
    fn budget(&self, agent: AgentId) -> f64 {
        self.budgets[agent]
    }
}

/// `max(v, (v + v_pub)/2)` over an underlying market.
pub struct AugmentedView<'a, M: Market + ?Sized> {
    inner: &'a M,
    public: Vec<f64>,
}

impl<'a, M: Market + ?Sized> AugmentedView<'a, M> {
    pub fn new(inner: &'a M, public: Vec<f64>) -> Result<Self> {
        if public.len() != inner.n_items() {
            return Err(Error::arg("one public value per room is required"));
        }
        Ok(AugmentedView { inner, public })
    }
}

/// Augmented value of a room with private value `private` and public value
/// `public`.
pub fn augmented_value(private: f64, public: f64) -> f64 {
    private.max(0.5 * (private + public))
}

impl<M: Market + ?Sized> Market for AugmentedView<'_, M> {
    fn n_agents(&self) -> usize {
        self.inner.n_agents()
    }
    fn n_items(&self) -> usize {
        self.inner.n_items()
    }
    fn value(&self, agent: AgentId, item: ItemId) -> f64 {
        augmented_value(self.inner.value(agent, item), self.public[item])
    }
    fn budget(&self, agent: AgentId) -> f64 {
        self.inner.budget(agent)
    }
    fn mode(&self) -> crate::market::NumericMode {
        self.inner.mode()
    }
}

/// Each room's value to the agent who gets it under truthful picks in
/// `order`; 0 for rooms nobody gets.
pub fn public_valuations<M: Market + ?Sized>(market: &M, order: &PickOrder) -> Result<Vec<f64>> {
    let alloc = truthful_picks(market, order)?;
    Ok(public_from(market, &alloc))
}

fn public_from<M: Market + ?Sized>(market: &M, alloc: &Allocation) -> Vec<f64> {
    let mut public = vec![0.0; market.n_items()];
    for (agent, item) in alloc.iter() {
        if let Some(i) = item {
            public[i] = market.value(agent, i);
        }
    }
    public
}

/// Public value net of what a reseller would lose to the transaction cost.
fn net_of_cost(public: f64, cost: &TransactionCost) -> f64 {
    match *cost {
        TransactionCost::None => public,
        TransactionCost::Fixed(tau) => public - tau,
        TransactionCost::Proportional(rate) => public * (1.0 - rate),
    }
}

/// Simulation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n_agents: usize,
    pub wealth: WealthModel,
    pub cost: TransactionCost,
    pub policy: TradePolicy,
    pub replications: usize,
    /// Discount the public value by the resale cost when augmenting.
    pub cost_aware_augmentation: bool,
}

impl SimConfig {
    /// Equal budgets of 10,000, no transaction cost, sellers paid their
    /// reservation value, budgets enforced.
    pub fn new(n_agents: usize) -> Self {
        SimConfig {
            n_agents,
            wealth: WealthModel::default(),
            cost: TransactionCost::None,
            policy: Self::default_policy(),
            replications: 1,
            cost_aware_augmentation: true,
        }
    }

    pub fn default_policy() -> TradePolicy {
        TradePolicy {
            surplus_split: 0.0,
            seller_floor: true,
            mode: PairwiseMode::SinglePassBuyerExit,
            budget_enforced: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_agents == 0 {
            return Err(Error::arg("n_agents must be ≥ 1"));
        }
        if self.replications == 0 {
            return Err(Error::arg("replications must be ≥ 1"));
        }
        self.wealth.validate(self.n_agents)?;
        self.cost.validate()?;
        self.policy.validate()
    }
}

/// One replication's results. Rooms equal agents in number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub seed: u64,
    pub n_agents: usize,
    pub trade_count: usize,
    pub total_welfare_baseline: f64,
    pub total_welfare_treatment: f64,
    /// Treatment minus baseline.
    pub total_gain: f64,
    pub negative_delta_count: usize,
    pub total_cost: f64,
    pub budgets: Vec<f64>,
    pub welfare_baseline: Vec<f64>,
    /// Treatment welfare before the aftermarket.
    pub welfare_pretrade: Vec<f64>,
    pub welfare_treatment: Vec<f64>,
    pub final_cash: Vec<f64>,
    pub deltas: Vec<f64>,
    pub trades: Vec<TradeRecord>,
}

impl SimReport {
    pub fn negative_fraction(&self) -> f64 {
        self.negative_delta_count as f64 / self.n_agents as f64
    }

    /// Money check: final cash plus costs paid equals initial budgets.
    pub fn money_imbalance(&self) -> f64 {
        let before: f64 = self.budgets.iter().sum();
        let after: f64 = self.final_cash.iter().sum::<f64>() + self.total_cost;
        (after - before).abs() / before.abs().max(1.0)
    }

    pub fn summary(&self) -> RepSummary {
        RepSummary {
            seed: self.seed,
            trade_count: self.trade_count,
            total_welfare_baseline: self.total_welfare_baseline,
            total_welfare_treatment: self.total_welfare_treatment,
            total_gain: self.total_gain,
            negative_delta_count: self.negative_delta_count,
            negative_fraction: self.negative_fraction(),
            total_cost: self.total_cost,
        }
    }
}

/// Draws the market for `seed`.
pub fn generate_instance(config: &SimConfig, seed: u64) -> Result<HousingInstance> {
    config.validate()?;
    Ok(HousingInstance {
        rooms: RoomModel::generate(config.n_agents, seed),
        budgets: config.wealth.budgets(config.n_agents),
    })
}

/// Pick order shared by both arms of the replication for `seed`.
pub fn pick_order(n_agents: usize, seed: u64) -> PickOrder {
    PickOrder::random(n_agents, derive_seed(seed, STREAM_ORDER))
}

/// Runs one replication.
pub fn run_housing_sim(config: &SimConfig, seed: u64) -> Result<SimReport> {
    let instance = generate_instance(config, seed)?;
    let order = pick_order(config.n_agents, seed);
    run_on_instance(config, &instance, &order, seed)
}

/// Runs both arms on a given market and order.
pub fn run_on_instance<M: Market + ?Sized>(
    config: &SimConfig,
    market: &M,
    order: &PickOrder,
    seed: u64,
) -> Result<SimReport> {
    let n = market.n_agents();
    let baseline = truthful_picks(market, order)?;
    let mut public = public_from(market, &baseline);
    if config.cost_aware_augmentation {
        for p in &mut public {
            *p = net_of_cost(*p, &config.cost);
        }
    }
    let view = AugmentedView::new(market, public)?;
    let start = truthful_picks(&view, order)?;
    let outcome = Aftermarket::new(market, start.clone(), config.policy, config.cost)?.run(order)?;

    let budgets: Vec<f64> = (0..n).map(|j| market.budget(j)).collect();
    let costs = outcome.trade_log.costs_by_agent(n);
    let final_cash: Vec<f64> = (0..n)
        .map(|j| budgets[j] + outcome.transfers.get(j) - costs[j])
        .collect();
    let welfare = |alloc: &Allocation, j: AgentId, cash: f64| market.value_of(j, alloc.item(j)) + cash;
    let welfare_baseline: Vec<f64> = (0..n).map(|j| welfare(&baseline, j, budgets[j])).collect();
    let welfare_pretrade: Vec<f64> = (0..n).map(|j| welfare(&start, j, budgets[j])).collect();
    let welfare_treatment: Vec<f64> = (0..n)
        .map(|j| welfare(&outcome.allocation, j, final_cash[j]))
        .collect();
    let deltas: Vec<f64> = (0..n)
        .map(|j| welfare_treatment[j] - welfare_baseline[j])
        .collect();
    let total_welfare_baseline: f64 = welfare_baseline.iter().sum();
    let total_welfare_treatment: f64 = welfare_treatment.iter().sum();
    Ok(SimReport {
        seed,
        n_agents: n,
        trade_count: outcome.trade_log.len(),
        total_welfare_baseline,
        total_welfare_treatment,
        total_gain: total_welfare_treatment - total_welfare_baseline,
        negative_delta_count: deltas.iter().filter(|&&d| d < 0.0).count(),
        total_cost: outcome.trade_log.total_cost(),
        budgets,
        welfare_baseline,
        welfare_pretrade,
        welfare_treatment,
        final_cash,
        deltas,
        trades: outcome.trade_log.records().to_vec(),
    })
}

/// Headline numbers of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepSummary {
    pub seed: u64,
    pub trade_count: usize,
    pub total_welfare_baseline: f64,
    pub total_welfare_treatment: f64,
    pub total_gain: f64,
    pub negative_delta_count: usize,
    pub negative_fraction: f64,
    pub total_cost: f64,
}

/// Equal-width histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn build(xs: &[f64], bins: usize) -> Self {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut counts = vec![0; bins.max(1)];
        if xs.is_empty() {
            return Histogram {
                lo: 0.0,
                hi: 0.0,
                counts,
            };
        }
        let width = (hi - lo) / counts.len() as f64;
        for &x in xs {
            let k = if width > 0.0 {
                (((x - lo) / width) as usize).min(counts.len() - 1)
            } else {
                0
            };
            counts[k] += 1;
        }
        Histogram { lo, hi, counts }
    }
}

/// Aggregate over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub master_seed: u64,
    pub config: SimConfig,
    pub replications: Vec<RepSummary>,
    pub mean_gain: f64,
    pub median_gain: f64,
    pub positive_gain_reps: usize,
    pub negative_delta_fraction: f64,
    pub delta_mean: f64,
    pub delta_skewness: f64,
    pub delta_histogram: Histogram,
}

/// Seed of replication `rep`.
pub fn replication_seed(master_seed: u64, rep: usize) -> u64 {
    derive_seed(master_seed, 1_000 + rep as u64)
}

/// Runs `config.replications` replications, in parallel when `threads` is
/// not 1. Results are ordered by replication index.
pub fn batch_run(
    config: &SimConfig,
    master_seed: u64,
    threads: Option<usize>,
) -> Result<(BatchSummary, Vec<SimReport>)> {
    config.validate()?;
    let run = || -> Result<Vec<SimReport>> {
        (0..config.replications)
            .into_par_iter()
            .map(|rep| run_housing_sim(config, replication_seed(master_seed, rep)))
            .collect()
    };
    let reports = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::arg(format!("cannot build thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    Ok((summarise(config, master_seed, &reports), reports))
}

fn summarise(config: &SimConfig, master_seed: u64, reports: &[SimReport]) -> BatchSummary {
    let gains: Vec<f64> = reports.iter().map(|r| r.total_gain).collect();
    let mut sorted = gains.clone();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let median_gain = if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    };
    let deltas: Vec<f64> = reports.iter().flat_map(|r| r.deltas.iter().copied()).collect();
    let n = deltas.len() as f64;
    let mean = deltas.iter().sum::<f64>() / n;
    let m2 = deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
    let m3 = deltas.iter().map(|d| (d - mean).powi(3)).sum::<f64>() / n;
    BatchSummary {
        master_seed,
        config: config.clone(),
        replications: reports.iter().map(SimReport::summary).collect(),
        mean_gain: gains.iter().sum::<f64>() / k as f64,
        median_gain,
        positive_gain_reps: gains.iter().filter(|&&g| g > 0.0).count(),
        negative_delta_fraction: deltas.iter().filter(|&&d| d < 0.0).count() as f64 / n,
        delta_mean: mean,
        delta_skewness: if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 },
        delta_histogram: Histogram::build(&deltas, 50),
    }
}

/// One row of a transaction-cost sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub tau: f64,
    pub mode: String,
    pub total_gain: f64,
    pub trades: usize,
}

/// Runs one replication per cost level on a shared seed.
pub fn transaction_cost_sweep(
    config: &SimConfig,
    costs: &[TransactionCost],
    seed: u64,
) -> Result<Vec<SweepRow>> {
    config.validate()?;
    for pair in costs.windows(2) {
        if pair[1].level() < pair[0].level() {
            return Err(Error::arg("cost levels must be sorted"));
        }
    }
    let instance = generate_instance(config, seed)?;
    let order = pick_order(config.n_agents, seed);
    costs
        .par_iter()
        .map(|cost| {
            cost.validate()?;
            let cfg = SimConfig {
                cost: *cost,
                ..config.clone()
            };
            let r = run_on_instance(&cfg, &instance, &order, seed)?;
            Ok(SweepRow {
                tau: cost.level(),
                mode: match cost {
                    TransactionCost::None => "none",
                    TransactionCost::Fixed(_) => "fixed",
                    TransactionCost::Proportional(_) => "prop",
                }
                .to_string(),
                total_gain: r.total_gain,
                trades: r.trade_count,
            })
        })
        .collect()
}

/// A fixed cost above this stops every trade: it exceeds every budget plus
/// every value.
pub fn prohibitive_cost_bound<M: Market + ?Sized>(market: &M) -> f64 {
    let max_budget = (0..market.n_agents())
        .map(|j| market.budget(j))
        .fold(0.0f64, f64::max);
    let max_value = (0..market.n_agents())
        .into_par_iter()
        .map(|j| {
            (0..market.n_items())
                .map(|i| market.value(j, i))
                .fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    max_budget + max_value
}

/// Checks that a fixed cost `tau` leaves the trade decision between buyer
/// `j` (holding `a(j)`, wanting `a(k)`) and seller `k` unchanged however it
/// is split. For each buyer share `c` the buyer pays at most
/// `v_j(a(k)) − v_j(a(j)) − c` and the seller needs at least
/// `v_k(a(k)) − v_k(a(j)) + τ − c`.
pub fn tax_incidence_check<M: Market + ?Sized>(
    market: &M,
    allocation: &Allocation,
    j: AgentId,
    k: AgentId,
    tau: f64,
    splits: &[f64],
) -> Result<bool> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::arg("tau must be finite and ≥ 0"));
    }
    if splits.iter().any(|&c| !(0.0..=tau).contains(&c)) {
        return Err(Error::arg("splits must lie in [0, tau]"));
    }
    let (_, surplus) = trade_feasible(market, allocation, j, k)?;
    let (ij, ik) = (allocation.item(j), allocation.item(k));
    let split_free = surplus.0 - tau > 0.0;
    Ok(splits.iter().all(|&c| {
        let buyer_max = market.value_of(j, ik) - market.value_of(j, ij) - c;
        let seller_min = market.value_of(k, ik) - market.value_of(k, ij) + (tau - c);
        (buyer_max > seller_min) == split_free
    }))
}

/// Cost level below which trading is unaffected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallTauBound {
    /// `+∞` when no trade is feasible.
    pub gamma: f64,
    pub any_feasible: bool,
}

/// Smallest trade surplus that matters from `allocation`: over every
/// feasible pair at the allocation and every trade the cost-free
/// fixed-point aftermarket executes from it (proposers in `order`, sellers
/// paid their reservation value). A fixed cost below it changes no trade.
pub fn small_tau_bound<M: Market + ?Sized>(
    market: &M,
    allocation: &Allocation,
    order: &PickOrder,
) -> Result<SmallTauBound> {
    let n = market.n_agents();
    let mut gamma = f64::INFINITY;
    for j in 0..n {
        for k in (j + 1)..n {
            if allocation.item(j).is_none() || allocation.item(k).is_none() {
                continue;
            }
            let (ok, s) = trade_feasible(market, allocation, j, k)?;
            if ok {
                gamma = gamma.min(s.0);
            }
        }
    }
    let run = Aftermarket::new(
        market,
        allocation.clone(),
        TradePolicy::at_reservation(),
        TransactionCost::None,
    )?
    .run(order)?;
    let mut current = allocation.clone();
    for r in run.trade_log.iter() {
        let (_, s) = trade_feasible(market, &current, r.proposer, r.counterparty)?;
        gamma = gamma.min(s.0);
        current.swap(r.proposer, r.counterparty);
    }
    Ok(SmallTauBound {
        gamma,
        any_feasible: gamma.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::MarketInstance;
    use crate::scenarios;

    #[test]
    fn values_are_deterministic_and_in_range() {
        let a = RoomModel::generate(50, 11);
        let b = RoomModel::generate(50, 11);
        assert_eq!(a, b);
        for (j, i) in [(0, 0), (3, 17), (49, 49)] {
            assert_eq!(a.private_value(j, i), b.private_value(j, i));
        }
        assert!(a.mean.iter().all(|&m| (100.0..=10_000.0).contains(&m)));
        assert!(a.variance.iter().all(|&v| (500.0..=1000.0).contains(&v)));
        assert_ne!(a.private_value(0, 1), a.private_value(1, 0));
    }

    #[test]
    fn power_law_budgets() {
        let w: WealthModel = "powerlaw:1000,1.01,10".parse().unwrap();
        let b = w.budgets(10_000);
        assert!((b[9_999] / 1.01f64.powf(999.0) - 1.0).abs() < 1e-12);
        assert_eq!(b[0], 1.0);
        assert_eq!(b[10], 1.01);
        assert!(w.validate(10_000).is_ok());
        assert!(w.validate(9_999).is_err());
        assert!("equal:-3".parse::<WealthModel>().unwrap().validate(2).is_err());
    }

    #[test]
    fn public_and_augmented_values() {
        let m = MarketInstance::from_rows(vec![vec![5.0, 1.0], vec![4.0, 3.0]]).unwrap();
        let public = public_valuations(&m, &PickOrder::identity(2)).unwrap();
        assert_eq!(public, vec![5.0, 3.0]);
        assert_eq!(augmented_value(10.0, 4.0), 10.0);
        assert_eq!(augmented_value(10.0, 30.0), 20.0);
        assert_eq!(augmented_value(7.0, 7.0), 7.0);
        let view = AugmentedView::new(&m, public).unwrap();
        assert_eq!(view.value(1, 0), 4.5);
    }

    #[test]
    fn small_run_accounts_for_money() {
        let mut cfg = SimConfig::new(60);
        cfg.cost = TransactionCost::Fixed(5.0);
        let r = run_housing_sim(&cfg, 3).unwrap();
        assert!(r.money_imbalance() < 1e-12);
        assert_eq!(r, run_housing_sim(&cfg, 3).unwrap());
        assert!(r.final_cash.iter().all(|&c| c >= 0.0));
        for t in &r.trades {
            assert!(t.price >= 0.0);
        }
    }

    #[test]
    fn identical_preferences_do_not_trade() {
        let row: Vec<f64> = (0..8).map(|i| 100.0 + 7.0 * i as f64).collect();
        let m = MarketInstance::new(vec![row; 8], vec![1000.0; 8]).unwrap();
        let order = PickOrder::random(8, 4);
        let r = run_on_instance(&SimConfig::new(8), &m, &order, 0).unwrap();
        assert_eq!(r.trade_count, 0);
        assert_eq!(r.total_gain, 0.0);
    }

    #[test]
    fn tax_incidence_examples() {
        let m = scenarios::two_agent_swap();
        let a = Allocation::from_assigned(&[0, 1]);
        for (tau, trade) in [(7.9, true), (8.1, false), (0.0, true)] {
            assert!(tax_incidence_check(&m, &a, 1, 0, tau, &[0.0, tau / 2.0, tau]).unwrap());
            let (_, s) = trade_feasible(&m, &a, 1, 0).unwrap();
            assert_eq!(s.0 - tau > 0.0, trade);
        }
        assert!(tax_incidence_check(&m, &a, 1, 0, 1.0, &[2.0]).is_err());
    }

    #[test]
    fn small_tau_examples() {
        let m = scenarios::two_agent_swap();
        let b = small_tau_bound(&m, &Allocation::from_assigned(&[0, 1]), &PickOrder::identity(2))
            .unwrap();
        assert_eq!(b.gamma, 8.0);
        let m = scenarios::stable_but_inefficient();
        let b = small_tau_bound(
            &m,
            &Allocation::from_assigned(&[2, 0, 1]),
            &PickOrder::new(vec![0, 2, 1], 3).unwrap(),
        )
        .unwrap();
        assert!(!b.any_feasible && b.gamma == f64::INFINITY);
    }

    #[test]
    fn histogram_counts_everything() {
        let h = Histogram::build(&[0.0, 1.0, 2.0, 2.0], 2);
        assert_eq!(h.counts, vec![1, 3]);
        assert_eq!(Histogram::build(&[1.0, 1.0], 3).counts, vec![2, 0, 0]);
    }
}
