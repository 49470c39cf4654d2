//! Shared domain types: market instances, allocations, transfer profiles,
//! trade logs and welfare accounting.
//!
//! Utilities are quasilinear: agent `j` holding item `i` with transfer `t`
//! gets `v_j(i) + d_j + t`, where `d_j` is the starting budget. The null
//! item is implicit and every agent values it at exactly zero.

use std::fmt;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense 0-based agent index.
pub type AgentId = usize;
/// Dense 0-based item index.
pub type ItemId = usize;

/// Read access to an economy: who values what, and who holds how much money.
///
/// Implemented by the dense [`MarketInstance`] and by the on-demand
/// generated housing instances of the simulation module.
pub trait Market: Sync {
    fn n_agents(&self) -> usize;
    fn n_items(&self) -> usize;
    fn value(&self, agent: AgentId, item: ItemId) -> f64;
    fn budget(&self, agent: AgentId) -> f64;

    /// Value of an item or of the null item.
    fn value_of(&self, agent: AgentId, item: Option<ItemId>) -> f64 {
        item.map_or(0.0, |i| self.value(agent, i))
    }

    /// Comparison tolerance used when checking sums and inequalities.
    fn mode(&self) -> NumericMode {
        NumericMode::Real
    }
}

impl<M: Market + ?Sized> Market for &M {
    fn n_agents(&self) -> usize {
        (**self).n_agents()
    }
    fn n_items(&self) -> usize {
        (**self).n_items()
    }
    fn value(&self, agent: AgentId, item: ItemId) -> f64 {
        (**self).value(agent, item)
    }
    fn budget(&self, agent: AgentId) -> f64 {
        (**self).budget(agent)
    }
    fn mode(&self) -> NumericMode {
        (**self).mode()
    }
}

/// Integer mode requires integral utilities and dollars and compares
/// exactly; real mode compares with a small absolute tolerance.
///
/// Both modes store `f64`. Integers below 2^53 and their dyadic fractions
/// (the surplus splits used by the mechanisms) are represented exactly, so
/// integer-mode arithmetic is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    Integer,
    #[default]
    Real,
}

impl NumericMode {
    /// Absolute tolerance for a single comparison.
    pub fn tolerance(self) -> f64 {
        match self {
            NumericMode::Integer => 0.0,
            NumericMode::Real => 1e-9,
        }
    }

    /// Tolerance on the sum of a transfer profile over `n_agents` agents.
    pub fn transfer_sum_tolerance(self, n_agents: usize) -> f64 {
        self.tolerance() * n_agents.max(1) as f64
    }
}

/// A dense economy: valuation matrix (agents × items) plus budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct MarketInstance {
    n_agents: usize,
    n_items: usize,
    values: Vec<f64>,
    budgets: Vec<f64>,
    mode: NumericMode,
}

/// On-disk JSON layout of an instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n_agents: usize,
    n_items: usize,
    valuations: Vec<Vec<f64>>,
    budgets: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    numeric_mode: Option<NumericMode>,
}

impl TryFrom<InstanceFile> for MarketInstance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        if file.valuations.len() != file.n_agents {
            return Err(Error::arg(format!(
                "valuations has {} rows, n_agents is {}",
                file.valuations.len(),
                file.n_agents
            )));
        }
        if let Some(row) = file.valuations.iter().find(|r| r.len() != file.n_items) {
            return Err(Error::arg(format!(
                "valuation row has {} entries, n_items is {}",
                row.len(),
                file.n_items
            )));
        }
        let instance = MarketInstance::new(file.valuations, file.budgets)?;
        match file.numeric_mode {
            Some(mode) => instance.with_mode(mode),
            None => Ok(instance),
        }
    }
}

impl From<MarketInstance> for InstanceFile {
    fn from(instance: MarketInstance) -> Self {
        InstanceFile {
            n_agents: instance.n_agents,
            n_items: instance.n_items,
            valuations: instance.rows(),
            budgets: instance.budgets.clone(),
            numeric_mode: Some(instance.mode),
        }
    }
}

impl MarketInstance {
    /// Builds an instance from valuation rows (one per agent) and budgets.
    ///
    /// The numeric mode is [`NumericMode::Integer`] when every entry is
    /// integral and [`NumericMode::Real`] otherwise.
    pub fn new(valuations: Vec<Vec<f64>>, budgets: Vec<f64>) -> Result<Self> {
        let n_agents = valuations.len();
        let n_items = valuations.first().map_or(0, Vec::len);
        if valuations.iter().any(|r| r.len() != n_items) {
            return Err(Error::arg("valuation rows have different lengths"));
        }
        if budgets.len() != n_agents {
            return Err(Error::arg(format!(
                "budgets has {} entries, expected {n_agents}",
                budgets.len()
            )));
        }
        let values: Vec<f64> = valuations.into_iter().flatten().collect();
        if let Some(v) = values.iter().chain(&budgets).find(|v| !v.is_finite()) {
            return Err(Error::arg(format!("non-finite entry {v}")));
        }
        let integral = values.iter().chain(&budgets).all(|v| v.fract() == 0.0);
        Ok(MarketInstance {
            n_agents,
            n_items,
            values,
            budgets,
            mode: if integral {
                NumericMode::Integer
            } else {
                NumericMode::Real
            },
        })
    }

    /// Instance with every budget set to zero.
    pub fn from_rows(valuations: Vec<Vec<f64>>) -> Result<Self> {
        let n = valuations.len();
        Self::new(valuations, vec![0.0; n])
    }

    /// Convenience constructor for integer tables.
    pub fn from_int_rows(valuations: &[&[i64]], budgets: &[i64]) -> Result<Self> {
        Self::new(
            valuations
                .iter()
                .map(|r| r.iter().map(|&v| v as f64).collect())
                .collect(),
            budgets.iter().map(|&b| b as f64).collect(),
        )
    }

    pub fn with_mode(mut self, mode: NumericMode) -> Result<Self> {
        if mode == NumericMode::Integer
            && self
                .values
                .iter()
                .chain(&self.budgets)
                .any(|v| v.fract() != 0.0)
        {
            return Err(Error::arg("integer mode requires integral entries"));
        }
        self.mode = mode;
        Ok(self)
    }

    pub fn with_budgets(mut self, budgets: Vec<f64>) -> Result<Self> {
        if budgets.len() != self.n_agents || budgets.iter().any(|b| !b.is_finite()) {
            return Err(Error::arg("budgets must be finite with one entry per agent"));
        }
        self.budgets = budgets;
        Ok(self)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        if self.n_items == 0 {
            return vec![Vec::new(); self.n_agents];
        }
        self.values.chunks(self.n_items).map(<[f64]>::to_vec).collect()
    }

    pub fn row(&self, agent: AgentId) -> &[f64] {
        &self.values[agent * self.n_items..(agent + 1) * self.n_items]
    }

    pub fn budgets(&self) -> &[f64] {
        &self.budgets
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes the valuation matrix as `agent,item,value` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["agent", "item", "value"])?;
        for agent in 0..self.n_agents {
            for item in 0..self.n_items {
                writer.serialize((agent, item, self.value(agent, item)))?;
            }
        }
        writer.flush()?;
        Ok(())
    }
}

impl Market for MarketInstance {
    fn n_agents(&self) -> usize {
        self.n_agents
    }
    fn n_items(&self) -> usize {
        self.n_items
    }
    fn value(&self, agent: AgentId, item: ItemId) -> f64 {
        self.values[agent * self.n_items + item]
    }
    fn budget(&self, agent: AgentId) -> f64 {
        self.budgets[agent]
    }
    fn mode(&self) -> NumericMode {
        self.mode
    }
}

/// Assignment of agents to items (or to the null item).
///
/// Also used for endowments, which are allocations in a different role.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation(Vec<Option<ItemId>>);

impl Allocation {
    /// Every agent holds the null item.
    pub fn empty(n_agents: usize) -> Self {
        Allocation(vec![None; n_agents])
    }

    pub fn from_items(items: Vec<Option<ItemId>>) -> Self {
        Allocation(items)
    }

    /// Full assignment, agent `j` holding `items[j]`.
    pub fn from_assigned(items: &[ItemId]) -> Self {
        Allocation(items.iter().copied().map(Some).collect())
    }

    pub fn n_agents(&self) -> usize {
        self.0.len()
    }

    pub fn item(&self, agent: AgentId) -> Option<ItemId> {
        self.0[agent]
    }

    pub fn set(&mut self, agent: AgentId, item: Option<ItemId>) {
        self.0[agent] = item;
    }

    /// Exchanges the holdings of two agents.
    pub fn swap(&mut self, a: AgentId, b: AgentId) {
        self.0.swap(a, b);
    }

    pub fn as_slice(&self) -> &[Option<ItemId>] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (AgentId, Option<ItemId>)> + '_ {
        self.0.iter().copied().enumerate()
    }

    /// Item → holder map. Assumes the allocation is valid for `n_items`.
    pub fn owners(&self, n_items: usize) -> Vec<Option<AgentId>> {
        let mut owners = vec![None; n_items];
        for (agent, item) in self.iter() {
            if let Some(i) = item {
                owners[i] = Some(agent);
            }
        }
        owners
    }

    /// Sorted list of the non-null items held.
    pub fn assigned_items(&self) -> Vec<ItemId> {
        let mut items: Vec<ItemId> = self.0.iter().flatten().copied().collect();
        items.sort_unstable();
        items
    }

    /// Structural problems with respect to an item universe of `n_items`.
    pub fn violations(&self, n_items: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut holder: Vec<Option<AgentId>> = vec![None; n_items];
        for (agent, item) in self.iter() {
            let Some(item) = item else { continue };
            if item >= n_items {
                out.push(Violation::ItemOutOfRange { agent, item });
                continue;
            }
            match holder[item] {
                Some(first) => out.push(Violation::NotInjective {
                    item,
                    agents: (first, agent),
                }),
                None => holder[item] = Some(agent),
            }
        }
        out
    }

    pub fn is_valid(&self, n_items: usize) -> bool {
        self.violations(n_items).is_empty()
    }
}

/// Money moved between agents. Entries sum to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransferProfile(Vec<f64>);

impl TransferProfile {
    pub fn zeros(n_agents: usize) -> Self {
        TransferProfile(vec![0.0; n_agents])
    }

    pub fn from_vec(transfers: Vec<f64>) -> Self {
        TransferProfile(transfers)
    }

    pub fn get(&self, agent: AgentId) -> f64 {
        self.0[agent]
    }

    pub fn add(&mut self, agent: AgentId, delta: f64) {
        self.0[agent] += delta;
    }

    /// Moves `amount` from `payer` to `payee`.
    pub fn pay(&mut self, payer: AgentId, payee: AgentId, amount: f64) {
        self.0[payer] -= amount;
        self.0[payee] += amount;
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// One executed swap-with-payment.
///
/// The proposer hands over `proposer_gave`, receives `proposer_got` and pays
/// `price` to the counterparty (negative prices flow the other way). The
/// counterparty is the seller and bears the transaction cost `cost`, which
/// leaves the economy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub proposer: AgentId,
    pub counterparty: AgentId,
    pub proposer_gave: Option<ItemId>,
    pub proposer_got: Option<ItemId>,
    pub price: f64,
    pub cost: f64,
}

/// Ordered record of executed trades.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TradeLog(Vec<TradeRecord>);

impl TradeLog {
    pub fn new() -> Self {
        TradeLog(Vec::new())
    }

    pub fn push(&mut self, record: TradeRecord) {
        self.0.push(record);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn records(&self) -> &[TradeRecord] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TradeRecord> {
        self.0.iter()
    }

    /// Total transaction cost borne by each agent.
    pub fn costs_by_agent(&self, n_agents: usize) -> Vec<f64> {
        let mut costs = vec![0.0; n_agents];
        for r in &self.0 {
            costs[r.counterparty] += r.cost;
        }
        costs
    }

    pub fn total_cost(&self) -> f64 {
        self.0.iter().map(|r| r.cost).sum()
    }

    /// Applies the log to `start`, returning the final allocation and the
    /// transfers it implies. Fails if a record does not match the holdings
    /// at the time it is replayed.
    pub fn replay(&self, start: &Allocation) -> Result<(Allocation, TransferProfile)> {
        let n = start.n_agents();
        let mut alloc = start.clone();
        let mut transfers = TransferProfile::zeros(n);
        for (step, r) in self.0.iter().enumerate() {
            if r.proposer >= n || r.counterparty >= n || r.proposer == r.counterparty {
                return Err(Error::arg(format!("trade {step}: bad parties")));
            }
            if alloc.item(r.proposer) != r.proposer_gave
                || alloc.item(r.counterparty) != r.proposer_got
            {
                return Err(Error::arg(format!(
                    "trade {step}: holdings do not match the record"
                )));
            }
            alloc.swap(r.proposer, r.counterparty);
            transfers.pay(r.proposer, r.counterparty, r.price);
        }
        Ok((alloc, transfers))
    }
}

impl<'a> IntoIterator for &'a TradeLog {
    type Item = &'a TradeRecord;
    type IntoIter = std::slice::Iter<'a, TradeRecord>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// What every mechanism returns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub allocation: Allocation,
    pub transfers: TransferProfile,
    pub trade_log: TradeLog,
    /// Holdings before the logged trades. Replaying `trade_log` from here
    /// must reproduce `allocation` and `transfers`. `None` when the final
    /// allocation comes from market clearing rather than logged trades.
    pub pre_trade: Option<Allocation>,
}

impl Outcome {
    /// Outcome without transfers or trades.
    pub fn untraded(allocation: Allocation) -> Self {
        let n = allocation.n_agents();
        Outcome {
            pre_trade: Some(allocation.clone()),
            allocation,
            transfers: TransferProfile::zeros(n),
            trade_log: TradeLog::new(),
        }
    }

    /// `pre_trade` with `trade_log` applied.
    pub fn from_trades(pre_trade: Allocation, trade_log: TradeLog) -> Result<Self> {
        let (allocation, transfers) = trade_log.replay(&pre_trade)?;
        Ok(Outcome {
            allocation,
            transfers,
            trade_log,
            pre_trade: Some(pre_trade),
        })
    }
}

/// Quasilinear utility of `agent`: item value plus budget plus transfer,
/// minus any transaction cost the agent bore.
pub fn utility<M: Market + ?Sized>(market: &M, outcome: &Outcome, agent: AgentId) -> Result<f64> {
    if agent >= market.n_agents() || agent >= outcome.allocation.n_agents() {
        return Err(Error::arg(format!("agent {agent} out of range")));
    }
    let cost: f64 = outcome
        .trade_log
        .iter()
        .filter(|r| r.counterparty == agent)
        .map(|r| r.cost)
        .sum();
    Ok(market.value_of(agent, outcome.allocation.item(agent))
        + market.budget(agent)
        + outcome.transfers.get(agent)
        - cost)
}

/// Utilities of every agent.
pub fn utilities<M: Market + ?Sized>(market: &M, outcome: &Outcome) -> Vec<f64> {
    let costs = outcome.trade_log.costs_by_agent(market.n_agents());
    (0..market.n_agents())
        .map(|j| {
            market.value_of(j, outcome.allocation.item(j)) + market.budget(j)
                + outcome.transfers.get(j)
                - costs[j]
        })
        .collect()
}

/// Sum of item values. Transfers cancel, so welfare depends on the
/// allocation alone.
pub fn total_welfare<M: Market + ?Sized>(market: &M, allocation: &Allocation) -> f64 {
    allocation
        .iter()
        .map(|(agent, item)| market.value_of(agent, item))
        .sum()
}

/// Everything that can be wrong with an outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    AgentCountMismatch { expected: usize, actual: usize },
    ItemOutOfRange { agent: AgentId, item: ItemId },
    NotInjective { item: ItemId, agents: (AgentId, AgentId) },
    TransferSumNonzero { sum: f64 },
    NonFiniteTransfer { agent: AgentId },
    BadTradeRecord { step: usize },
    ReplayMismatch { detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AgentCountMismatch { expected, actual } => {
                write!(f, "outcome covers {actual} agents, instance has {expected}")
            }
            Violation::ItemOutOfRange { agent, item } => {
                write!(f, "agent {agent} holds out-of-range item {item}")
            }
            Violation::NotInjective { item, agents } => write!(
                f,
                "allocation not injective: item {item} held by agents {} and {}",
                agents.0, agents.1
            ),
            Violation::TransferSumNonzero { sum } => write!(f, "transfer sum ≠ 0 (sum = {sum})"),
            Violation::NonFiniteTransfer { agent } => {
                write!(f, "agent {agent} has a non-finite transfer")
            }
            Violation::BadTradeRecord { step } => {
                write!(f, "trade {step} has a non-finite price or a negative cost")
            }
            Violation::ReplayMismatch { detail } => write!(f, "trade log replay mismatch: {detail}"),
        }
    }
}

/// Checks an outcome against the instance. Violations are data, not errors.
pub fn validate_outcome<M: Market + ?Sized>(market: &M, outcome: &Outcome) -> Vec<Violation> {
    let n = market.n_agents();
    let mut out = Vec::new();
    if outcome.allocation.n_agents() != n || outcome.transfers.as_slice().len() != n {
        out.push(Violation::AgentCountMismatch {
            expected: n,
            actual: outcome.allocation.n_agents(),
        });
        return out;
    }
    out.extend(outcome.allocation.violations(market.n_items()));
    for (agent, t) in outcome.transfers.as_slice().iter().enumerate() {
        if !t.is_finite() {
            out.push(Violation::NonFiniteTransfer { agent });
        }
    }
    let sum = outcome.transfers.sum();
    if sum.abs() > market.mode().transfer_sum_tolerance(n) {
        out.push(Violation::TransferSumNonzero { sum });
    }
    for (step, r) in outcome.trade_log.iter().enumerate() {
        if !r.price.is_finite() || r.cost.is_nan() || r.cost < 0.0 {
            out.push(Violation::BadTradeRecord { step });
        }
    }
    if let Some(start) = &outcome.pre_trade {
        match outcome.trade_log.replay(start) {
            Err(e) => out.push(Violation::ReplayMismatch {
                detail: e.to_string(),
            }),
            Ok((alloc, transfers)) => {
                if alloc != outcome.allocation {
                    out.push(Violation::ReplayMismatch {
                        detail: "final allocation differs".into(),
                    });
                }
                let tol = market.mode().transfer_sum_tolerance(n);
                let drift = transfers
                    .as_slice()
                    .iter()
                    .zip(outcome.transfers.as_slice())
                    .any(|(a, b)| (a - b).abs() > tol);
                if drift {
                    out.push(Violation::ReplayMismatch {
                        detail: "final transfers differ".into(),
                    });
                }
            }
        }
    } else if !outcome.trade_log.is_empty() {
        out.push(Violation::ReplayMismatch {
            detail: "trade log without a pre-trade allocation".into(),
        });
    }
    out
}

/// `a` Pareto-dominates `b`: nobody is worse off and somebody is strictly
/// better off.
pub fn pareto_dominates<M: Market + ?Sized>(market: &M, a: &Outcome, b: &Outcome) -> bool {
    let tol = market.mode().tolerance();
    let ua = utilities(market, a);
    let ub = utilities(market, b);
    let mut strict = false;
    for (x, y) in ua.iter().zip(&ub) {
        if *x < y - tol {
            return false;
        }
        if *x > y + tol {
            strict = true;
        }
    }
    strict
}

/// A permutation of the agents: the order in which they pick.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PickOrder(Vec<AgentId>);

impl PickOrder {
    pub fn new(order: Vec<AgentId>, n_agents: usize) -> Result<Self> {
        if order.len() != n_agents {
            return Err(Error::arg(format!(
                "pick order has {} entries, expected {n_agents}",
                order.len()
            )));
        }
        let mut seen = vec![false; n_agents];
        for &a in &order {
            if a >= n_agents || std::mem::replace(&mut seen[a], true) {
                return Err(Error::arg(format!("pick order is not a permutation at {a}")));
            }
        }
        Ok(PickOrder(order))
    }

    pub fn identity(n_agents: usize) -> Self {
        PickOrder((0..n_agents).collect())
    }

    /// Uniformly random order drawn from a seeded generator.
    pub fn random(n_agents: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(n_agents, &mut rng)
    }

    pub fn random_with<R: rand::Rng + ?Sized>(n_agents: usize, rng: &mut R) -> Self {
        let mut order: Vec<AgentId> = (0..n_agents).collect();
        order.shuffle(rng);
        PickOrder(order)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[AgentId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.0.iter().copied()
    }

    /// position[agent] = index of the agent in the order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (k, &a) in self.0.iter().enumerate() {
            pos[a] = k;
        }
        pos
    }
}
