//! Allocation mechanisms.
//!
//! Every mechanism starts from serial dictatorship picks and returns an
//! [`Outcome`]. Trades are swaps-with-payment between a buyer (the proposer)
//! and a seller; see [`quote`] for how a price is set.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{ce_prices, optimal_assignment, PriceVector};
use crate::error::{Error, Result};
use crate::market::{
    AgentId, Allocation, ItemId, Market, Outcome, PickOrder, TradeLog, TradeRecord,
    TransferProfile,
};
use crate::scenarios;

/// How the aftermarket schedules proposals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PairwiseMode {
    /// Proposers sweep in pick order until a full sweep executes no trade.
    #[default]
    FixedPoint,
    /// Each agent may buy once, on its own turn, from anyone who has not
    /// bought yet. A buyer never trades again.
    SinglePassBuyerExit,
}

impl FromStr for PairwiseMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-point" => Ok(PairwiseMode::FixedPoint),
            "single-pass" | "single-pass-buyer-exit" => Ok(PairwiseMode::SinglePassBuyerExit),
            other => Err(Error::arg(format!("unknown pairwise mode '{other}'"))),
        }
    }
}

/// How agents behave in the interim mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AgentModel {
    /// Pick the best available item, then offer the best trade to an earlier
    /// agent.
    #[default]
    Myopic,
    /// Also consider picking an item an earlier agent likes, as bait for a
    /// swap.
    LookbackStrategic,
}

impl FromStr for AgentModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "myopic" => Ok(AgentModel::Myopic),
            "lookback" | "lookback-strategic" => Ok(AgentModel::LookbackStrategic),
            other => Err(Error::arg(format!("unknown agent model '{other}'"))),
        }
    }
}

/// Trade pricing and scheduling rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradePolicy {
    /// Share of the surplus that goes to the seller, in `[0, 1]`.
    pub surplus_split: f64,
    /// Sellers never accept a negative price.
    pub seller_floor: bool,
    pub mode: PairwiseMode,
    /// Buyers must be able to pay, and sellers must be able to cover their
    /// transaction cost, from budget plus cash received so far.
    pub budget_enforced: bool,
}

impl Default for TradePolicy {
    fn default() -> Self {
        TradePolicy {
            surplus_split: 0.5,
            seller_floor: true,
            mode: PairwiseMode::FixedPoint,
            budget_enforced: false,
        }
    }
}

impl TradePolicy {
    pub fn new(
        surplus_split: f64,
        seller_floor: bool,
        mode: PairwiseMode,
        budget_enforced: bool,
    ) -> Result<Self> {
        let policy = TradePolicy {
            surplus_split,
            seller_floor,
            mode,
            budget_enforced,
        };
        policy.validate()?;
        Ok(policy)
    }

    /// Seller sells at its reservation value: the buyer keeps all surplus.
    pub fn at_reservation() -> Self {
        TradePolicy {
            surplus_split: 0.0,
            seller_floor: false,
            mode: PairwiseMode::FixedPoint,
            budget_enforced: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.surplus_split) {
            return Err(Error::arg(format!(
                "surplus split must lie in [0, 1], got {}",
                self.surplus_split
            )));
        }
        Ok(())
    }
}

/// Seller-side transaction cost charged on every executed trade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum TransactionCost {
    #[default]
    None,
    /// Flat amount per trade.
    Fixed(f64),
    /// Fraction of the absolute price. Rates of 1 or more make every
    /// trade unprofitable for the seller and are treated as prohibitive.
    Proportional(f64),
}

impl TransactionCost {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TransactionCost::None => Ok(()),
            TransactionCost::Fixed(x) | TransactionCost::Proportional(x) => {
                if x.is_finite() && x >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::arg(format!("transaction cost must be finite and ≥ 0, got {x}")))
                }
            }
        }
    }

    /// Lowest price at which a seller whose value drops by `loss` still
    /// gains. `None` when no price works.
    pub fn seller_minimum(&self, loss: f64, floor: bool) -> Option<f64> {
        let m = match *self {
            TransactionCost::None => loss,
            TransactionCost::Fixed(tau) => loss + tau,
            TransactionCost::Proportional(rate) => {
                if rate >= 1.0 {
                    return None;
                }
                if loss >= 0.0 {
                    loss / (1.0 - rate)
                } else {
                    loss / (1.0 + rate)
                }
            }
        };
        Some(if floor { m.max(0.0) } else { m })
    }

    /// Cost the seller pays on a trade at `price`.
    pub fn charge(&self, price: f64) -> f64 {
        match *self {
            TransactionCost::None => 0.0,
            TransactionCost::Fixed(tau) => tau,
            TransactionCost::Proportional(rate) => rate * price.abs(),
        }
    }

    /// Cost level: the flat amount or the rate.
    pub fn level(&self) -> f64 {
        match *self {
            TransactionCost::None => 0.0,
            TransactionCost::Fixed(x) | TransactionCost::Proportional(x) => x,
        }
    }
}

impl fmt::Display for TransactionCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransactionCost::None => write!(f, "none"),
            TransactionCost::Fixed(x) => write!(f, "fixed:{x}"),
            TransactionCost::Proportional(x) => write!(f, "prop:{x}"),
        }
    }
}

impl FromStr for TransactionCost {
    type Err = Error;
    /// Parses `none`, `fixed:X` or `prop:R`.
    fn from_str(s: &str) -> Result<Self> {
        let cost = match s.split_once(':') {
            None if s == "none" => TransactionCost::None,
            Some(("fixed", x)) => TransactionCost::Fixed(parse_level(x)?),
            Some(("prop" | "proportional", x)) => TransactionCost::Proportional(parse_level(x)?),
            _ => return Err(Error::arg(format!("cannot parse transaction cost '{s}'"))),
        };
        cost.validate()?;
        Ok(cost)
    }
}

fn parse_level(x: &str) -> Result<f64> {
    x.trim()
        .parse::<f64>()
        .map_err(|_| Error::arg(format!("bad cost level '{x}'")))
}

/// Terms of a candidate trade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    /// Buyer's value gain `c`.
    pub buyer_gain: f64,
    /// Seller's minimum acceptable price `m`.
    pub seller_minimum: f64,
    pub price: f64,
    pub cost: f64,
}

impl Quote {
    /// Surplus left after the seller is compensated: `c − m`.
    pub fn surplus(&self) -> f64 {
        self.buyer_gain - self.seller_minimum
    }
}

/// Prices a swap in which `buyer` gives `buyer_item` for `seller_item`.
///
/// The buyer would pay up to `c = v_b(seller_item) − v_b(buyer_item)`. The
/// seller needs a price `m` that covers its value loss and cost, at least 0
/// under the floor. A trade exists iff `c > m`, at price `m + λ(c − m)`.
pub fn quote<M: Market + ?Sized>(
    market: &M,
    policy: &TradePolicy,
    cost: &TransactionCost,
    buyer: AgentId,
    buyer_item: Option<ItemId>,
    seller: AgentId,
    seller_item: Option<ItemId>,
) -> Option<Quote> {
    let c = market.value_of(buyer, seller_item) - market.value_of(buyer, buyer_item);
    if policy.seller_floor && c <= 0.0 {
        return None;
    }
    let loss = market.value_of(seller, seller_item) - market.value_of(seller, buyer_item);
    let m = cost.seller_minimum(loss, policy.seller_floor)?;
    if c <= m {
        return None;
    }
    let price = m + policy.surplus_split * (c - m);
    Some(Quote {
        buyer_gain: c,
        seller_minimum: m,
        price,
        cost: cost.charge(price),
    })
}

/// Argmax of `agent`'s value over available items; ties to the lowest id.
fn best_item<M: Market + ?Sized>(market: &M, agent: AgentId, available: &[bool]) -> Option<ItemId> {
    let mut best: Option<(ItemId, f64)> = None;
    for (item, _) in available.iter().enumerate().filter(|(_, &a)| a) {
        let v = market.value(agent, item);
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((item, v));
        }
    }
    best.map(|(i, _)| i)
}

fn check_order<M: Market + ?Sized>(market: &M, order: &PickOrder) -> Result<()> {
    if order.len() != market.n_agents() {
        return Err(Error::arg(format!(
            "pick order has {} agents, instance has {}",
            order.len(),
            market.n_agents()
        )));
    }
    Ok(())
}

/// Allocation produced by truthful picks in `order`. Agents left without
/// an item get the null item.
pub fn truthful_picks<M: Market + ?Sized>(market: &M, order: &PickOrder) -> Result<Allocation> {
    check_order(market, order)?;
    let mut available = vec![true; market.n_items()];
    let mut alloc = Allocation::empty(market.n_agents());
    for agent in order.iter() {
        if let Some(item) = best_item(market, agent, &available) {
            available[item] = false;
            alloc.set(agent, Some(item));
        }
    }
    Ok(alloc)
}

/// Serial dictatorship without transfers.
pub fn serial_dictatorship<M: Market + ?Sized>(market: &M, order: &PickOrder) -> Result<Outcome> {
    Ok(Outcome::untraded(truthful_picks(market, order)?))
}

/// Random serial dictatorship: serial dictatorship in a seeded uniformly
/// random order. Returns the order drawn as well.
pub fn rsd<M: Market + ?Sized>(market: &M, seed: u64) -> Result<(PickOrder, Outcome)> {
    let order = PickOrder::random(market.n_agents(), seed);
    let outcome = serial_dictatorship(market, &order)?;
    Ok((order, outcome))
}

/// Top trading cycles from `endowment`. Agents without an item keep
/// nothing.
pub fn ttc<M: Market + ?Sized>(market: &M, endowment: &Allocation) -> Result<Allocation> {
    let (n, m) = (market.n_agents(), market.n_items());
    if endowment.n_agents() != n || !endowment.is_valid(m) {
        return Err(Error::arg("endowment is not a valid allocation for this instance"));
    }
    let owner = endowment.owners(m);
    let mut remaining: Vec<bool> = owner.iter().map(Option::is_some).collect();
    let mut active: Vec<AgentId> = endowment
        .iter()
        .filter(|(_, i)| i.is_some())
        .map(|(a, _)| a)
        .collect();
    let mut result = Allocation::empty(n);
    while !active.is_empty() {
        let mut points_to = vec![usize::MAX; n];
        let mut favourite = vec![usize::MAX; n];
        for &a in &active {
            let item = best_item(market, a, &remaining).ok_or_else(|| {
                Error::Internal("active agent with no remaining item".into())
            })?;
            favourite[a] = item;
            points_to[a] = owner[item].expect("remaining items are owned");
        }
        // 0 = unvisited, 1 = on current walk, 2 = done.
        let mut state = vec![0u8; n];
        let mut in_cycle = vec![false; n];
        for &start in &active {
            let mut walk = Vec::new();
            let mut a = start;
            while state[a] == 0 {
                state[a] = 1;
                walk.push(a);
                a = points_to[a];
            }
            if state[a] == 1 {
                let from = walk.iter().position(|&x| x == a).expect("on walk");
                for &c in &walk[from..] {
                    in_cycle[c] = true;
                }
            }
            for w in walk {
                state[w] = 2;
            }
        }
        for &a in &active {
            if in_cycle[a] {
                result.set(a, Some(favourite[a]));
                remaining[favourite[a]] = false;
            }
        }
        active.retain(|&a| !in_cycle[a]);
    }
    Ok(result)
}

/// RSD followed by top trading cycles from the RSD allocation.
pub fn rsd_then_ttc<M: Market + ?Sized>(market: &M, order: &PickOrder) -> Result<Outcome> {
    let endowment = truthful_picks(market, order)?;
    let allocation = ttc(market, &endowment)?;
    Ok(Outcome {
        transfers: TransferProfile::zeros(market.n_agents()),
        trade_log: TradeLog::new(),
        pre_trade: None,
        allocation,
    })
}

/// Result of clearing the post-RSD market at competitive prices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeOutcome {
    pub outcome: Outcome,
    pub endowment: Allocation,
    pub prices: PriceVector,
}

/// Ex-post competitive-equilibrium transfers: truthful picks become
/// endowments, the endowed items are reallocated to maximise welfare, and
/// each agent receives `p(e(j)) − p(a(j))` at the minimal supporting prices.
pub fn expost_ce_transfers<M: Market + ?Sized>(market: &M, order: &PickOrder) -> Result<CeOutcome> {
    let endowment = truthful_picks(market, order)?;
    let agents: Vec<AgentId> = endowment
        .iter()
        .filter(|(_, i)| i.is_some())
        .map(|(a, _)| a)
        .collect();
    let items = endowment.assigned_items();
    let allocation = optimal_assignment(market, &agents, &items)?;
    let prices = ce_prices(market, &endowment, &allocation)?;
    let transfers = TransferProfile::from_vec(
        (0..market.n_agents())
            .map(|j| prices.price_of(endowment.item(j)) - prices.price_of(allocation.item(j)))
            .collect(),
    );
    Ok(CeOutcome {
        outcome: Outcome {
            allocation,
            transfers,
            trade_log: TradeLog::new(),
            pre_trade: None,
        },
        endowment,
        prices,
    })
}

/// Bilateral aftermarket on top of a starting allocation.
pub struct Aftermarket<'a, M: Market + ?Sized> {
    market: &'a M,
    policy: TradePolicy,
    cost: TransactionCost,
    start: Allocation,
    allocation: Allocation,
    /// Net cash received so far, after costs.
    cash: Vec<f64>,
    log: TradeLog,
}

impl<'a, M: Market + ?Sized> Aftermarket<'a, M> {
    pub fn new(
        market: &'a M,
        start: Allocation,
        policy: TradePolicy,
        cost: TransactionCost,
    ) -> Result<Self> {
        policy.validate()?;
        cost.validate()?;
        if start.n_agents() != market.n_agents() || !start.is_valid(market.n_items()) {
            return Err(Error::arg("starting allocation does not fit the instance"));
        }
        Ok(Aftermarket {
            market,
            policy,
            cost,
            allocation: start.clone(),
            start,
            cash: vec![0.0; market.n_agents()],
            log: TradeLog::new(),
        })
    }

    fn affordable(&self, buyer: AgentId, seller: AgentId, q: &Quote) -> bool {
        if !self.policy.budget_enforced {
            return true;
        }
        let buyer_cash = self.market.budget(buyer) + self.cash[buyer];
        let seller_cash = self.market.budget(seller) + self.cash[seller];
        buyer_cash - q.price >= 0.0 && seller_cash + q.price - q.cost >= 0.0
    }

    /// Highest-surplus affordable trade for `buyer`; ties go to the first
    /// seller in `sellers`.
    fn best_trade(
        &self,
        buyer: AgentId,
        sellers: impl Iterator<Item = AgentId>,
    ) -> Option<(AgentId, Quote)> {
        let own = self.allocation.item(buyer);
        let mut best: Option<(AgentId, Quote)> = None;
        for seller in sellers {
            if seller == buyer {
                continue;
            }
            let Some(theirs) = self.allocation.item(seller) else {
                continue;
            };
            let Some(q) = quote(
                self.market,
                &self.policy,
                &self.cost,
                buyer,
                own,
                seller,
                Some(theirs),
            ) else {
                continue;
            };
            if best.as_ref().is_some_and(|(_, b)| q.surplus() <= b.surplus()) {
                continue;
            }
            if self.affordable(buyer, seller, &q) {
                best = Some((seller, q));
            }
        }
        best
    }

    fn execute(&mut self, buyer: AgentId, seller: AgentId, q: Quote) {
        self.log.push(TradeRecord {
            proposer: buyer,
            counterparty: seller,
            proposer_gave: self.allocation.item(buyer),
            proposer_got: self.allocation.item(seller),
            price: q.price,
            cost: q.cost,
        });
        self.allocation.swap(buyer, seller);
        self.cash[buyer] -= q.price;
        self.cash[seller] += q.price - q.cost;
    }

    /// Runs the aftermarket with proposers in `order`.
    pub fn run(mut self, order: &PickOrder) -> Result<Outcome> {
        check_order(self.market, order)?;
        match self.policy.mode {
            PairwiseMode::FixedPoint => loop {
                let mut traded = false;
                for buyer in order.iter() {
                    if let Some((seller, q)) = self.best_trade(buyer, order.iter()) {
                        self.execute(buyer, seller, q);
                        traded = true;
                    }
                }
                if !traded {
                    break;
                }
            },
            PairwiseMode::SinglePassBuyerExit => {
                let mut exited = vec![false; self.market.n_agents()];
                for buyer in order.iter() {
                    let sellers = order.iter().filter(|&s| !exited[s]);
                    if let Some((seller, q)) = self.best_trade(buyer, sellers) {
                        self.execute(buyer, seller, q);
                        exited[buyer] = true;
                    }
                }
            }
        }
        Outcome::from_trades(self.start, self.log)
    }
}

/// Ex-post pairwise transfers: truthful picks, then the bilateral
/// aftermarket.
pub fn expost_pairwise_transfers<M: Market + ?Sized>(
    market: &M,
    order: &PickOrder,
    policy: &TradePolicy,
    cost: &TransactionCost,
) -> Result<Outcome> {
    let start = truthful_picks(market, order)?;
    Aftermarket::new(market, start, *policy, *cost)?.run(order)
}

/// State of the interim mechanism between turns.
pub(crate) struct InterimState<'a, M: Market + ?Sized> {
    market: &'a M,
    picks: Allocation,
    allocation: Allocation,
    available: Vec<bool>,
    n_available: usize,
    cash: Vec<f64>,
    log: TradeLog,
}

impl<'a, M: Market + ?Sized> InterimState<'a, M> {
    pub(crate) fn new(market: &'a M) -> Self {
        let n = market.n_agents();
        InterimState {
            market,
            picks: Allocation::empty(n),
            allocation: Allocation::empty(n),
            available: vec![true; market.n_items()],
            n_available: market.n_items(),
            cash: vec![0.0; n],
            log: TradeLog::new(),
        }
    }

    pub(crate) fn available_count(&self) -> usize {
        self.n_available
    }

    pub(crate) fn allocation(&self) -> &Allocation {
        &self.allocation
    }

    pub(crate) fn best_available_value(&self, agent: AgentId) -> f64 {
        self.market
            .value_of(agent, best_item(self.market, agent, &self.available))
    }

    fn affordable(&self, policy: &TradePolicy, buyer: AgentId, seller: AgentId, q: &Quote) -> bool {
        !policy.budget_enforced
            || (self.market.budget(buyer) + self.cash[buyer] >= q.price
                && self.market.budget(seller) + self.cash[seller] + q.price >= q.cost)
    }

    fn quote_with(
        &self,
        policy: &TradePolicy,
        buyer: AgentId,
        bait: ItemId,
        seller: AgentId,
    ) -> Option<Quote> {
        let theirs = self.allocation.item(seller)?;
        let q = quote(
            self.market,
            policy,
            &TransactionCost::None,
            buyer,
            Some(bait),
            seller,
            Some(theirs),
        )?;
        self.affordable(policy, buyer, seller, &q).then_some(q)
    }

    /// One agent's turn: pick, then possibly one trade with an earlier
    /// agent.
    pub(crate) fn take_turn(
        &mut self,
        agent: AgentId,
        earlier: &[AgentId],
        model: AgentModel,
        policy: &TradePolicy,
    ) {
        let Some(truthful) = best_item(self.market, agent, &self.available) else {
            return;
        };
        let (pick, trade) = match model {
            AgentModel::Myopic => {
                let mut best: Option<(AgentId, Quote)> = None;
                for &e in earlier {
                    if let Some(q) = self.quote_with(policy, agent, truthful, e) {
                        if best.as_ref().is_none_or(|(_, b)| q.surplus() > b.surplus()) {
                            best = Some((e, q));
                        }
                    }
                }
                (truthful, best)
            }
            AgentModel::LookbackStrategic => {
                let mut choice = (truthful, None);
                let mut payoff = self.market.value(agent, truthful);
                for &e in earlier {
                    let Some(theirs) = self.allocation.item(e) else {
                        continue;
                    };
                    let Some(bait) = best_item(self.market, e, &self.available) else {
                        continue;
                    };
                    if let Some(q) = self.quote_with(policy, agent, bait, e) {
                        let p = self.market.value(agent, theirs) - q.price;
                        if p > payoff {
                            payoff = p;
                            choice = (bait, Some((e, q)));
                        }
                    }
                }
                choice
            }
        };
        self.available[pick] = false;
        self.n_available -= 1;
        self.picks.set(agent, Some(pick));
        self.allocation.set(agent, Some(pick));
        if let Some((seller, q)) = trade {
            self.log.push(TradeRecord {
                proposer: agent,
                counterparty: seller,
                proposer_gave: Some(pick),
                proposer_got: self.allocation.item(seller),
                price: q.price,
                cost: q.cost,
            });
            self.allocation.swap(agent, seller);
            self.cash[agent] -= q.price;
            self.cash[seller] += q.price - q.cost;
        }
    }

    pub(crate) fn into_outcome(self) -> Result<Outcome> {
        Outcome::from_trades(self.picks, self.log)
    }
}

/// Interim transfers: each agent, on its turn, picks and may make one
/// trade with an agent who picked earlier. `pre_trade` holds the raw picks.
pub fn interim_transfers<M: Market + ?Sized>(
    market: &M,
    order: &PickOrder,
    model: AgentModel,
    policy: &TradePolicy,
) -> Result<Outcome> {
    check_order(market, order)?;
    policy.validate()?;
    let mut state = InterimState::new(market);
    for (turn, agent) in order.iter().enumerate() {
        state.take_turn(agent, &order.as_slice()[..turn], model, policy);
    }
    state.into_outcome()
}

/// Agent A's payoff under each of its first-pick strategies in the
/// strategy-proofness scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategicScenarioReport {
    pub surplus_split: f64,
    /// A picks a room nobody else cares about.
    pub other_room: f64,
    /// A picks its favourite room (the honest choice).
    pub honest: f64,
    /// A picks the room B wants and resells it.
    pub resell: f64,
    /// Price B pays A in the resale branch.
    pub resale_price: f64,
    pub resell_dominates: bool,
}

/// Plays out agent A's three strategies in the four-room scenario with
/// budgets A: 0, B: 500. A picks first, the others pick truthfully, and the
/// fixed-point aftermarket runs with the seller floor and budgets enforced.
pub fn strategic_rsd_counterexample(surplus_split: f64) -> Result<StrategicScenarioReport> {
    let market = scenarios::resale_manipulation();
    let policy = TradePolicy::new(surplus_split, true, PairwiseMode::FixedPoint, true)?;
    let order = PickOrder::identity(4);
    let branch = |first: ItemId| -> Result<(f64, Outcome)> {
        let mut available = vec![true; market.n_items()];
        let mut start = Allocation::empty(4);
        start.set(0, Some(first));
        available[first] = false;
        for agent in 1..4 {
            let item = best_item(&market, agent, &available).expect("four rooms");
            available[item] = false;
            start.set(agent, Some(item));
        }
        let outcome = Aftermarket::new(&market, start, policy, TransactionCost::None)?.run(&order)?;
        let a = crate::market::utility(&market, &outcome, 0)? - market.budget(0);
        Ok((a, outcome))
    };
    let (other_room, _) = branch(scenarios::RESALE_OTHER_ROOM)?;
    let (honest, _) = branch(scenarios::RESALE_A_FAVOURITE)?;
    let (resell, outcome) = branch(scenarios::RESALE_B_FAVOURITE)?;
    Ok(StrategicScenarioReport {
        surplus_split,
        other_room,
        honest,
        resell,
        resale_price: outcome.transfers.get(0),
        resell_dominates: resell >= honest && resell >= other_room,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{total_welfare, utilities, validate_outcome, MarketInstance};

    fn ex31() -> MarketInstance {
        scenarios::two_agent_swap()
    }

    #[test]
    fn sd_examples() {
        let m = ex31();
        let out = serial_dictatorship(&m, &PickOrder::identity(2)).unwrap();
        assert_eq!(out.allocation, Allocation::from_assigned(&[0, 1]));
        assert_eq!(utilities(&m, &out), vec![7.0, 6.0]);

        let m = scenarios::stable_but_inefficient();
        let out = serial_dictatorship(&m, &PickOrder::new(vec![0, 2, 1], 3).unwrap()).unwrap();
        assert_eq!(out.allocation, Allocation::from_assigned(&[2, 0, 1]));

        let bad = PickOrder::identity(3);
        assert!(serial_dictatorship(&ex31(), &bad).is_err());
    }

    #[test]
    fn sd_more_agents_than_items() {
        let m = MarketInstance::from_int_rows(&[&[1], &[2]], &[0, 0]).unwrap();
        let out = serial_dictatorship(&m, &PickOrder::new(vec![1, 0], 2).unwrap()).unwrap();
        assert_eq!(out.allocation, Allocation::from_items(vec![None, Some(0)]));
    }

    #[test]
    fn rsd_is_seeded() {
        let m = scenarios::interim_with_latecomer();
        let a = rsd(&m, 7).unwrap();
        let b = rsd(&m, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ttc_after_sd_is_identity() {
        let m = scenarios::stable_but_inefficient();
        let order = PickOrder::new(vec![0, 2, 1], 3).unwrap();
        let out = rsd_then_ttc(&m, &order).unwrap();
        assert_eq!(out.allocation, truthful_picks(&m, &order).unwrap());
    }

    #[test]
    fn ttc_resolves_cycles() {
        // Both want the other's item.
        let m = MarketInstance::from_int_rows(&[&[0, 5], &[5, 0], &[1, 1]], &[0, 0, 0]).unwrap();
        let e = Allocation::from_items(vec![Some(0), Some(1), None]);
        assert_eq!(
            ttc(&m, &e).unwrap(),
            Allocation::from_items(vec![Some(1), Some(0), None])
        );
    }

    #[test]
    fn ce_two_agent_swap() {
        let m = ex31();
        let ce = expost_ce_transfers(&m, &PickOrder::identity(2)).unwrap();
        assert_eq!(ce.outcome.allocation, Allocation::from_assigned(&[1, 0]));
        assert_eq!(ce.prices.as_slice(), &[1.0, 0.0]);
        assert_eq!(ce.outcome.transfers.as_slice(), &[1.0, -1.0]);
        assert_eq!(utilities(&m, &ce.outcome), vec![7.0, 14.0]);
    }

    #[test]
    fn ce_stable_but_inefficient() {
        let m = scenarios::stable_but_inefficient();
        let ce = expost_ce_transfers(&m, &PickOrder::new(vec![0, 2, 1], 3).unwrap()).unwrap();
        assert_eq!(ce.outcome.allocation, Allocation::from_assigned(&[0, 1, 2]));
        assert_eq!(total_welfare(&m, &ce.outcome.allocation), 14.0);
        assert!(validate_outcome(&m, &ce.outcome).is_empty());
    }

    #[test]
    fn pairwise_examples() {
        let m = scenarios::stable_but_inefficient();
        let order = PickOrder::new(vec![0, 2, 1], 3).unwrap();
        let out = expost_pairwise_transfers(&m, &order, &TradePolicy::default(), &TransactionCost::None)
            .unwrap();
        assert!(out.trade_log.is_empty());
        assert_eq!(total_welfare(&m, &out.allocation), 10.0);

        let m = ex31();
        let out = expost_pairwise_transfers(
            &m,
            &PickOrder::identity(2),
            &TradePolicy::default(),
            &TransactionCost::None,
        )
        .unwrap();
        assert_eq!(out.trade_log.len(), 1);
        let r = &out.trade_log.records()[0];
        assert_eq!((r.proposer, r.counterparty, r.price), (1, 0, 5.0));
        assert_eq!(utilities(&m, &out), vec![11.0, 10.0]);
    }

    #[test]
    fn single_pass_buyers_exit() {
        // Agent 0 buys item 1; agent 1 then buys item 2; agent 2 would buy
        // item 1 back but its owner has bought and left.
        let m = MarketInstance::from_int_rows(&[&[0, 10, 0], &[0, 1, 8], &[0, 9, 1]], &[0, 0, 0])
            .unwrap();
        let start = Allocation::from_assigned(&[0, 1, 2]);
        let policy = TradePolicy {
            mode: PairwiseMode::SinglePassBuyerExit,
            ..TradePolicy::default()
        };
        let out = Aftermarket::new(&m, start, policy, TransactionCost::None)
            .unwrap()
            .run(&PickOrder::identity(3))
            .unwrap();
        assert_eq!(out.trade_log.len(), 2);
        assert_eq!(out.allocation, Allocation::from_assigned(&[1, 2, 0]));
    }

    #[test]
    fn budgets_block_trades() {
        let m = ex31().with_budgets(vec![0.0, 0.0]).unwrap();
        let policy = TradePolicy {
            budget_enforced: true,
            ..TradePolicy::default()
        };
        let out =
            expost_pairwise_transfers(&m, &PickOrder::identity(2), &policy, &TransactionCost::None)
                .unwrap();
        assert!(out.trade_log.is_empty());
    }

    #[test]
    fn costs() {
        let c: TransactionCost = "fixed:2.5".parse().unwrap();
        assert_eq!(c, TransactionCost::Fixed(2.5));
        assert_eq!(c.seller_minimum(-4.0, true), Some(0.0));
        assert_eq!(c.seller_minimum(-4.0, false), Some(-1.5));
        let p: TransactionCost = "prop:0.5".parse().unwrap();
        assert_eq!(p.seller_minimum(1.0, false), Some(2.0));
        assert_eq!(p.seller_minimum(-3.0, false), Some(-2.0));
        assert_eq!(TransactionCost::Proportional(1.0).seller_minimum(1.0, false), None);
        assert!("fixed:-1".parse::<TransactionCost>().is_err());
        assert!("bogus".parse::<TransactionCost>().is_err());
        assert_eq!("none".parse::<TransactionCost>().unwrap(), TransactionCost::None);
        assert_eq!(p.to_string().parse::<TransactionCost>().unwrap(), p);
    }

    #[test]
    fn proportional_seller_nets_reservation() {
        let m = ex31();
        let cost = TransactionCost::Proportional(0.2);
        let policy = TradePolicy::at_reservation();
        let q = quote(&m, &policy, &cost, 1, Some(1), 0, Some(0)).unwrap();
        assert!((q.price - q.cost - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interim_examples() {
        let m = scenarios::interim_shortfall();
        for model in [AgentModel::Myopic, AgentModel::LookbackStrategic] {
            let out =
                interim_transfers(&m, &PickOrder::identity(3), model, &TradePolicy::default())
                    .unwrap();
            assert_eq!(out.allocation, Allocation::from_assigned(&[0, 1, 2]));
            assert!(out.trade_log.is_empty());
            assert_eq!(total_welfare(&m, &out.allocation), 21.0);
        }
        let m = scenarios::interim_with_latecomer();
        for model in [AgentModel::Myopic, AgentModel::LookbackStrategic] {
            let out =
                interim_transfers(&m, &PickOrder::identity(4), model, &TradePolicy::default())
                    .unwrap();
            assert_eq!(out.allocation, Allocation::from_assigned(&[0, 1, 3, 2]));
            assert_eq!(out.trade_log.len(), 1);
            assert_eq!(
                (out.trade_log.records()[0].proposer, out.trade_log.records()[0].counterparty),
                (3, 2)
            );
            assert_eq!(total_welfare(&m, &out.allocation), 120.0);
            assert!(validate_outcome(&m, &out).is_empty());
        }
        let single = MarketInstance::from_int_rows(&[&[4, 9]], &[0]).unwrap();
        let out = interim_transfers(
            &single,
            &PickOrder::identity(1),
            AgentModel::LookbackStrategic,
            &TradePolicy::default(),
        )
        .unwrap();
        assert_eq!(out.allocation, Allocation::from_assigned(&[1]));
        assert!(out.trade_log.is_empty());
    }

    #[test]
    fn strategic_scenario() {
        let r = strategic_rsd_counterexample(0.5).unwrap();
        assert_eq!(r.honest, 20.0);
        assert_eq!(r.resell, 115.0);
        assert_eq!(r.resale_price, 95.0);
        assert_eq!(r.other_room, 10.0);
        assert!(r.resell_dominates);
        let r = strategic_rsd_counterexample(0.0).unwrap();
        assert_eq!(r.resell, 20.0);
        assert!(r.resell_dominates);
        assert!(strategic_rsd_counterexample(1.5).is_err());
    }
}
