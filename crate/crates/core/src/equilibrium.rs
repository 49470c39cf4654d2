//! Assignment-market optimisation.
//!
//! The welfare-maximising allocation is found with a dense O(n³) Hungarian
//! solver. Among all optimal assignments the lexicographically smallest one
//! (indexed by agent, null last) is returned, so results do not depend on
//! solver internals. Supporting competitive-equilibrium prices are read off
//! the difference-constraint system the optimal allocation induces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{total_welfare, AgentId, Allocation, ItemId, Market, PickOrder};
use crate::mechanisms::{self, AgentModel, TradePolicy};

/// Largest instance the brute-force oracle accepts.
pub const BRUTE_FORCE_MAX_AGENTS: usize = 10;
pub const BRUTE_FORCE_MAX_ITEMS: usize = 12;

/// Item prices. Items outside the market are priced at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceVector(pub Vec<f64>);

impl PriceVector {
    pub fn price(&self, item: ItemId) -> f64 {
        self.0[item]
    }

    pub fn price_of(&self, item: Option<ItemId>) -> f64 {
        item.map_or(0.0, |i| self.0[i])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Gain in joint value from swapping two agents' holdings:
/// `[v_j(a(k)) + v_k(a(j))] − [v_j(a(j)) + v_k(a(k))]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TradeSurplus(pub f64);

impl TradeSurplus {
    pub fn is_feasible(self) -> bool {
        self.0 > 0.0
    }
}

/// Solution of a square maximisation assignment problem.
#[derive(Debug, Clone)]
struct Assignment {
    col_of_row: Vec<usize>,
    row_potential: Vec<f64>,
    col_potential: Vec<f64>,
}

/// Hungarian method (shortest augmenting paths with potentials) on a square
/// weight matrix, maximising total weight. Potentials satisfy
/// `row[r] + col[c] >= w[r][c]` with equality on matched pairs.
fn hungarian_max(weights: &[Vec<f64>]) -> Assignment {
    let n = weights.len();
    // Work on costs = -weights, 1-based with a virtual column 0.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        row_of_col[0] = row;
        let mut col0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let row0 = row_of_col[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0usize;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = -weights[row0 - 1][col - 1] - u[row0] - v[col];
                if reduced < minv[col] {
                    minv[col] = reduced;
                    way[col] = col0;
                }
                if minv[col] < delta {
                    delta = minv[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[row_of_col[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
            if row_of_col[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            row_of_col[col0] = row_of_col[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0usize; n];
    for col in 1..=n {
        if row_of_col[col] > 0 {
            col_of_row[row_of_col[col] - 1] = col - 1;
        }
    }
    Assignment {
        col_of_row,
        row_potential: u[1..].iter().map(|x| -x).collect(),
        col_potential: v[1..].iter().map(|x| -x).collect(),
    }
}

/// Rewrites an optimal assignment into the lexicographically smallest
/// optimal one. `col_rank` orders columns for the comparison.
///
/// Optimal assignments are exactly the perfect matchings of the tight
/// subgraph, so rows are fixed one at a time to their smallest tight column
/// that still admits a completion, found by an alternating-path search.
fn lexicographic_refine(weights: &[Vec<f64>], sol: &mut Assignment, col_rank: &[usize]) {
    let n = weights.len();
    let scale = weights
        .iter()
        .flatten()
        .fold(1.0f64, |acc, w| acc.max(w.abs()));
    let tol = 1e-9 * scale;
    let tight: Vec<Vec<usize>> = (0..n)
        .map(|r| {
            let mut cols: Vec<usize> = (0..n)
                .filter(|&c| {
                    (sol.row_potential[r] + sol.col_potential[c] - weights[r][c]).abs() <= tol
                })
                .collect();
            cols.sort_by_key(|&c| col_rank[c]);
            cols
        })
        .collect();

    let mut row_of_col = vec![0usize; n];
    for (r, &c) in sol.col_of_row.iter().enumerate() {
        row_of_col[c] = r;
    }
    let mut col_fixed = vec![false; n];

    // Finds an alternating path starting at `row` that ends by taking
    // `target`; `avoid` is the column being claimed by the caller.
    #[allow(clippy::too_many_arguments)]
    fn reroute(
        row: usize,
        target: usize,
        avoid: usize,
        tight: &[Vec<usize>],
        col_fixed: &[bool],
        row_of_col: &[usize],
        visited: &mut [bool],
        path: &mut Vec<(usize, usize)>,
    ) -> bool {
        for &c in &tight[row] {
            if c == avoid || col_fixed[c] || visited[c] {
                continue;
            }
            visited[c] = true;
            path.push((row, c));
            if c == target
                || reroute(
                    row_of_col[c],
                    target,
                    avoid,
                    tight,
                    col_fixed,
                    row_of_col,
                    visited,
                    path,
                )
            {
                return true;
            }
            path.pop();
        }
        false
    }

    for r in 0..n {
        for &c in &tight[r] {
            if col_fixed[c] {
                continue;
            }
            if sol.col_of_row[r] == c {
                col_fixed[c] = true;
                break;
            }
            let holder = row_of_col[c];
            let target = sol.col_of_row[r];
            let mut visited = vec![false; n];
            let mut path = Vec::new();
            if reroute(
                holder,
                target,
                c,
                &tight,
                &col_fixed,
                &row_of_col,
                &mut visited,
                &mut path,
            ) {
                path.push((r, c));
                for (row, col) in path {
                    sol.col_of_row[row] = col;
                    row_of_col[col] = row;
                }
                col_fixed[c] = true;
                break;
            }
        }
    }
}

/// Welfare-maximising assignment between `agents` and `items`.
///
/// When there are at least as many items as agents every listed agent gets
/// an item; otherwise every listed item is allocated. Agents not listed get
/// the null item. Ties go to the lexicographically smallest assignment
/// vector with null ranked after every real item.
pub fn optimal_assignment<M: Market + ?Sized>(
    market: &M,
    agents: &[AgentId],
    items: &[ItemId],
) -> Result<Allocation> {
    check_distinct(agents, market.n_agents(), "agent")?;
    check_distinct(items, market.n_items(), "item")?;
    let mut agents = agents.to_vec();
    agents.sort_unstable();
    let mut items = items.to_vec();
    items.sort_unstable();
    let mut alloc = Allocation::empty(market.n_agents());
    let size = agents.len().max(items.len());
    if agents.is_empty() || items.is_empty() {
        return Ok(alloc);
    }
    let weights: Vec<Vec<f64>> = (0..size)
        .map(|r| {
            (0..size)
                .map(|c| match (agents.get(r), items.get(c)) {
                    (Some(&a), Some(&i)) => market.value(a, i),
                    _ => 0.0,
                })
                .collect()
        })
        .collect();
    let mut sol = hungarian_max(&weights);
    // Real items rank by id, padding columns (null) after them.
    let col_rank: Vec<usize> = (0..size).collect();
    lexicographic_refine(&weights, &mut sol, &col_rank);
    for (r, &agent) in agents.iter().enumerate() {
        let c = sol.col_of_row[r];
        alloc.set(agent, items.get(c).copied());
    }
    Ok(alloc)
}

/// Welfare-maximising allocation of exactly the items in `item_subset`
/// across all agents.
pub fn max_welfare_allocation<M: Market + ?Sized>(
    market: &M,
    item_subset: &[ItemId],
) -> Result<Allocation> {
    if item_subset.is_empty() {
        return Err(Error::arg("item subset is empty"));
    }
    if item_subset.len() > market.n_agents() {
        return Err(Error::arg(format!(
            "cannot allocate {} items to {} agents",
            item_subset.len(),
            market.n_agents()
        )));
    }
    let agents: Vec<AgentId> = (0..market.n_agents()).collect();
    optimal_assignment(market, &agents, item_subset)
}

fn check_distinct(ids: &[usize], bound: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; bound];
    for &id in ids {
        if id >= bound || std::mem::replace(&mut seen[id], true) {
            return Err(Error::arg(format!("{what} {id} out of range or repeated")));
        }
    }
    Ok(())
}

/// Exhaustive search over every allocation that hands out
/// `min(n_agents, n_items)` items. Independent of the Hungarian solver.
///
/// Returns the lexicographically smallest optimal allocation (null last).
pub fn brute_force_optimal<M: Market + ?Sized>(market: &M) -> Result<(Allocation, f64)> {
    let (n, m) = (market.n_agents(), market.n_items());
    if n > BRUTE_FORCE_MAX_AGENTS {
        return Err(Error::TooLarge {
            what: "n_agents",
            actual: n,
            limit: BRUTE_FORCE_MAX_AGENTS,
        });
    }
    if m > BRUTE_FORCE_MAX_ITEMS {
        return Err(Error::TooLarge {
            what: "n_items",
            actual: m,
            limit: BRUTE_FORCE_MAX_ITEMS,
        });
    }
    struct Search<'a, M: ?Sized> {
        market: &'a M,
        current: Vec<Option<ItemId>>,
        used: Vec<bool>,
        nulls_left: usize,
        best: Option<(Vec<Option<ItemId>>, f64)>,
    }
    impl<M: Market + ?Sized> Search<'_, M> {
        fn go(&mut self, agent: usize, acc: f64) {
            if agent == self.current.len() {
                if self.best.as_ref().is_none_or(|(_, w)| acc > *w) {
                    self.best = Some((self.current.clone(), acc));
                }
                return;
            }
            for item in 0..self.used.len() {
                if self.used[item] {
                    continue;
                }
                self.used[item] = true;
                self.current[agent] = Some(item);
                let v = self.market.value(agent, item);
                self.go(agent + 1, acc + v);
                self.used[item] = false;
            }
            if self.nulls_left > 0 {
                self.nulls_left -= 1;
                self.current[agent] = None;
                self.go(agent + 1, acc);
                self.nulls_left += 1;
            }
        }
    }
    let mut search = Search {
        market,
        current: vec![None; n],
        used: vec![false; m],
        nulls_left: n.saturating_sub(m),
        best: None,
    };
    search.go(0, 0.0);
    let (items, welfare) = search.best.unwrap_or((Vec::new(), 0.0));
    Ok((Allocation::from_items(items), welfare))
}

/// Agents holding an item in `endowment`, and the sorted endowed items.
fn endowed(endowment: &Allocation) -> (Vec<AgentId>, Vec<ItemId>) {
    let agents = endowment
        .iter()
        .filter(|(_, item)| item.is_some())
        .map(|(a, _)| a)
        .collect();
    (agents, endowment.assigned_items())
}

/// Checks the structure shared by `ce_prices` and `verify_ce`: the endowed
/// agents hold exactly the endowed items and nobody else holds anything.
fn same_support(endowment: &Allocation, allocation: &Allocation) -> bool {
    endowment.n_agents() == allocation.n_agents()
        && endowment
            .iter()
            .all(|(a, e)| e.is_some() == allocation.item(a).is_some())
        && endowment.assigned_items() == allocation.assigned_items()
}

/// Componentwise-minimal supporting prices for `allocation`, given the
/// endowment it reallocates.
///
/// The market consists of the endowed items; unpicked items are outside it
/// and priced at zero. Every holder `j` of `x = a(j)` needs
/// `p(x) − p(y) ≤ v_j(x) − v_j(y)` for each endowed item `y`. Such prices
/// exist iff the allocation is welfare-optimal over the endowed items (no
/// negative cycle); the minimal solution with minimum zero is
/// `p(y) = −min_x dist(y, x)`.
pub fn ce_prices<M: Market + ?Sized>(
    market: &M,
    endowment: &Allocation,
    allocation: &Allocation,
) -> Result<PriceVector> {
    if endowment.n_agents() != market.n_agents() {
        return Err(Error::arg("endowment does not cover every agent"));
    }
    if !endowment.is_valid(market.n_items()) || !allocation.is_valid(market.n_items()) {
        return Err(Error::arg("endowment or allocation is not a valid allocation"));
    }
    if !same_support(endowment, allocation) {
        return Err(Error::Precondition(
            "allocation must reallocate exactly the endowed items among the endowed agents"
                .into(),
        ));
    }
    let (agents, items) = endowed(endowment);
    let k = items.len();
    let mut index = vec![usize::MAX; market.n_items()];
    for (pos, &item) in items.iter().enumerate() {
        index[item] = pos;
    }
    // dist[y][x]: tightest bound on p(x) − p(y).
    let mut dist = vec![vec![f64::INFINITY; k]; k];
    for (y, row) in dist.iter_mut().enumerate() {
        row[y] = 0.0;
    }
    for &agent in &agents {
        let x_item = allocation.item(agent).expect("same support");
        let x = index[x_item];
        let vx = market.value(agent, x_item);
        for (y, &y_item) in items.iter().enumerate() {
            let w = vx - market.value(agent, y_item);
            if w < dist[y][x] {
                dist[y][x] = w;
            }
        }
    }
    for mid in 0..k {
        for from in 0..k {
            let via = dist[from][mid];
            if via == f64::INFINITY {
                continue;
            }
            for to in 0..k {
                let cand = via + dist[mid][to];
                if cand < dist[from][to] {
                    dist[from][to] = cand;
                }
            }
        }
    }
    let scale = items
        .iter()
        .flat_map(|&i| agents.iter().map(move |&a| (a, i)))
        .fold(1.0f64, |acc, (a, i)| acc.max(market.value(a, i).abs()));
    let tol = market.mode().tolerance() * scale;
    if (0..k).any(|y| dist[y][y] < -tol) {
        return Err(Error::Precondition(
            "allocation is not welfare-optimal over the endowed items; no supporting prices".into(),
        ));
    }
    let mut prices = vec![0.0; market.n_items()];
    for (y, &item) in items.iter().enumerate() {
        let lowest = dist[y].iter().copied().fold(0.0f64, f64::min);
        prices[item] = 0.0 - lowest;
    }
    Ok(PriceVector(prices))
}

/// Competitive equilibrium with endowments: each endowed agent's item
/// maximises `v_j(i) − p(i)` over the endowed items, and exactly the endowed
/// items are allocated.
pub fn verify_ce<M: Market + ?Sized>(
    market: &M,
    endowment: &Allocation,
    allocation: &Allocation,
    prices: &PriceVector,
) -> bool {
    if prices.0.len() != market.n_items()
        || endowment.n_agents() != market.n_agents()
        || !endowment.is_valid(market.n_items())
        || !allocation.is_valid(market.n_items())
        || !same_support(endowment, allocation)
    {
        return false;
    }
    let tol = market.mode().tolerance();
    let items = endowment.assigned_items();
    allocation.iter().all(|(agent, held)| {
        let Some(held) = held else { return true };
        let surplus = market.value(agent, held) - prices.price(held);
        items
            .iter()
            .all(|&i| market.value(agent, i) - prices.price(i) <= surplus + tol)
    })
}

/// Pairwise trade test between the holders `j` and `k`.
pub fn trade_feasible<M: Market + ?Sized>(
    market: &M,
    allocation: &Allocation,
    j: AgentId,
    k: AgentId,
) -> Result<(bool, TradeSurplus)> {
    let n = market.n_agents();
    if j >= n || k >= n || j == k {
        return Err(Error::arg(format!("need two distinct agents, got {j} and {k}")));
    }
    let (Some(ij), Some(ik)) = (allocation.item(j), allocation.item(k)) else {
        return Err(Error::arg("both agents must hold an item"));
    };
    let surplus = TradeSurplus(
        (market.value(j, ik) + market.value(k, ij)) - (market.value(j, ij) + market.value(k, ik)),
    );
    Ok((surplus.is_feasible(), surplus))
}

/// Welfare of the best assignment of `agents` over all items.
fn prefix_optimum<M: Market + ?Sized>(market: &M, agents: &[AgentId]) -> Result<f64> {
    let items: Vec<ItemId> = (0..market.n_items()).collect();
    let alloc = optimal_assignment(market, agents, &items)?;
    Ok(total_welfare(market, &alloc))
}

/// Whether, at every turn of the interim mechanism, the newly picking agent
/// can reach the welfare-optimal allocation of everyone who has picked so
/// far by picking one available item and making at most one swap with an
/// earlier agent.
///
/// The turn sequence is the one lookback-strategic agents produce when they
/// capture the whole trade surplus (split 0, no reservation floor), since
/// that is when an agent's payoff equals the welfare it adds.
pub fn interim_feasibility_check<M: Market + ?Sized>(market: &M, order: &PickOrder) -> Result<bool> {
    if order.len() != market.n_agents() {
        return Err(Error::arg("pick order does not match the instance"));
    }
    let policy = TradePolicy::at_reservation();
    let tol = market.mode().tolerance();
    let mut state = mechanisms::InterimState::new(market);
    for (turn, agent) in order.iter().enumerate() {
        if state.available_count() == 0 {
            break;
        }
        let earlier = &order.as_slice()[..turn];
        let target = prefix_optimum(market, &order.as_slice()[..=turn])?;
        let base: f64 = earlier
            .iter()
            .map(|&a| market.value_of(a, state.allocation().item(a)))
            .sum();
        let mut reachable = base + state.best_available_value(agent);
        for &e in earlier {
            let Some(held) = state.allocation().item(e) else {
                continue;
            };
            let bait = state.best_available_value(e);
            let gain = market.value(agent, held) - market.value(e, held) + bait;
            reachable = reachable.max(base + gain);
        }
        if reachable < target - tol {
            return Ok(false);
        }
        state.take_turn(agent, earlier, AgentModel::LookbackStrategic, &policy);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::MarketInstance;

    fn two_agent_swap() -> MarketInstance {
        MarketInstance::from_int_rows(&[&[2, 1], &[10, 1]], &[5, 5]).unwrap()
    }

    fn stable_but_inefficient() -> MarketInstance {
        MarketInstance::from_int_rows(&[&[5, 0, 10], &[0, 4, 0], &[-10, 0, 5]], &[0, 0, 0]).unwrap()
    }

    fn interim_shortfall() -> MarketInstance {
        MarketInstance::from_int_rows(&[&[10, 9, 0], &[0, 10, 9], &[4, 0, 1]], &[0, 0, 0]).unwrap()
    }

    #[test]
    fn max_welfare_examples() {
        let m = two_agent_swap();
        let a = max_welfare_allocation(&m, &[0, 1]).unwrap();
        assert_eq!(a, Allocation::from_assigned(&[1, 0]));
        assert_eq!(total_welfare(&m, &a), 11.0);

        let m = interim_shortfall();
        let a = max_welfare_allocation(&m, &[0, 1, 2]).unwrap();
        assert_eq!(a, Allocation::from_assigned(&[1, 2, 0]));
        assert_eq!(total_welfare(&m, &a), 22.0);

        let single = MarketInstance::from_int_rows(&[&[3]], &[0]).unwrap();
        assert_eq!(
            max_welfare_allocation(&single, &[0]).unwrap(),
            Allocation::from_assigned(&[0])
        );
        assert!(max_welfare_allocation(&single, &[]).is_err());
    }

    #[test]
    fn ties_break_lexicographically() {
        // Every assignment has the same welfare.
        let m = MarketInstance::from_int_rows(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]], &[0, 0, 0])
            .unwrap();
        let a = max_welfare_allocation(&m, &[0, 1, 2]).unwrap();
        assert_eq!(a, Allocation::from_assigned(&[0, 1, 2]));
        let m = MarketInstance::from_int_rows(&[&[0, 0, 0], &[5, 0, 0], &[5, 0, 0]], &[0, 0, 0])
            .unwrap();
        let a = max_welfare_allocation(&m, &[0, 1, 2]).unwrap();
        assert_eq!(a, Allocation::from_assigned(&[1, 0, 2]));
    }

    #[test]
    fn brute_force_examples() {
        let (a, w) = brute_force_optimal(&stable_but_inefficient()).unwrap();
        assert_eq!(w, 14.0);
        assert_eq!(a, Allocation::from_assigned(&[0, 1, 2]));
        let single = MarketInstance::from_int_rows(&[&[-4]], &[0]).unwrap();
        assert_eq!(brute_force_optimal(&single).unwrap().1, -4.0);
        let big = MarketInstance::from_rows(vec![vec![0.0; 11]; 11]).unwrap();
        assert!(matches!(
            brute_force_optimal(&big),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn more_agents_than_items() {
        let m = MarketInstance::from_int_rows(&[&[1], &[5], &[3]], &[0, 0, 0]).unwrap();
        let a = max_welfare_allocation(&m, &[0]).unwrap();
        assert_eq!(a, Allocation::from_items(vec![None, Some(0), None]));
        let (b, w) = brute_force_optimal(&m).unwrap();
        assert_eq!((b, w), (a, 5.0));
    }

    #[test]
    fn two_agent_swap_prices() {
        let m = two_agent_swap();
        let e = Allocation::from_assigned(&[0, 1]);
        let a = Allocation::from_assigned(&[1, 0]);
        let p = ce_prices(&m, &e, &a).unwrap();
        assert_eq!(p.as_slice(), &[1.0, 0.0]);
        assert!(verify_ce(&m, &e, &a, &p));
        assert!(!verify_ce(&m, &e, &a, &PriceVector(vec![0.0, 0.0])));
        // Any gap in [1, 9] supports the swap; 2 is one such point.
        assert!(verify_ce(&m, &e, &a, &PriceVector(vec![2.0, 0.0])));
        assert!(verify_ce(&m, &e, &a, &PriceVector(vec![9.0, 0.0])));
        assert!(!verify_ce(&m, &e, &a, &PriceVector(vec![9.5, 0.0])));
        // The non-optimal identity reallocation has no supporting prices.
        assert!(matches!(
            ce_prices(&m, &e, &e),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn identical_agents_price_value_gaps() {
        let m = MarketInstance::from_int_rows(&[&[3, 2, 1], &[3, 2, 1], &[3, 2, 1]], &[0, 0, 0])
            .unwrap();
        let e = Allocation::from_assigned(&[0, 1, 2]);
        let p = ce_prices(&m, &e, &e).unwrap();
        // Identical agents must be indifferent: price gaps equal value gaps.
        assert_eq!(p.as_slice(), &[2.0, 1.0, 0.0]);
        assert!(verify_ce(&m, &e, &e, &p));
    }

    #[test]
    fn unpicked_items_are_free() {
        let m = MarketInstance::from_int_rows(&[&[2, 1, 0], &[10, 1, 0]], &[0, 0]).unwrap();
        let e = Allocation::from_assigned(&[0, 1]);
        let a = max_welfare_allocation(&m, &e.assigned_items()).unwrap();
        let p = ce_prices(&m, &e, &a).unwrap();
        assert_eq!(p.as_slice(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn trade_feasibility() {
        let m = stable_but_inefficient();
        let a = Allocation::from_assigned(&[2, 0, 1]);
        let (ok, s) = trade_feasible(&m, &a, 0, 1).unwrap();
        assert!(!ok);
        assert_eq!(s.0, -5.0);
        for (j, k) in [(0, 2), (1, 2)] {
            assert!(!trade_feasible(&m, &a, j, k).unwrap().0);
        }
        let m = two_agent_swap();
        let (ok, s) = trade_feasible(&m, &Allocation::from_assigned(&[0, 1]), 0, 1).unwrap();
        assert!(ok);
        assert_eq!(s.0, 8.0);
        let same = MarketInstance::from_int_rows(&[&[4, 1], &[4, 1]], &[0, 0]).unwrap();
        let (ok, s) = trade_feasible(&same, &Allocation::from_assigned(&[0, 1]), 0, 1).unwrap();
        assert!(!ok && s.0 == 0.0);
        assert!(trade_feasible(&m, &Allocation::from_items(vec![Some(0), None]), 0, 1).is_err());
        assert!(trade_feasible(&m, &Allocation::from_assigned(&[0, 1]), 1, 1).is_err());
    }

    #[test]
    fn interim_feasibility_examples() {
        assert!(!interim_feasibility_check(&interim_shortfall(), &PickOrder::identity(3)).unwrap());
        assert!(interim_feasibility_check(&two_agent_swap(), &PickOrder::identity(2)).unwrap());
        let two = MarketInstance::from_int_rows(&[&[-3, 7], &[2, 9]], &[0, 0]).unwrap();
        for order in [vec![0, 1], vec![1, 0]] {
            let order = PickOrder::new(order, 2).unwrap();
            assert!(interim_feasibility_check(&two, &order).unwrap());
        }
    }
}
