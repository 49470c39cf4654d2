//! Two agents, two items, private values.
//!
//! Agent 1 picks first and holds one item; agent 2 is left with the other
//! and may offer a transfer `t` to swap. Agent 1 accepts when
//! `v₁(received) + t ≥ v₁(held)`. All distributions are common knowledge
//! and values are drawn independently.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Grid points used by the offer search.
pub const OFFER_GRID_POINTS: usize = 2001;
/// Resolution of the golden-section refinement.
pub const OFFER_RESOLUTION: f64 = 1e-5;
/// Absolute error target of the acceptance quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-9;

/// Distribution of one agent's value for one item.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ValueDistribution {
    Uniform { lo: f64, hi: f64 },
    /// Normal(mu, sigma²) conditioned on `[lo, hi]`.
    TruncatedNormal { mu: f64, sigma: f64, lo: f64, hi: f64 },
    /// A known value. Not continuous; useful for degenerate opponents.
    Point { at: f64 },
}

impl ValueDistribution {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let d = ValueDistribution::Uniform { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn truncated_normal(mu: f64, sigma: f64, lo: f64, hi: f64) -> Result<Self> {
        let d = ValueDistribution::TruncatedNormal { mu, sigma, lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn point(at: f64) -> Result<Self> {
        let d = ValueDistribution::Point { at };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ValueDistribution::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            ValueDistribution::TruncatedNormal { mu, sigma, lo, hi } => {
                mu.is_finite()
                    && sigma.is_finite()
                    && sigma > 0.0
                    && lo.is_finite()
                    && hi.is_finite()
                    && lo < hi
                    && self.normal_mass() > 0.0
            }
            ValueDistribution::Point { at } => at.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::arg(format!("invalid distribution {self:?}")))
        }
    }

    /// Support `[lo, hi]`.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            ValueDistribution::Uniform { lo, hi }
            | ValueDistribution::TruncatedNormal { lo, hi, .. } => (lo, hi),
            ValueDistribution::Point { at } => (at, at),
        }
    }

    fn normal(&self) -> Option<Normal> {
        match *self {
            ValueDistribution::TruncatedNormal { mu, sigma, .. } => Normal::new(mu, sigma).ok(),
            _ => None,
        }
    }

    fn normal_mass(&self) -> f64 {
        let (lo, hi) = self.support();
        self.normal().map_or(0.0, |n| n.cdf(hi) - n.cdf(lo))
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        match *self {
            ValueDistribution::Point { at } => f64::from(u8::from(x >= at)),
            _ if x <= lo => 0.0,
            _ if x >= hi => 1.0,
            ValueDistribution::Uniform { .. } => (x - lo) / (hi - lo),
            ValueDistribution::TruncatedNormal { .. } => {
                let n = self.normal().expect("validated");
                ((n.cdf(x) - n.cdf(lo)) / self.normal_mass()).clamp(0.0, 1.0)
            }
        }
    }

    /// `P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match *self {
            ValueDistribution::Point { at } => f64::from(u8::from(x > at)),
            _ => self.cdf(x),
        }
    }

    /// Density; `None` for a point mass.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.support();
        match *self {
            ValueDistribution::Point { .. } => None,
            _ if x < lo || x > hi => Some(0.0),
            ValueDistribution::Uniform { .. } => Some(1.0 / (hi - lo)),
            ValueDistribution::TruncatedNormal { .. } => {
                Some(self.normal().expect("validated").pdf(x) / self.normal_mass())
            }
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let (lo, hi) = self.support();
        match *self {
            ValueDistribution::Point { at } => at,
            ValueDistribution::Uniform { .. } => lo + p * (hi - lo),
            ValueDistribution::TruncatedNormal { .. } => {
                let n = self.normal().expect("validated");
                let u = n.cdf(lo) + p * self.normal_mass();
                n.inverse_cdf(u).clamp(lo, hi)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ValueDistribution::Point { at } => at,
            _ => self.quantile(rng.random::<f64>()),
        }
    }
}

impl std::str::FromStr for ValueDistribution {
    type Err = Error;
    /// `uniform:LO,HI`, `tnormal:MU,SIGMA,LO,HI` or `point:X`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::arg(format!("cannot parse distribution '{s}'")))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::arg(format!("bad numbers in distribution '{s}'")))?;
        match (kind, nums.as_slice()) {
            ("uniform", &[lo, hi]) => ValueDistribution::uniform(lo, hi),
            ("tnormal" | "truncated-normal", &[mu, sigma, lo, hi]) => {
                ValueDistribution::truncated_normal(mu, sigma, lo, hi)
            }
            ("point", &[at]) => ValueDistribution::point(at),
            _ => Err(Error::arg(format!("cannot parse distribution '{s}'"))),
        }
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!("{name} must be finite, got {x}")))
    }
}

/// Probability that agent 1, holding the item it values per `held`, accepts
/// `t` to swap for the item it values per `received`:
/// `P(v₁(received) + t ≥ v₁(held)) = 1 − ∫ F_received(s − t) dF_held(s)`.
pub fn acceptance_probability(
    held: &ValueDistribution,
    received: &ValueDistribution,
    t: f64,
) -> Result<f64> {
    check_finite("offer", t)?;
    Ok(acceptance(held, received, t))
}

fn acceptance(held: &ValueDistribution, received: &ValueDistribution, t: f64) -> f64 {
    let reject = match (*held, *received) {
        (ValueDistribution::Point { at }, _) => received.cdf_left(at - t),
        (_, ValueDistribution::Point { at }) => 1.0 - held.cdf(at + t),
        _ => {
            let (lo, hi) = held.support();
            let (rlo, rhi) = received.support();
            // The integrand has kinks where s − t crosses the received support.
            let mut cuts = vec![lo, hi];
            for c in [rlo + t, rhi + t] {
                if c > lo && c < hi {
                    cuts.push(c);
                }
            }
            cuts.sort_by(f64::total_cmp);
            let f = |s: f64| received.cdf(s - t) * held.pdf(s).unwrap_or(0.0);
            cuts.windows(2)
                .map(|w| adaptive_simpson(&f, w[0], w[1], QUADRATURE_TOLERANCE))
                .sum()
        }
    };
    (1.0 - reject).clamp(0.0, 1.0)
}

/// Agent 2's expected payoff from offering `t`:
/// `(v₂(want) − t)·P(accept) + v₂(hold)·P(reject)`.
pub fn seller_expected_payoff(
    v_want: f64,
    v_hold: f64,
    held: &ValueDistribution,
    received: &ValueDistribution,
    t: f64,
) -> Result<f64> {
    check_finite("offer", t)?;
    let p = acceptance(held, received, t);
    Ok((v_want - t) * p + v_hold * (1.0 - p))
}

/// Offers agent 2 may make.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OfferDomain {
    /// `t ∈ [0, W]`: agent 2 pays for the swap.
    #[default]
    NonNegative,
    /// `t ∈ [−W, W]`: agent 2 may also demand payment.
    Symmetric,
}

impl std::str::FromStr for OfferDomain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonnegative" => Ok(OfferDomain::NonNegative),
            "symmetric" => Ok(OfferDomain::Symmetric),
            other => Err(Error::arg(format!("unknown offer domain '{other}'"))),
        }
    }
}

/// Agent 2's optimal offer and its expected payoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalOffer {
    pub offer: f64,
    pub expected_payoff: f64,
    pub acceptance_probability: f64,
}

/// Optimal-offer search for fixed acceptance distributions.
///
/// The payoff is `v₂(hold) + (d − t)·P(t)` with `d = v₂(want) − v₂(hold)`,
/// so the argmax depends only on `d`. `P` is tabulated once on the grid and
/// reused across calls.
#[derive(Debug, Clone)]
pub struct OfferSolver {
    held: ValueDistribution,
    received: ValueDistribution,
    grid: Vec<f64>,
    accept: Vec<f64>,
}

impl OfferSolver {
    pub fn new(
        held: ValueDistribution,
        received: ValueDistribution,
        domain: OfferDomain,
    ) -> Result<Self> {
        held.validate()?;
        received.validate()?;
        let (hlo, hhi) = held.support();
        let (rlo, rhi) = received.support();
        let width = hhi.max(rhi) - hlo.min(rlo);
        let lo = match domain {
            OfferDomain::NonNegative => 0.0,
            OfferDomain::Symmetric => -width,
        };
        let n = OFFER_GRID_POINTS;
        let grid: Vec<f64> = (0..n)
            .map(|k| {
                if k + 1 == n {
                    width
                } else {
                    lo + (width - lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect();
        let accept = grid.iter().map(|&t| acceptance(&held, &received, t)).collect();
        Ok(OfferSolver {
            held,
            received,
            grid,
            accept,
        })
    }

    /// Offer interval `[lo, hi]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }

    /// Best offer for gain `d`; `d` may be any real here.
    pub fn best_offer(&self, d: f64) -> (f64, f64) {
        let obj = |t: f64, p: f64| (d - t) * p;
        let mut best_k = 0;
        let mut best = obj(self.grid[0], self.accept[0]);
        for k in 1..self.grid.len() {
            let v = obj(self.grid[k], self.accept[k]);
            if v > best {
                best = v;
                best_k = k;
            }
        }
        let mut t_best = self.grid[best_k];
        let a = self.grid[best_k.saturating_sub(1)];
        let b = self.grid[(best_k + 1).min(self.grid.len() - 1)];
        let f = |t: f64| obj(t, acceptance(&self.held, &self.received, t));
        let (t_ref, v_ref) = golden_max(&f, a, b, OFFER_RESOLUTION);
        if v_ref > best {
            t_best = t_ref;
            best = v_ref;
        }
        (t_best, best)
    }
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Agent 2's optimal offer when it values the item it wants at `v_want`
/// and the item it holds at `v_hold`. Agent 1's values follow `held` (the
/// item agent 1 holds) and `received`.
pub fn optimal_offer(
    v_want: f64,
    v_hold: f64,
    held: &ValueDistribution,
    received: &ValueDistribution,
    domain: OfferDomain,
) -> Result<OptimalOffer> {
    check_finite("v_want", v_want)?;
    check_finite("v_hold", v_hold)?;
    if v_want <= v_hold {
        return Err(Error::Domain(
            "no trade motive: agent 2 already holds the item it prefers".into(),
        ));
    }
    let solver = OfferSolver::new(*held, *received, domain)?;
    let (t, _) = solver.best_offer(v_want - v_hold);
    let p = acceptance(held, received, t);
    Ok(OptimalOffer {
        offer: t,
        expected_payoff: (v_want - t) * p + v_hold * (1.0 - p),
        acceptance_probability: p,
    })
}

/// Which of the two items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Item {
    A,
    B,
}

impl Item {
    pub fn other(self) -> Item {
        match self {
            Item::A => Item::B,
            Item::B => Item::A,
        }
    }
}

/// Value distributions of both agents for both items.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoAgentGame {
    pub f1a: ValueDistribution,
    pub f1b: ValueDistribution,
    pub f2a: ValueDistribution,
    pub f2b: ValueDistribution,
    #[serde(default)]
    pub domain: OfferDomain,
}

impl TwoAgentGame {
    /// Every value drawn from the same distribution.
    pub fn iid(dist: ValueDistribution) -> Self {
        TwoAgentGame {
            f1a: dist,
            f1b: dist,
            f2a: dist,
            f2b: dist,
            domain: OfferDomain::default(),
        }
    }

    fn f1(&self, item: Item) -> &ValueDistribution {
        match item {
            Item::A => &self.f1a,
            Item::B => &self.f1b,
        }
    }

    fn f2(&self, item: Item) -> &ValueDistribution {
        match item {
            Item::A => &self.f2a,
            Item::B => &self.f2b,
        }
    }

    /// Offer solver for the subgame where agent 2 holds `received`.
    pub fn solver(&self, received: Item) -> Result<OfferSolver> {
        OfferSolver::new(*self.f1(received.other()), *self.f1(received), self.domain)
    }
}

/// Empirical distribution of agent 2's offers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfferDistribution {
    /// Item agent 2 holds.
    pub received: Item,
    pub n_draws: usize,
    /// Offers of the draws with a trade motive, sorted.
    pub offers: Vec<f64>,
    /// `P(v₂(received) > v₂(other))` by quadrature.
    pub no_offer_probability: f64,
    /// Fraction of draws without a trade motive.
    pub no_offer_fraction: f64,
    /// No draw had a trade motive.
    pub degenerate: bool,
}

impl OfferDistribution {
    /// `T(s) = P(t < s)` over the offers made.
    pub fn cdf(&self, s: f64) -> f64 {
        if self.offers.is_empty() {
            return 0.0;
        }
        self.offers.partition_point(|&t| t < s) as f64 / self.offers.len() as f64
    }
}

fn sample_offers(
    game: &TwoAgentGame,
    received: Item,
    n_draws: usize,
    seed: u64,
) -> Result<(Vec<Option<f64>>, OfferSolver)> {
    if n_draws == 0 {
        return Err(Error::arg("n_draws must be ≥ 1"));
    }
    let solver = game.solver(received)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (f_want, f_hold) = (game.f2(received.other()), game.f2(received));
    let draws: Vec<(f64, f64)> = (0..n_draws)
        .map(|_| {
            let want = f_want.sample(&mut rng);
            let hold = f_hold.sample(&mut rng);
            (want, hold)
        })
        .collect();
    let offers = draws
        .par_iter()
        .map(|&(want, hold)| (want > hold).then(|| solver.best_offer(want - hold).0))
        .collect();
    Ok((offers, solver))
}

/// Distribution of agent 2's offer when it holds `received`, from
/// `n_draws` seeded draws of its values.
pub fn offer_distribution(
    game: &TwoAgentGame,
    received: Item,
    n_draws: usize,
    seed: u64,
) -> Result<OfferDistribution> {
    let (draws, _) = sample_offers(game, received, n_draws, seed)?;
    let mut offers: Vec<f64> = draws.iter().flatten().copied().collect();
    offers.sort_by(f64::total_cmp);
    Ok(OfferDistribution {
        received,
        n_draws,
        no_offer_fraction: (n_draws - offers.len()) as f64 / n_draws as f64,
        degenerate: offers.is_empty(),
        // P(v₂(hold) ≥ v₂(want)), the same integral as acceptance at t = 0.
        no_offer_probability: acceptance(game.f2(received.other()), game.f2(received), 0.0),
        offers,
    })
}

/// Agent 1's expected utility from each first pick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstMoverReport {
    pub eu_choose_a: f64,
    pub eu_choose_b: f64,
    pub se_choose_a: f64,
    pub se_choose_b: f64,
    pub best_choice: Item,
}

/// Monte Carlo mean and standard error.
fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Agent 1's expected utility from picking `pick`, assembled from the
/// no-offer probability and the offer distribution:
/// `q·v(pick) + (1 − q)·[v(pick)·T(s) + E[v(other) + t | t ≥ s]·(1 − T(s))]`
/// with `s = v(pick) − v(other)`.
fn eu_from_offers(v_pick: f64, v_other: f64, dist: &OfferDistribution) -> (f64, f64) {
    let q = dist.no_offer_fraction;
    let s = v_pick - v_other;
    let reject = dist.cdf(s);
    let accepted = &dist.offers[dist.offers.partition_point(|&t| t < s)..];
    let cond = if accepted.is_empty() {
        0.0
    } else {
        v_other + accepted.iter().sum::<f64>() / accepted.len() as f64
    };
    let eu = q * v_pick + (1.0 - q) * (v_pick * reject + cond * (1.0 - reject));
    // Per-draw payoffs for the standard error.
    let payoffs: Vec<f64> = dist
        .offers
        .iter()
        .map(|&t| if t >= s { v_other + t } else { v_pick })
        .chain(std::iter::repeat_n(
            v_pick,
            dist.n_draws - dist.offers.len(),
        ))
        .collect();
    (eu, mean_se(&payoffs).1)
}

/// Agent 1's expected utility from each first pick given its values
/// `v1a`, `v1b`.
pub fn first_mover_expected_utility(
    v1a: f64,
    v1b: f64,
    game: &TwoAgentGame,
    n_draws: usize,
    seed: u64,
) -> Result<FirstMoverReport> {
    check_finite("v1a", v1a)?;
    check_finite("v1b", v1b)?;
    // Picking A leaves agent 2 with B, and vice versa.
    let after_a = offer_distribution(game, Item::B, n_draws, seed)?;
    let after_b = offer_distribution(game, Item::A, n_draws, seed.wrapping_add(1))?;
    let (eu_a, se_a) = eu_from_offers(v1a, v1b, &after_a);
    let (eu_b, se_b) = eu_from_offers(v1b, v1a, &after_b);
    Ok(FirstMoverReport {
        eu_choose_a: eu_a,
        eu_choose_b: eu_b,
        se_choose_a: se_a,
        se_choose_b: se_b,
        best_choice: if eu_b > eu_a { Item::B } else { Item::A },
    })
}

/// Plays the whole game `n_draws` times for a fixed first pick and returns
/// the mean payoff to agent 1 and its standard error.
pub fn simulate_first_mover(
    v1a: f64,
    v1b: f64,
    pick: Item,
    game: &TwoAgentGame,
    n_draws: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n_draws == 0 {
        return Err(Error::arg("n_draws must be ≥ 1"));
    }
    let solver = game.solver(pick.other())?;
    let (v_pick, v_other) = match pick {
        Item::A => (v1a, v1b),
        Item::B => (v1b, v1a),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut payoffs = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let v2a = game.f2a.sample(&mut rng);
        let v2b = game.f2b.sample(&mut rng);
        let (want, hold) = match pick {
            Item::A => (v2a, v2b),
            Item::B => (v2b, v2a),
        };
        let payoff = if want > hold {
            let t = solver.best_offer(want - hold).0;
            if v_other + t >= v_pick {
                v_other + t
            } else {
                v_pick
            }
        } else {
            v_pick
        };
        payoffs.push(payoff);
    }
    Ok(mean_se(&payoffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u01() -> ValueDistribution {
        ValueDistribution::uniform(0.0, 1.0).unwrap()
    }

    #[test]
    fn acceptance_uniform() {
        let u = u01();
        assert!((acceptance_probability(&u, &u, 0.0).unwrap() - 0.5).abs() < 1e-9);
        assert!((acceptance_probability(&u, &u, 0.5).unwrap() - 0.875).abs() < 1e-9);
        assert_eq!(acceptance_probability(&u, &u, 1.0).unwrap(), 1.0);
        assert_eq!(acceptance_probability(&u, &u, 3.0).unwrap(), 1.0);
        assert_eq!(acceptance_probability(&u, &u, -1.5).unwrap(), 0.0);
        assert!(acceptance_probability(&u, &u, f64::NAN).is_err());
    }

    #[test]
    fn acceptance_with_points() {
        let p = ValueDistribution::point(0.3).unwrap();
        let u = u01();
        // Holds a 0.3 item, receives uniform: accept iff U + t ≥ 0.3.
        assert!((acceptance(&p, &u, 0.1) - 0.8).abs() < 1e-12);
        // Holds uniform, receives 0.3: accept iff 0.3 + t ≥ U.
        assert!((acceptance(&u, &p, 0.1) - 0.4).abs() < 1e-12);
        let q = ValueDistribution::point(0.5).unwrap();
        assert_eq!(acceptance(&p, &q, -0.2), 1.0);
        assert_eq!(acceptance(&p, &q, -0.21), 0.0);
    }

    #[test]
    fn truncated_normal_basics() {
        let d = ValueDistribution::truncated_normal(0.5, 0.2, 0.0, 1.0).unwrap();
        assert_eq!(d.cdf(0.0), 0.0);
        assert_eq!(d.cdf(1.0), 1.0);
        assert!((d.cdf(0.5) - 0.5).abs() < 1e-12);
        assert!((d.cdf(d.quantile(0.3)) - 0.3).abs() < 1e-9);
        assert!((acceptance(&d, &d, 0.0) - 0.5).abs() < 1e-8);
        assert!(ValueDistribution::truncated_normal(0.5, -1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn payoff_examples() {
        let u = u01();
        assert_eq!(seller_expected_payoff(0.3, 0.3, &u, &u, 0.0).unwrap(), 0.3);
        assert!((seller_expected_payoff(0.9, 0.1, &u, &u, 1.0).unwrap() + 0.1).abs() < 1e-12);
        assert!((seller_expected_payoff(0.9, 0.1, &u, &u, 0.0).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn zero_gain_offers_nothing() {
        let solver = OfferSolver::new(u01(), u01(), OfferDomain::NonNegative).unwrap();
        assert!(solver.best_offer(0.0).0.abs() < 1e-4);
        // With negative offers allowed, agent 2 charges for the swap:
        // maximising −t(1+t)²/2 gives t = −1/3.
        let solver = OfferSolver::new(u01(), u01(), OfferDomain::Symmetric).unwrap();
        assert!((solver.best_offer(0.0).0 + 1.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn matches_brute_grid() {
        // Closed form on [0, 1]: π(t) = 0.1 + (0.8 − t)(1 − (1 − t)²/2).
        let pi = |t: f64| 0.1 + (0.8 - t) * (1.0 - (1.0 - t).powi(2) / 2.0);
        let n = 1_000_000;
        let (mut tb, mut vb) = (0.0, pi(0.0));
        for k in 1..=n {
            let t = k as f64 / n as f64;
            if pi(t) > vb {
                tb = t;
                vb = pi(t);
            }
        }
        let u = u01();
        let o = optimal_offer(0.9, 0.1, &u, &u, OfferDomain::NonNegative).unwrap();
        assert!((o.offer - tb).abs() < 1e-4, "{} vs {tb}", o.offer);
        assert!((o.expected_payoff - vb).abs() < 1e-8);
        assert!(matches!(
            optimal_offer(0.1, 0.1, &u, &u, OfferDomain::NonNegative),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn offer_distribution_basics() {
        let game = TwoAgentGame::iid(u01());
        let a = offer_distribution(&game, Item::B, 4000, 9).unwrap();
        let b = offer_distribution(&game, Item::B, 4000, 9).unwrap();
        assert_eq!(a, b);
        assert!((a.no_offer_probability - 0.5).abs() < 1e-9);
        let se = (0.25f64 / 4000.0).sqrt();
        assert!((a.no_offer_fraction - 0.5).abs() < 3.0 * se);
        assert!(a.cdf(-1.0) == 0.0 && a.cdf(2.0) == 1.0);

        let mut never = game;
        never.f2a = ValueDistribution::point(0.0).unwrap();
        never.f2b = ValueDistribution::point(1.0).unwrap();
        let d = offer_distribution(&never, Item::B, 100, 1).unwrap();
        assert!(d.degenerate);
        assert_eq!(d.no_offer_probability, 1.0);
        assert_eq!(d.no_offer_fraction, 1.0);
    }

    #[test]
    fn first_mover_degenerate_opponent() {
        let mut game = TwoAgentGame::iid(u01());
        game.f2a = ValueDistribution::point(0.0).unwrap();
        game.f2b = ValueDistribution::point(1.0).unwrap();
        let r = first_mover_expected_utility(0.7, 0.2, &game, 500, 3).unwrap();
        assert_eq!(r.eu_choose_a, 0.7);
        assert!(r.se_choose_a < 1e-12);
    }

    #[test]
    fn first_mover_matches_game_simulation() {
        let game = TwoAgentGame::iid(u01());
        let n = 20_000;
        let r = first_mover_expected_utility(0.9, 0.2, &game, n, 5).unwrap();
        for (pick, eu, se) in [
            (Item::A, r.eu_choose_a, r.se_choose_a),
            (Item::B, r.eu_choose_b, r.se_choose_b),
        ] {
            let (m, s) = simulate_first_mover(0.9, 0.2, pick, &game, n, 77).unwrap();
            assert!(
                (eu - m).abs() <= 3.0 * (se * se + s * s).sqrt() + 1e-9,
                "{pick:?}: {eu} ± {se} vs {m} ± {s}"
            );
        }
        assert_eq!(r.best_choice, Item::A);
    }

    #[test]
    fn parse_distributions() {
        assert_eq!("uniform:0,1".parse::<ValueDistribution>().unwrap(), u01());
        assert!("uniform:1,0".parse::<ValueDistribution>().is_err());
        assert!("tnormal:0.5,0.1,0,1".parse::<ValueDistribution>().is_ok());
        assert!("point:2".parse::<ValueDistribution>().is_ok());
        assert!("beta:1,2".parse::<ValueDistribution>().is_err());
    }
}
