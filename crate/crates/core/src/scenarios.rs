//! Small hand-built markets used by tests, the CLI and the acceptance suite.
//!
//! Agents and items are 0-based; the comments give the 1-based room labels
//! the examples are usually told with.

use crate::error::{Error, Result};
use crate::market::{ItemId, MarketInstance};

/// Two agents, items x and y: v₁ = (2, 1), v₂ = (10, 1), budgets 5 each.
pub fn two_agent_swap() -> MarketInstance {
    MarketInstance::from_int_rows(&[&[2, 1], &[10, 1]], &[5, 5]).expect("static instance")
}

/// Agents A, B, C and rooms 1–3. Pairwise stable but not optimal when A
/// picks first, then C, then B.
pub fn stable_but_inefficient() -> MarketInstance {
    MarketInstance::from_int_rows(&[&[5, 0, 10], &[0, 4, 0], &[-10, 0, 5]], &[0, 0, 0])
        .expect("static instance")
}

/// Four agents and rooms. A values room 1 at 20, B values room 2 at 200,
/// every other value is 10. Budgets A: 0, B: 500.
pub fn resale_manipulation() -> MarketInstance {
    MarketInstance::from_int_rows(
        &[
            &[20, 10, 10, 10],
            &[10, 200, 10, 10],
            &[10, 10, 10, 10],
            &[10, 10, 10, 10],
        ],
        &[0, 500, 0, 0],
    )
    .expect("static instance")
}

/// Room 1 in [`resale_manipulation`].
pub const RESALE_A_FAVOURITE: ItemId = 0;
/// Room 2 in [`resale_manipulation`].
pub const RESALE_B_FAVOURITE: ItemId = 1;
/// Room 3 in [`resale_manipulation`].
pub const RESALE_OTHER_ROOM: ItemId = 2;

/// Agents A, B, C and rooms 1–3. Interim trading stops one swap short of
/// the optimum.
pub fn interim_shortfall() -> MarketInstance {
    MarketInstance::from_int_rows(&[&[10, 9, 0], &[0, 10, 9], &[4, 0, 1]], &[0, 0, 0])
        .expect("static instance")
}

/// [`interim_shortfall`] plus agent D, who values room 3 at 100, and a room 4
/// nobody values.
pub fn interim_with_latecomer() -> MarketInstance {
    MarketInstance::from_int_rows(
        &[&[10, 9, 0, 0], &[0, 10, 9, 0], &[4, 0, 1, 0], &[0, 0, 100, 0]],
        &[0, 0, 0, 0],
    )
    .expect("static instance")
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 5] = [
    "two-agent-swap",
    "stable-inefficient",
    "resale",
    "interim-shortfall",
    "interim-latecomer",
];

pub fn by_name(name: &str) -> Result<MarketInstance> {
    match name {
        "two-agent-swap" => Ok(two_agent_swap()),
        "stable-inefficient" => Ok(stable_but_inefficient()),
        "resale" => Ok(resale_manipulation()),
        "interim-shortfall" => Ok(interim_shortfall()),
        "interim-latecomer" => Ok(interim_with_latecomer()),
        other => Err(Error::arg(format!(
            "unknown scenario '{other}'; expected one of {}",
            NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::Market;

    #[test]
    fn every_name_resolves() {
        for name in NAMES {
            let m = by_name(name).unwrap();
            assert_eq!(m.n_agents(), m.budgets().len());
        }
        assert!(by_name("no-such-market").is_err());
    }
}
