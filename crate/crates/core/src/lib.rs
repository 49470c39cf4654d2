//! Random serial dictatorship (RSD) extended with monetary transfers.
//!
//! The crate is organised around a handful of modules:
//!
//! * [`market`] holds the shared domain types: instances, allocations,
//!   transfer profiles, trade logs and welfare accounting.
//! * [`mechanisms`] runs serial dictatorship, RSD followed by top trading
//!   cycles, ex-post competitive-equilibrium transfers, ex-post pairwise
//!   transfers and interim transfers.
//! * [`equilibrium`] solves the assignment problem, computes supporting
//!   prices and provides brute-force oracles.
//! * [`strategic`] is the two-agent, two-item Bayesian analysis.
//! * [`simulate`] is the housing-market simulation with budgets and
//!   transaction costs.
//! * [`scenarios`] and [`suite`] hold the built-in example markets and the
//!   acceptance criteria runner.

pub mod equilibrium;
pub mod error;
pub mod market;
pub mod mechanisms;
pub mod scenarios;
pub mod simulate;
pub mod strategic;
pub mod suite;

pub use error::{Error, Result};
pub use market::{
    AgentId, Allocation, ItemId, Market, MarketInstance, NumericMode, Outcome, PickOrder,
    TradeLog, TradeRecord, TransferProfile,
};
