//! Resource-rent analysis for mining concessions and simulation of
//! least-present-value-of-revenue (LPVR) concessions.
//!
//! * [`data_model`] reads and validates mine and market files.
//! * [`reconstruction`] rebuilds pre-statement years and imputes exploration
//!   investment across mine cohorts.
//! * [`valuation`] holds the discount rate, annual project cash flow, initial
//!   investment and discounting.
//! * [`rent_analysis`] builds present-value rent trajectories, finds the
//!   payback year ("momento x") and values appropriated rent.
//! * [`concession_sim`] runs auctions, equilibrium bids, the concession state
//!   machine, voluntary taxes and expropriation indemnities.
//! * [`cli`] is the command-line front end.

pub mod cli;
pub mod concession_sim;
pub mod data_model;
pub mod error;
pub mod reconstruction;
pub mod rent_analysis;
pub mod valuation;

pub use data_model::{DiscountSpec, MarketSeries, MineDataset, MineYearRecord, Year};
pub use error::Error;
pub use valuation::Rate;
