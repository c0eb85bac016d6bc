//! Solvers and checkers for graphical one-sided matching markets with
//! exchange costs.
//!
//! The crate covers:
//! - the market model with signed per-agent exchange fees ([`market`]);
//! - exact k-stability and core-stability checking by enumeration
//!   ([`stability`]);
//! - a 2-stable solver by potential ascent over pair swaps
//!   ([`local_search`]);
//! - a polynomial-time core-stable solver for non-graphical-equivalent
//!   instances via maximum-weight perfect matching ([`assignment`]);
//! - network coordination games and k-equilibrium checking ([`games`]);
//! - the reductions between games, Local Max-Cut, and markets
//!   ([`reductions`]);
//! - JSON instance files ([`io`]) and seeded generators ([`generate`]).

pub mod assignment;
pub mod fixtures;
pub mod games;
pub mod generate;
pub mod io;
pub mod local_search;
pub mod market;
pub mod reductions;
pub mod stability;

pub use market::{Allocation, CoalitionalExchange, CostSpec, MarketInstance, StabilityReport};
