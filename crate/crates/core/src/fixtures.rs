//! Small hand-built instances shared by tests and examples.

use crate::market::{CostSpec, MarketInstance};

/// Two agents, two items, no graphs. Both agents prefer item 0; agent 0 is
/// paid 2 per trade while agent 1 pays 2. Serial dictatorship starting from
/// agent 0 yields an unstable allocation here.
pub fn two_agent_fee_market() -> MarketInstance {
    MarketInstance::new(
        2,
        vec![],
        vec![],
        vec![vec![10, 9], vec![8, 5]],
        vec![
            CostSpec::Dense(vec![vec![0, -2], vec![-2, 0]]),
            CostSpec::Dense(vec![vec![0, 2], vec![2, 0]]),
        ],
    )
    .expect("fixture is valid")
}
