//! Potential-ascent local search over the pairwise-swap neighborhood.
//!
//! Every accepted step is a permissible blocking pair, and each such pair
//! strictly raises the potential, so the ascent always reaches a 2-stable
//! allocation when no step cap is set.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::market::{Allocation, CoalitionalExchange, MarketInstance};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("random init requires a seed")]
    MissingSeed,
    #[error("seed given but init is not random")]
    UnusedSeed,
    #[error("given initial allocation has wrong size")]
    InitSizeMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Largest potential delta, ties broken by smallest `(i, j)`.
    BestImprovement,
    /// First blocking pair in `(i, j)` lexicographic order.
    FirstImprovement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitMode {
    Identity,
    Given(Allocation),
    Random,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub pivot: PivotRule,
    pub init: InitMode,
    pub seed: Option<u64>,
    pub max_steps: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            pivot: PivotRule::BestImprovement,
            init: InitMode::Identity,
            seed: None,
            max_steps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub step: u64,
    pub i: usize,
    pub j: usize,
    pub potential_before: i64,
    pub potential_after: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchTrace {
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub allocation: Allocation,
    pub trace: SearchTrace,
    /// False only when `max_steps` ran out before reaching 2-stability.
    pub converged: bool,
}

/// Permissible pair swaps available from `alloc`, in `(i, j)` order.
pub fn neighborhood<'a>(
    inst: &'a MarketInstance,
    alloc: &'a Allocation,
) -> impl Iterator<Item = (usize, usize)> + 'a {
    let n = inst.num_agents();
    (0..n).flat_map(move |i| {
        (i + 1..n)
            .filter(move |&j| inst.is_permissible(alloc, &CoalitionalExchange::swap(i, j)))
            .map(move |j| (i, j))
    })
}

/// Ascend on the potential by blocking pair swaps until 2-stable.
pub fn find_2_stable(
    inst: &MarketInstance,
    config: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    let n = inst.num_agents();
    let mut alloc = match &config.init {
        InitMode::Identity => {
            if config.seed.is_some() {
                return Err(SearchError::UnusedSeed);
            }
            Allocation::identity(n)
        }
        InitMode::Given(a) => {
            if config.seed.is_some() {
                return Err(SearchError::UnusedSeed);
            }
            if a.len() != n {
                return Err(SearchError::InitSizeMismatch);
            }
            a.clone()
        }
        InitMode::Random => {
            let seed = config.seed.ok_or(SearchError::MissingSeed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut items: Vec<usize> = (0..n).collect();
            items.shuffle(&mut rng);
            Allocation::new(items).expect("shuffle is a bijection")
        }
    };

    let mut steps = Vec::new();
    let mut step = 0u64;
    loop {
        if let Some(cap) = config.max_steps {
            if step >= cap && pick_step(inst, &alloc, config.pivot).is_some() {
                return Ok(SearchResult {
                    allocation: alloc,
                    trace: SearchTrace { steps },
                    converged: false,
                });
            }
        }
        let Some((i, j)) = pick_step(inst, &alloc, config.pivot) else {
            break;
        };
        step += 1;
        let before = inst.potential(&alloc);
        alloc = alloc.apply(&CoalitionalExchange::swap(i, j));
        let after = inst.potential(&alloc);
        debug_assert!(after > before);
        steps.push(TraceStep {
            step,
            i,
            j,
            potential_before: before,
            potential_after: after,
        });
    }
    Ok(SearchResult {
        allocation: alloc,
        trace: SearchTrace { steps },
        converged: true,
    })
}

/// Next blocking pair under the pivot rule, or `None` at a local optimum.
fn pick_step(inst: &MarketInstance, alloc: &Allocation, pivot: PivotRule) -> Option<(usize, usize)> {
    let n = inst.num_agents();
    let mut best: Option<((usize, usize), i64)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let ex = CoalitionalExchange::swap(i, j);
            if !inst.is_blocking(alloc, &ex) {
                continue;
            }
            match pivot {
                PivotRule::FirstImprovement => return Some((i, j)),
                PivotRule::BestImprovement => {
                    let delta = inst.potential_delta(alloc, &ex);
                    if best.map_or(true, |(_, d)| delta > d) {
                        best = Some(((i, j), delta));
                    }
                }
            }
        }
    }
    best.map(|(pair, _)| pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::market::CostSpec;
    use crate::stability;

    #[test]
    fn fixture_converges_in_one_swap() {
        let inst = fixtures::two_agent_fee_market();
        let config = SearchConfig {
            init: InitMode::Given(Allocation::new(vec![0, 1]).unwrap()),
            ..Default::default()
        };
        let result = find_2_stable(&inst, &config).unwrap();
        assert!(result.converged);
        assert_eq!(result.allocation.as_slice(), &[1, 0]);
        assert_eq!(result.trace.steps.len(), 1);
        assert!(stability::check_k_stable(&inst, &result.allocation, 2)
            .unwrap()
            .stable);
    }

    #[test]
    fn empty_neighborhood_returns_init_unchanged() {
        // Cross costs sum to -2 for every pair, so nothing is permissible.
        let inst = MarketInstance::new(
            3,
            vec![],
            vec![],
            vec![vec![0, 5, 5], vec![5, 0, 5], vec![5, 5, 0]],
            vec![
                CostSpec::Dense(vec![vec![0, -1, -1], vec![-1, 0, -1], vec![-1, -1, 0]]);
                3
            ],
        )
        .unwrap();
        let alloc = Allocation::identity(3);
        assert_eq!(neighborhood(&inst, &alloc).count(), 0);
        let result = find_2_stable(&inst, &SearchConfig::default()).unwrap();
        assert_eq!(result.allocation, alloc);
        assert!(result.trace.steps.is_empty());
    }

    #[test]
    fn neighborhood_filters_by_cost_sum() {
        // Agent 2 is paid 3 per trade; agents 0 and 1 each pay 1. Only pairs
        // involving agent 2 have a non-negative cost sum.
        let pay = CostSpec::Dense(vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        let earn = CostSpec::Dense(vec![vec![0, -3, -3], vec![-3, 0, -3], vec![-3, -3, 0]]);
        let inst = MarketInstance::new(
            3,
            vec![],
            vec![],
            vec![vec![0; 3]; 3],
            vec![pay.clone(), pay, earn],
        )
        .unwrap();
        // Pair {0,1}: 1 + 1 = 2 >= 0; pairs with 2: 1 - 3 = -2 < 0.
        let pairs: Vec<_> = neighborhood(&inst, &Allocation::identity(3)).collect();
        assert_eq!(pairs, vec![(0, 1)]);
    }

    #[test]
    fn trivial_costs_make_all_pairs_permissible() {
        let inst = MarketInstance::new(
            4,
            vec![],
            vec![],
            vec![vec![0; 4]; 4],
            vec![CostSpec::Trivial; 4],
        )
        .unwrap();
        assert_eq!(neighborhood(&inst, &Allocation::identity(4)).count(), 6);
    }

    #[test]
    fn fixture_neighborhood_has_one_pair_from_either_allocation() {
        let inst = fixtures::two_agent_fee_market();
        for alloc in [
            Allocation::new(vec![0, 1]).unwrap(),
            Allocation::new(vec![1, 0]).unwrap(),
        ] {
            assert_eq!(neighborhood(&inst, &alloc).count(), 1);
        }
    }

    #[test]
    fn seed_rules_enforced() {
        let inst = fixtures::two_agent_fee_market();
        let random_no_seed = SearchConfig {
            init: InitMode::Random,
            ..Default::default()
        };
        assert_eq!(
            find_2_stable(&inst, &random_no_seed).unwrap_err(),
            SearchError::MissingSeed
        );
        let identity_with_seed = SearchConfig {
            seed: Some(1),
            ..Default::default()
        };
        assert_eq!(
            find_2_stable(&inst, &identity_with_seed).unwrap_err(),
            SearchError::UnusedSeed
        );
    }

    #[test]
    fn max_steps_exhaustion_is_reported() {
        let inst = fixtures::two_agent_fee_market();
        let config = SearchConfig {
            init: InitMode::Given(Allocation::new(vec![0, 1]).unwrap()),
            max_steps: Some(0),
            ..Default::default()
        };
        let result = find_2_stable(&inst, &config).unwrap();
        assert!(!result.converged);
        assert_eq!(result.allocation.as_slice(), &[0, 1]);
    }
}
