//! Seeded random instance generators for experiments and tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::games::CoordinationGame;
use crate::market::{CostSpec, MarketInstance};
use crate::reductions::MaxCutInstance;

/// Random coordination game: every player draws a non-empty subset of
/// `[1, strategies]`; edges are sampled under the degree cap.
pub fn random_game(
    players: usize,
    strategies: u32,
    max_degree: usize,
    seed: u64,
) -> CoordinationGame {
    assert!(players >= 1 && strategies >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = random_edges(players, max_degree, &mut rng);
    let strategy_sets = (0..players)
        .map(|_| {
            let size = rng.random_range(1..=strategies);
            let mut universe: Vec<u32> = (1..=strategies).collect();
            universe.shuffle(&mut rng);
            universe.truncate(size as usize);
            universe
        })
        .collect();
    CoordinationGame::new(players, edges, strategies, strategy_sets)
        .expect("generated game is valid")
}

/// Random weighted graph with bounded degree and weights in `[1, max_weight]`.
pub fn random_maxcut(
    vertices: usize,
    max_degree: usize,
    max_weight: i64,
    seed: u64,
) -> MaxCutInstance {
    assert!(vertices >= 1 && max_weight >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = random_edges(vertices, max_degree, &mut rng)
        .into_iter()
        .map(|(a, b)| (a, b, rng.random_range(1..=max_weight)))
        .collect();
    MaxCutInstance::new(vertices, edges).expect("generated graph is valid")
}

fn random_edges(n: usize, max_degree: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    candidates.shuffle(rng);
    let mut degree = vec![0usize; n];
    let mut edges = Vec::new();
    for (a, b) in candidates {
        if degree[a] < max_degree && degree[b] < max_degree && rng.random_bool(0.6) {
            degree[a] += 1;
            degree[b] += 1;
            edges.push((a, b));
        }
    }
    edges
}

/// Random market: independent agent/item edges with probability 1/2, agent
/// edge weights in `[1, max_weight]`, valuations in `[0, max_valuation]`,
/// dense costs in `[-cost_bound, cost_bound]`.
pub fn random_market(
    n: usize,
    max_weight: i64,
    max_valuation: i64,
    cost_bound: i64,
    seed: u64,
) -> MarketInstance {
    assert!(n >= 1 && max_weight >= 1 && max_valuation >= 0 && cost_bound >= 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agent_edges = Vec::new();
    let mut item_edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(0.5) {
                agent_edges.push((a, b, rng.random_range(1..=max_weight)));
            }
            if rng.random_bool(0.5) {
                item_edges.push((a, b));
            }
        }
    }
    let valuations = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| rng.random_range(0..=max_valuation))
                .collect()
        })
        .collect();
    let costs = (0..n)
        .map(|_| {
            let mut matrix = vec![vec![0i64; n]; n];
            for (a, row) in matrix.iter_mut().enumerate() {
                for (b, cell) in row.iter_mut().enumerate() {
                    if a != b {
                        *cell = rng.random_range(-cost_bound..=cost_bound);
                    }
                }
            }
            CostSpec::Dense(matrix)
        })
        .collect();
    MarketInstance::new(n, agent_edges, item_edges, valuations, costs)
        .expect("generated market is valid")
}

/// Non-graphical market (no edges at all) with random valuations and costs.
pub fn random_nongraphical_market(
    n: usize,
    max_valuation: i64,
    cost_bound: i64,
    seed: u64,
) -> MarketInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let valuations = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| rng.random_range(0..=max_valuation))
                .collect()
        })
        .collect();
    let costs = (0..n)
        .map(|_| {
            let mut matrix = vec![vec![0i64; n]; n];
            for (a, row) in matrix.iter_mut().enumerate() {
                for (b, cell) in row.iter_mut().enumerate() {
                    if a != b {
                        *cell = rng.random_range(-cost_bound..=cost_bound);
                    }
                }
            }
            CostSpec::Dense(matrix)
        })
        .collect();
    MarketInstance::new(n, vec![], vec![], valuations, costs)
        .expect("generated market is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_game(4, 3, 3, 7), random_game(4, 3, 3, 7));
        assert_eq!(random_maxcut(6, 5, 7, 7), random_maxcut(6, 5, 7, 7));
        assert_eq!(random_market(5, 10, 10, 5, 7), random_market(5, 10, 10, 5, 7));
    }

    #[test]
    fn degree_cap_respected() {
        for seed in 0..20 {
            let g = random_maxcut(8, 5, 7, seed);
            assert!(g.max_degree() <= 5);
        }
    }
}
