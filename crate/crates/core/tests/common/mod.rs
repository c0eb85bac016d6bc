//! Independent brute-force oracles, written directly from the definitions.
//!
//! Nothing here calls the library's stability, search, or matching code:
//! utilities are re-derived from the raw instance data, coalitions come
//! from bitmasks, and bijections from recursive permutation generation.
#![allow(dead_code)] // each test binary uses its own subset

use exmarket_core::games::{CoordinationGame, StrategyProfile};
use exmarket_core::market::{Allocation, MarketInstance};

/// Utility computed straight from the definition, walking the edge list.
pub fn oracle_utility(inst: &MarketInstance, assignment: &[usize], agent: usize) -> i64 {
    let mut total = inst.valuation(agent, assignment[agent]);
    for &(i, j, w) in inst.agent_edges() {
        let other = if i == agent {
            j
        } else if j == agent {
            i
        } else {
            continue;
        };
        let (a, b) = (assignment[agent], assignment[other]);
        if inst
            .item_edges()
            .iter()
            .any(|&(x, y)| (x, y) == (a.min(b), a.max(b)))
        {
            total += w;
        }
    }
    total
}

pub fn oracle_potential(inst: &MarketInstance, assignment: &[usize]) -> i64 {
    (0..inst.num_agents())
        .map(|i| inst.valuation(i, assignment[i]) + oracle_utility(inst, assignment, i))
        .sum()
}

/// Every coalitional exchange `(members, images)` with `2 <= |X| <= k`:
/// subsets by increasing bitmask population, images by recursive
/// permutation, fixed points excluded.
pub fn all_exchanges(n: usize, k: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if members.len() < 2 || members.len() > k {
            continue;
        }
        let mut images = Vec::new();
        derangements(&members, &mut vec![false; members.len()], &mut images, &mut out);
    }
    out
}

fn derangements(
    members: &[usize],
    used: &mut Vec<bool>,
    images: &mut Vec<usize>,
    out: &mut Vec<(Vec<usize>, Vec<usize>)>,
) {
    let pos = images.len();
    if pos == members.len() {
        out.push((members.to_vec(), images.clone()));
        return;
    }
    for (idx, &candidate) in members.iter().enumerate() {
        if used[idx] || candidate == members[pos] {
            continue;
        }
        used[idx] = true;
        images.push(candidate);
        derangements(members, used, images, out);
        images.pop();
        used[idx] = false;
    }
}

fn apply(assignment: &[usize], members: &[usize], images: &[usize]) -> Vec<usize> {
    let mut next = assignment.to_vec();
    for (&x, &mx) in members.iter().zip(images) {
        next[x] = assignment[mx];
    }
    next
}

pub fn oracle_is_permissible(
    inst: &MarketInstance,
    assignment: &[usize],
    members: &[usize],
    images: &[usize],
) -> bool {
    let total: i64 = members
        .iter()
        .zip(images)
        .map(|(&x, &mx)| inst.cost(x, assignment[x], assignment[mx]))
        .sum();
    total >= 0
}

pub fn oracle_is_blocking(
    inst: &MarketInstance,
    assignment: &[usize],
    members: &[usize],
    images: &[usize],
) -> bool {
    if !oracle_is_permissible(inst, assignment, members, images) {
        return false;
    }
    let after = apply(assignment, members, images);
    members.iter().all(|&x| {
        let fee = inst.cost(x, assignment[x], after[x]);
        oracle_utility(inst, &after, x) - fee > oracle_utility(inst, assignment, x)
    })
}

/// All blocking exchanges of size at most `k`, via the bitmask walk.
pub fn oracle_blocking(
    inst: &MarketInstance,
    assignment: &[usize],
    k: usize,
) -> Vec<(Vec<usize>, Vec<usize>)> {
    all_exchanges(inst.num_agents(), k)
        .into_iter()
        .filter(|(members, images)| oracle_is_blocking(inst, assignment, members, images))
        .collect()
}

pub fn oracle_is_k_stable(inst: &MarketInstance, alloc: &Allocation, k: usize) -> bool {
    oracle_blocking(inst, alloc.as_slice(), k).is_empty()
}

/// 2-stability by a direct double loop over pairs.
pub fn oracle_is_2_stable(inst: &MarketInstance, alloc: &Allocation) -> bool {
    let n = inst.num_agents();
    let assignment = alloc.as_slice();
    for i in 0..n {
        for j in i + 1..n {
            if oracle_is_blocking(inst, assignment, &[i, j], &[j, i]) {
                return false;
            }
        }
    }
    true
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    permute(&mut (0..n).collect::<Vec<_>>(), 0, &mut out);
    out.sort();
    out
}

fn permute(items: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == items.len() {
        out.push(items.clone());
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, out);
        items.swap(start, i);
    }
}

/// Best perfect-matching weight by factorial enumeration.
pub fn oracle_best_matching_weight(weights: &[Vec<i64>]) -> i64 {
    let n = weights.len();
    all_permutations(n)
        .into_iter()
        .map(|p| (0..n).map(|i| weights[i][p[i]]).sum())
        .max()
        .expect("n >= 1")
}

/// k-equilibrium by scanning every profile of the game: a counter-profile
/// refutes `s` iff the players that changed number at most `k`, at least 1,
/// and all strictly gain.
pub fn oracle_is_k_equilibrium(
    game: &CoordinationGame,
    profile: &StrategyProfile,
    k: usize,
) -> bool {
    for t in game.all_profiles() {
        let changed: Vec<usize> = (0..game.num_players())
            .filter(|&i| t.strategy(i) != profile.strategy(i))
            .collect();
        if changed.is_empty() || changed.len() > k {
            continue;
        }
        if changed
            .iter()
            .all(|&i| game.payoff(&t, i) > game.payoff(profile, i))
        {
            return false;
        }
    }
    true
}
