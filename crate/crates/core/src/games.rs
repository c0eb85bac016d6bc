//! Network coordination games: payoff evaluation and exact k-equilibrium
//! checking by coalition/deviation enumeration.
//!
//! The payoff of a player is the number of incident edges whose endpoints
//! play the same strategy. A deviation must change the strategy of every
//! coalition member; the enumeration order is coalitions lexicographic,
//! then target sub-profiles in mixed-radix lexicographic order.

use itertools::Itertools;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("game needs at least one player")]
    Empty,
    #[error("player index {0} out of range ({1} players)")]
    PlayerOutOfRange(usize, usize),
    #[error("self-loop on player {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("strategy set of player {0} is empty")]
    EmptyStrategySet(usize),
    #[error("strategy {1} of player {0} outside the universe [1, {2}]")]
    StrategyOutOfUniverse(usize, u32, u32),
    #[error("profile entry {1} for player {0} is not in the player's strategy set")]
    StrategyNotAvailable(usize, u32),
    #[error("profile length {0} does not match player count {1}")]
    ProfileLength(usize, usize),
    #[error("k = {0} out of range; expected 1 <= k <= {1}")]
    KOutOfRange(usize, usize),
}

/// A network coordination game: a simple graph, a strategy universe `[1, m]`
/// and a non-empty strategy set per player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinationGame {
    num_players: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    universe: u32,
    strategy_sets: Vec<Vec<u32>>,
}

impl CoordinationGame {
    pub fn new(
        num_players: usize,
        edges: Vec<(usize, usize)>,
        universe: u32,
        strategy_sets: Vec<Vec<u32>>,
    ) -> Result<Self, GameError> {
        if num_players == 0 {
            return Err(GameError::Empty);
        }
        let mut adjacency = vec![Vec::new(); num_players];
        let mut canon = Vec::with_capacity(edges.len());
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in &edges {
            if a >= num_players {
                return Err(GameError::PlayerOutOfRange(a, num_players));
            }
            if b >= num_players {
                return Err(GameError::PlayerOutOfRange(b, num_players));
            }
            if a == b {
                return Err(GameError::SelfLoop(a));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(GameError::DuplicateEdge(key.0, key.1));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
            canon.push(key);
        }
        canon.sort_unstable();
        if strategy_sets.len() != num_players {
            return Err(GameError::ProfileLength(strategy_sets.len(), num_players));
        }
        let mut sets = Vec::with_capacity(num_players);
        for (i, set) in strategy_sets.into_iter().enumerate() {
            let mut set: Vec<u32> = set.into_iter().unique().collect();
            set.sort_unstable();
            if set.is_empty() {
                return Err(GameError::EmptyStrategySet(i));
            }
            for &s in &set {
                if s == 0 || s > universe {
                    return Err(GameError::StrategyOutOfUniverse(i, s, universe));
                }
            }
            sets.push(set);
        }
        Ok(CoordinationGame {
            num_players,
            edges: canon,
            adjacency,
            universe,
            strategy_sets: sets,
        })
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    /// Sorted ascending strategy set of a player.
    pub fn strategy_set(&self, player: usize) -> &[u32] {
        &self.strategy_sets[player]
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn validate_profile(&self, profile: &StrategyProfile) -> Result<(), GameError> {
        if profile.len() != self.num_players {
            return Err(GameError::ProfileLength(profile.len(), self.num_players));
        }
        for (i, &s) in profile.strategies().iter().enumerate() {
            if !self.strategy_sets[i].contains(&s) {
                return Err(GameError::StrategyNotAvailable(i, s));
            }
        }
        Ok(())
    }

    /// Number of incident edges whose endpoints coordinate.
    pub fn payoff(&self, profile: &StrategyProfile, player: usize) -> i64 {
        self.adjacency[player]
            .iter()
            .filter(|&&j| profile.strategy(j) == profile.strategy(player))
            .count() as i64
    }

    /// All profiles of the game, mixed-radix lexicographic.
    pub fn all_profiles(&self) -> impl Iterator<Item = StrategyProfile> + '_ {
        self.strategy_sets
            .iter()
            .map(|set| set.iter().copied())
            .multi_cartesian_product()
            .map(StrategyProfile::from_vec)
    }
}

/// One chosen strategy per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyProfile {
    strategies: Vec<u32>,
}

impl StrategyProfile {
    pub fn from_vec(strategies: Vec<u32>) -> Self {
        StrategyProfile { strategies }
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn strategy(&self, player: usize) -> u32 {
        self.strategies[player]
    }

    pub fn strategies(&self) -> &[u32] {
        &self.strategies
    }
}

/// Verdict of a k-equilibrium check, with the first profitable deviation as
/// witness when the profile is not an equilibrium.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationReport {
    pub is_equilibrium: bool,
    pub k: usize,
    pub witness: Option<(Vec<usize>, StrategyProfile)>,
}

/// Decides whether `profile` is a k-equilibrium. Every coalition member must
/// change strategy in a candidate deviation, and all must strictly gain.
pub fn check_k_equilibrium(
    game: &CoordinationGame,
    profile: &StrategyProfile,
    k: usize,
) -> Result<DeviationReport, GameError> {
    game.validate_profile(profile)?;
    let n = game.num_players();
    if k < 1 || k > n {
        return Err(GameError::KOutOfRange(k, n));
    }
    let witness = profitable_deviations(game, profile, k).next();
    Ok(DeviationReport {
        is_equilibrium: witness.is_none(),
        k,
        witness,
    })
}

/// All profitable deviations with coalition size at most `k`, in
/// deterministic order.
pub fn profitable_deviations<'a>(
    game: &'a CoordinationGame,
    profile: &'a StrategyProfile,
    k: usize,
) -> impl Iterator<Item = (Vec<usize>, StrategyProfile)> + 'a {
    let n = game.num_players();
    (1..=k.min(n)).flat_map(move |size| {
        (0..n).combinations(size).flat_map(move |coalition| {
            let alternatives: Vec<Vec<u32>> = coalition
                .iter()
                .map(|&i| {
                    game.strategy_set(i)
                        .iter()
                        .copied()
                        .filter(|&s| s != profile.strategy(i))
                        .collect()
                })
                .collect();
            let coalition2 = coalition.clone();
            alternatives
                .into_iter()
                .map(|alts| alts.into_iter())
                .multi_cartesian_product()
                .filter_map(move |choice| {
                    let mut target = profile.strategies().to_vec();
                    for (&i, &s) in coalition2.iter().zip(&choice) {
                        target[i] = s;
                    }
                    let target = StrategyProfile::from_vec(target);
                    let profitable = coalition2
                        .iter()
                        .all(|&i| game.payoff(&target, i) > game.payoff(profile, i));
                    if profitable {
                        Some((coalition2.clone(), target))
                    } else {
                        None
                    }
                })
        })
    })
}
