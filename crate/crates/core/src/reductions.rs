//! Executable reductions: coordination game -> market, equilibrium-check
//! instance -> stability-check instance without costs, and Local Max-Cut ->
//! market, together with profile/allocation converters and cut recovery.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::games::{CoordinationGame, GameError, StrategyProfile};
use crate::market::{Allocation, CostSpec, MarketError, MarketInstance};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("allocation is not valid: agent {agent} holds an item outside its block")]
    InvalidAllocation { agent: usize },
    #[error("allocation length {0} does not match the reduced market ({1} agents)")]
    AllocationLength(usize, usize),
    #[error("max-cut instance needs at least one vertex")]
    EmptyGraph,
    #[error("vertex index {0} out of range ({1} vertices)")]
    VertexOutOfRange(usize, usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("edge {{{0}, {1}}} has non-positive weight {2}")]
    NonPositiveWeight(usize, usize, i64),
    #[error("cut assignment length {0} does not match vertex count {1}")]
    CutLength(usize, usize),
    #[error("cut assignment entries must be 0 or 1")]
    CutValue,
}

/// Bookkeeping emitted alongside a game-reduced market: item labels and
/// blocks, agent roles, and the gap constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameReductionMap {
    pub num_players: usize,
    /// `10 * max(1, max degree)`; even, and at least 10.
    pub delta: i64,
    /// Strategy carried by each item (the label function).
    pub item_label: Vec<u32>,
    /// Player owning each item's block.
    pub item_owner: Vec<usize>,
    /// `A_i`: item indices per player, ascending strategy order.
    pub item_blocks: Vec<Vec<usize>>,
    /// `x_i`: the non-dummy agent of each player.
    pub player_agents: Vec<usize>,
    /// `D_i`: dummy agents per player, in superscript order.
    pub dummy_agents: Vec<Vec<usize>>,
}

impl GameReductionMap {
    /// Player block that `agent` belongs to.
    pub fn agent_owner(&self, agent: usize) -> usize {
        if let Some(i) = self.player_agents.iter().position(|&x| x == agent) {
            return i;
        }
        self.dummy_agents
            .iter()
            .position(|ds| ds.contains(&agent))
            .expect("agent belongs to some block")
    }
}

fn gap_constant(game: &CoordinationGame) -> i64 {
    // The construction's strict inequalities need a positive gap even on
    // edgeless games, hence the floor of one.
    10 * (game.max_degree().max(1) as i64)
}

fn block_cost_table(delta: i64, num_players: usize, own_block_rate: i64) -> [[i64; 2]; 2] {
    // Indexed by (source in own block, target in own block).
    [
        [-delta / 2, delta / 2],
        [-(num_players as i64) * delta, own_block_rate],
    ]
}

/// Reduction from Exist-k-Equilibrium to Exist-2k-Stable-Allocation: one
/// item per (player, strategy), one agent per player plus `|S_i| - 1`
/// dummies, items adjacent iff equally labeled, game edges at weight 2.
pub fn reduce_game_to_market(
    game: &CoordinationGame,
) -> (MarketInstance, GameReductionMap) {
    let v = game.num_players();
    let delta = gap_constant(game);

    let mut item_label = Vec::new();
    let mut item_owner = Vec::new();
    let mut item_blocks = Vec::with_capacity(v);
    for i in 0..v {
        let mut block = Vec::new();
        for &s in game.strategy_set(i) {
            block.push(item_label.len());
            item_label.push(s);
            item_owner.push(i);
        }
        item_blocks.push(block);
    }
    let num_items = item_label.len();

    let mut player_agents = Vec::with_capacity(v);
    let mut dummy_agents = Vec::with_capacity(v);
    let mut agent_block = Vec::with_capacity(num_items);
    for i in 0..v {
        player_agents.push(agent_block.len());
        agent_block.push(i);
        let mut dummies = Vec::new();
        for _ in 1..game.strategy_set(i).len() {
            dummies.push(agent_block.len());
            agent_block.push(i);
        }
        dummy_agents.push(dummies);
    }
    let n = agent_block.len();
    debug_assert_eq!(n, num_items);

    let agent_edges: Vec<(usize, usize, i64)> = game
        .edges()
        .iter()
        .map(|&(a, b)| (player_agents[a], player_agents[b], 2))
        .collect();

    let mut item_edges = Vec::new();
    for a in 0..num_items {
        for b in a + 1..num_items {
            if item_label[a] == item_label[b] {
                item_edges.push((a, b));
            }
        }
    }

    let mut valuations = Vec::with_capacity(n);
    let mut costs = Vec::with_capacity(n);
    for (agent, &owner) in agent_block.iter().enumerate() {
        let row: Vec<i64> = (0..num_items)
            .map(|a| if item_owner[a] == owner { delta } else { 0 })
            .collect();
        valuations.push(row);
        let own_rate = if player_agents[owner] == agent { 1 } else { -1 };
        let in_block: Vec<bool> = (0..num_items).map(|a| item_owner[a] == owner).collect();
        let spec = CostSpec::Partitioned {
            labels: in_block,
            table: block_cost_table(delta, v, own_rate),
        };
        costs.push(CostSpec::Dense(spec.to_dense(num_items)));
    }

    let inst = MarketInstance::new(n, agent_edges, item_edges, valuations, costs)
        .expect("reduced market is well-formed");
    let map = GameReductionMap {
        num_players: v,
        delta,
        item_label,
        item_owner,
        item_blocks,
        player_agents,
        dummy_agents,
    };
    (inst, map)
}

/// Allocation encoding a strategy profile: `x_i` takes its chosen item and
/// the dummies absorb the remaining items of the block by rank order.
pub fn profile_to_allocation(
    game: &CoordinationGame,
    map: &GameReductionMap,
    profile: &StrategyProfile,
) -> Result<Allocation, ReductionError> {
    game.validate_profile(profile)?;
    let n: usize = map.item_blocks.iter().map(Vec::len).sum();
    let mut assignment = vec![usize::MAX; n];
    for i in 0..map.num_players {
        let set = game.strategy_set(i);
        let rank = set
            .iter()
            .position(|&s| s == profile.strategy(i))
            .expect("validated profile")
            + 1; // 1-based, matching rank_i
        assignment[map.player_agents[i]] = map.item_blocks[i][rank - 1];
        for (idx, &dummy) in map.dummy_agents[i].iter().enumerate() {
            let k = idx + 1; // dummy superscript
            let strategy_pos = if k < rank { k - 1 } else { k };
            assignment[dummy] = map.item_blocks[i][strategy_pos];
        }
    }
    Ok(Allocation::new(assignment)?)
}

/// Reads the profile back off a valid allocation: `s(i) = f(pi(x_i))`.
/// Rejects allocations where any agent holds an item outside its block.
pub fn allocation_to_profile(
    map: &GameReductionMap,
    alloc: &Allocation,
) -> Result<StrategyProfile, ReductionError> {
    let n = map.item_owner.len();
    if alloc.len() != n {
        return Err(ReductionError::AllocationLength(alloc.len(), n));
    }
    for i in 0..map.num_players {
        for &agent in std::iter::once(&map.player_agents[i]).chain(&map.dummy_agents[i]) {
            if map.item_owner[alloc.item_of(agent)] != i {
                return Err(ReductionError::InvalidAllocation { agent });
            }
        }
    }
    let strategies = map
        .player_agents
        .iter()
        .map(|&x| map.item_label[alloc.item_of(x)])
        .collect();
    Ok(StrategyProfile::from_vec(strategies))
}

/// Output of the equilibrium-check to stability-check reduction.
#[derive(Debug, Clone)]
pub struct CheckStableReduction {
    pub market: MarketInstance,
    pub allocation: Allocation,
    /// Check the allocation at this stability level (`2k`).
    pub stability_level: usize,
    pub map: GameReductionMap,
}

/// Reduction from Check-Equilibrium to Check-Stable-Allocation without
/// exchange costs: same graphs as [`reduce_game_to_market`], all cost
/// functions trivial, and each dummy of player `i` values only the item the
/// profile picks for `i`.
pub fn reduce_check_instance(
    game: &CoordinationGame,
    profile: &StrategyProfile,
    k: usize,
) -> Result<CheckStableReduction, ReductionError> {
    game.validate_profile(profile)?;
    let v = game.num_players();
    if k < 1 || k > v {
        return Err(ReductionError::Game(GameError::KOutOfRange(k, v)));
    }
    let (costly, map) = reduce_game_to_market(game);
    let n = costly.num_agents();
    let num_items = n;

    let mut valuations = Vec::with_capacity(n);
    for i in 0..v {
        // x_i keeps the block valuation.
        valuations.push(
            (0..num_items)
                .map(|a| if map.item_owner[a] == i { map.delta } else { 0 })
                .collect::<Vec<i64>>(),
        );
        let chosen = chosen_item(game, &map, profile, i);
        for _ in &map.dummy_agents[i] {
            let row: Vec<i64> = (0..num_items)
                .map(|a| if a == chosen { map.delta } else { 0 })
                .collect();
            valuations.push(row);
        }
    }

    let market = MarketInstance::new(
        n,
        costly.agent_edges().to_vec(),
        costly.item_edges().to_vec(),
        valuations,
        vec![CostSpec::Trivial; n],
    )?;
    let allocation = profile_to_allocation(game, &map, profile)?;
    // No coalition exceeds n members, so 2k-stability coincides with
    // n-stability whenever 2k > n; clamp so the level is always checkable.
    let stability_level = (2 * k).min(n).max(2);
    Ok(CheckStableReduction {
        market,
        allocation,
        stability_level,
        map,
    })
}

fn chosen_item(
    game: &CoordinationGame,
    map: &GameReductionMap,
    profile: &StrategyProfile,
    player: usize,
) -> usize {
    let pos = game
        .strategy_set(player)
        .iter()
        .position(|&s| s == profile.strategy(player))
        .expect("validated profile");
    map.item_blocks[player][pos]
}

/// An edge-weighted graph with positive integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxCutInstance {
    num_vertices: usize,
    edges: Vec<(usize, usize, i64)>,
    adjacency: Vec<Vec<(usize, i64)>>,
}

impl MaxCutInstance {
    pub fn new(
        num_vertices: usize,
        edges: Vec<(usize, usize, i64)>,
    ) -> Result<Self, ReductionError> {
        if num_vertices == 0 {
            return Err(ReductionError::EmptyGraph);
        }
        let mut adjacency = vec![Vec::new(); num_vertices];
        let mut canon = Vec::with_capacity(edges.len());
        let mut seen = std::collections::HashSet::new();
        for &(a, b, w) in &edges {
            if a >= num_vertices {
                return Err(ReductionError::VertexOutOfRange(a, num_vertices));
            }
            if b >= num_vertices {
                return Err(ReductionError::VertexOutOfRange(b, num_vertices));
            }
            if a == b {
                return Err(ReductionError::SelfLoop(a));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(ReductionError::DuplicateEdge(key.0, key.1));
            }
            if w <= 0 {
                return Err(ReductionError::NonPositiveWeight(a, b, w));
            }
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
            canon.push((key.0, key.1, w));
        }
        canon.sort_unstable();
        Ok(MaxCutInstance {
            num_vertices,
            edges: canon,
            adjacency,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize, i64)] {
        &self.edges
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// A two-sided vertex assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutAssignment {
    sides: Vec<u8>,
}

impl CutAssignment {
    pub fn new(sides: Vec<u8>) -> Result<Self, ReductionError> {
        if sides.iter().any(|&s| s > 1) {
            return Err(ReductionError::CutValue);
        }
        Ok(CutAssignment { sides })
    }

    pub fn side(&self, vertex: usize) -> u8 {
        self.sides[vertex]
    }

    pub fn sides(&self) -> &[u8] {
        &self.sides
    }

    pub fn cut_weight(&self, inst: &MaxCutInstance) -> i64 {
        inst.edges()
            .iter()
            .filter(|&&(a, b, _)| self.sides[a] != self.sides[b])
            .map(|&(_, _, w)| w)
            .sum()
    }
}

/// Side metadata for a max-cut-reduced market; cut recovery reads the sides
/// from here instead of re-inferring them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxCutReductionMap {
    pub num_vertices: usize,
    /// 0 or 1 per item.
    pub item_side: Vec<u8>,
    /// Agent index per original vertex.
    pub vertex_agents: Vec<usize>,
    pub dummy_agents: Vec<usize>,
}

/// Reduction from Local Max-Cut: items split into two side-labeled halves
/// joined completely across sides, one agent per vertex plus one isolated
/// dummy per vertex, edge weights doubled, and unit cross-side costs that
/// vertex agents pay and dummies collect.
pub fn reduce_maxcut_to_market(
    inst: &MaxCutInstance,
) -> (MarketInstance, MaxCutReductionMap) {
    let v = inst.num_vertices();
    let n = 2 * v;

    let item_side: Vec<u8> = (0..n).map(|a| (a >= v) as u8).collect();
    let mut item_edges = Vec::with_capacity(v * v);
    for a in 0..v {
        for b in v..n {
            item_edges.push((a, b));
        }
    }
    let agent_edges: Vec<(usize, usize, i64)> = inst
        .edges()
        .iter()
        .map(|&(a, b, w)| (a, b, 2 * w))
        .collect();

    let cross_sign = |agent: usize| if agent < v { 1 } else { -1 };
    let costs: Vec<CostSpec> = (0..n)
        .map(|agent| {
            let spec = CostSpec::Partitioned {
                labels: item_side.iter().map(|&s| s == 1).collect(),
                table: [[0, cross_sign(agent)], [cross_sign(agent), 0]],
            };
            CostSpec::Dense(spec.to_dense(n))
        })
        .collect();

    let market = MarketInstance::new(n, agent_edges, item_edges, vec![vec![0; n]; n], costs)
        .expect("reduced market is well-formed");
    let map = MaxCutReductionMap {
        num_vertices: v,
        item_side,
        vertex_agents: (0..v).collect(),
        dummy_agents: (v..n).collect(),
    };
    (market, map)
}

/// Reads the cut off an allocation: a vertex sits on side 0 iff its agent
/// holds a zero-labeled item.
pub fn recover_cut(
    map: &MaxCutReductionMap,
    alloc: &Allocation,
) -> Result<CutAssignment, ReductionError> {
    if alloc.len() != map.item_side.len() {
        return Err(ReductionError::AllocationLength(
            alloc.len(),
            map.item_side.len(),
        ));
    }
    let sides = map
        .vertex_agents
        .iter()
        .map(|&agent| map.item_side[alloc.item_of(agent)])
        .collect();
    CutAssignment::new(sides)
}

/// Local optimality: at every vertex the incident cut weight is at least
/// the incident uncut weight.
pub fn is_local_maxcut(inst: &MaxCutInstance, cut: &CutAssignment) -> Result<bool, ReductionError> {
    if cut.sides().len() != inst.num_vertices() {
        return Err(ReductionError::CutLength(
            cut.sides().len(),
            inst.num_vertices(),
        ));
    }
    for vertex in 0..inst.num_vertices() {
        let mut cut_weight = 0;
        let mut uncut_weight = 0;
        for &(u, w) in &inst.adjacency[vertex] {
            if cut.side(u) != cut.side(vertex) {
                cut_weight += w;
            } else {
                uncut_weight += w;
            }
        }
        if cut_weight < uncut_weight {
            return Ok(false);
        }
    }
    Ok(true)
}
