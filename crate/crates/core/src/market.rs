//! Market instances, allocations, coalitional exchanges, utilities, and the
//! potential function.
//!
//! A market couples an edge-weighted agent graph with an unweighted item
//! graph. Each agent values every item and pays a (possibly negative) cost
//! to trade one item for another. All arithmetic is 64-bit signed integer;
//! instance construction rejects inputs large enough to overflow the
//! potential or any delta.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Magnitude bound enforced at construction: `n * (max|v| + max|c| + sum w)`
/// must stay below 2^40 so that potentials and deltas fit in i64.
const MAGNITUDE_BOUND: i128 = 1 << 40;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MarketError {
    #[error("market must have at least one agent")]
    Empty,
    #[error("agent index {0} out of range (n = {1})")]
    AgentOutOfRange(usize, usize),
    #[error("item index {0} out of range (n = {1})")]
    ItemOutOfRange(usize, usize),
    #[error("self-loop on {0} is not allowed")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("agent edge {{{0}, {1}}} has non-positive weight {2}")]
    NonPositiveWeight(usize, usize, i64),
    #[error("valuation table must be {0}x{0}")]
    ValuationShape(usize),
    #[error("negative valuation v_{0}({1}) = {2}")]
    NegativeValuation(usize, usize, i64),
    #[error("cost table for agent {0} must cover all {1}x{1} item pairs")]
    CostShape(usize, usize),
    #[error("instance magnitude n*(max|v| + max|c| + sum w) exceeds 2^40")]
    MagnitudeOverflow,
    #[error("allocation must be a bijection on {0} items")]
    NotABijection(usize),
    #[error("coalition must contain at least two distinct agents")]
    CoalitionTooSmall,
    #[error("exchange map fixes agent {0}")]
    FixedPoint(usize),
    #[error("exchange map is not a bijection on the coalition")]
    NotADerangement,
}

/// Cost function of a single agent over ordered item pairs.
///
/// `Dense` is the canonical form; `Trivial` and `Partitioned` resolve on
/// lookup. `Partitioned` keys the cost on whether the source and target
/// items carry the same binary label, with `c(a, a) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CostSpec {
    Trivial,
    Dense(Vec<Vec<i64>>),
    Partitioned {
        labels: Vec<bool>,
        /// `table[label(a) as usize][label(b) as usize]`
        table: [[i64; 2]; 2],
    },
}

impl CostSpec {
    pub fn cost(&self, a: usize, b: usize) -> i64 {
        match self {
            CostSpec::Trivial => 0,
            CostSpec::Dense(m) => m[a][b],
            CostSpec::Partitioned { labels, table } => {
                if a == b {
                    0
                } else {
                    table[labels[a] as usize][labels[b] as usize]
                }
            }
        }
    }

    /// Largest absolute cost entry, used by the overflow guard.
    fn max_abs(&self, n: usize) -> i64 {
        match self {
            CostSpec::Trivial => 0,
            CostSpec::Dense(m) => m
                .iter()
                .flat_map(|row| row.iter())
                .map(|c| c.abs())
                .max()
                .unwrap_or(0),
            CostSpec::Partitioned { table, .. } => {
                let _ = n;
                table.iter().flatten().map(|c| c.abs()).max().unwrap()
            }
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<Vec<i64>> {
        (0..n)
            .map(|a| (0..n).map(|b| self.cost(a, b)).collect())
            .collect()
    }
}

/// A graphical one-sided matching market with exchange costs.
///
/// Immutable after construction; all operations are pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarketInstance {
    n: usize,
    agent_edges: Vec<(usize, usize, i64)>,
    item_edges: Vec<(usize, usize)>,
    valuations: Vec<Vec<i64>>,
    costs: Vec<CostSpec>,
    /// Per-agent adjacency: `(neighbor, weight)`.
    adjacency: Vec<Vec<(usize, i64)>>,
    /// Dense item adjacency, row-major.
    item_adj: Vec<bool>,
}

impl MarketInstance {
    pub fn new(
        n: usize,
        agent_edges: Vec<(usize, usize, i64)>,
        item_edges: Vec<(usize, usize)>,
        valuations: Vec<Vec<i64>>,
        costs: Vec<CostSpec>,
    ) -> Result<Self, MarketError> {
        if n == 0 {
            return Err(MarketError::Empty);
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        let mut canon_agent_edges = Vec::with_capacity(agent_edges.len());
        for &(a, b, w) in &agent_edges {
            if a >= n {
                return Err(MarketError::AgentOutOfRange(a, n));
            }
            if b >= n {
                return Err(MarketError::AgentOutOfRange(b, n));
            }
            if a == b {
                return Err(MarketError::SelfLoop(a));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(MarketError::DuplicateEdge(key.0, key.1));
            }
            if w <= 0 {
                return Err(MarketError::NonPositiveWeight(a, b, w));
            }
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
            canon_agent_edges.push((key.0, key.1, w));
        }
        canon_agent_edges.sort_unstable();

        let mut item_adj = vec![false; n * n];
        let mut seen_items = std::collections::HashSet::new();
        let mut canon_item_edges = Vec::with_capacity(item_edges.len());
        for &(a, b) in &item_edges {
            if a >= n {
                return Err(MarketError::ItemOutOfRange(a, n));
            }
            if b >= n {
                return Err(MarketError::ItemOutOfRange(b, n));
            }
            if a == b {
                return Err(MarketError::SelfLoop(a));
            }
            let key = (a.min(b), a.max(b));
            if !seen_items.insert(key) {
                return Err(MarketError::DuplicateEdge(key.0, key.1));
            }
            item_adj[a * n + b] = true;
            item_adj[b * n + a] = true;
            canon_item_edges.push(key);
        }
        canon_item_edges.sort_unstable();

        if valuations.len() != n || valuations.iter().any(|row| row.len() != n) {
            return Err(MarketError::ValuationShape(n));
        }
        for (i, row) in valuations.iter().enumerate() {
            for (a, &v) in row.iter().enumerate() {
                if v < 0 {
                    return Err(MarketError::NegativeValuation(i, a, v));
                }
            }
        }
        if costs.len() != n {
            return Err(MarketError::CostShape(costs.len(), n));
        }
        for (i, c) in costs.iter().enumerate() {
            let shape_ok = match c {
                CostSpec::Trivial => true,
                CostSpec::Dense(m) => m.len() == n && m.iter().all(|row| row.len() == n),
                CostSpec::Partitioned { labels, .. } => labels.len() == n,
            };
            if !shape_ok {
                return Err(MarketError::CostShape(i, n));
            }
        }

        let max_v = valuations
            .iter()
            .flat_map(|row| row.iter())
            .map(|v| v.abs())
            .max()
            .unwrap_or(0) as i128;
        let max_c = costs.iter().map(|c| c.max_abs(n)).max().unwrap_or(0) as i128;
        let sum_w: i128 = canon_agent_edges.iter().map(|&(_, _, w)| w as i128).sum();
        if (n as i128) * (max_v + max_c + sum_w) > MAGNITUDE_BOUND {
            return Err(MarketError::MagnitudeOverflow);
        }

        Ok(MarketInstance {
            n,
            agent_edges: canon_agent_edges,
            item_edges: canon_item_edges,
            valuations,
            costs,
            adjacency,
            item_adj,
        })
    }

    pub fn num_agents(&self) -> usize {
        self.n
    }

    /// Sorted unordered agent edges `(i, j, w)` with `i < j`.
    pub fn agent_edges(&self) -> &[(usize, usize, i64)] {
        &self.agent_edges
    }

    /// Sorted unordered item edges `(a, b)` with `a < b`.
    pub fn item_edges(&self) -> &[(usize, usize)] {
        &self.item_edges
    }

    pub fn valuation(&self, agent: usize, item: usize) -> i64 {
        self.valuations[agent][item]
    }

    pub fn valuations(&self) -> &[Vec<i64>] {
        &self.valuations
    }

    pub fn cost_spec(&self, agent: usize) -> &CostSpec {
        &self.costs[agent]
    }

    /// `c_i(a, b)`: the fee agent `i` pays to part with `a` and receive `b`.
    pub fn cost(&self, agent: usize, from: usize, to: usize) -> i64 {
        self.costs[agent].cost(from, to)
    }

    pub fn neighbors(&self, agent: usize) -> &[(usize, i64)] {
        &self.adjacency[agent]
    }

    pub fn items_adjacent(&self, a: usize, b: usize) -> bool {
        self.item_adj[a * self.n + b]
    }

    fn agent_edge_weight(&self, i: usize, j: usize) -> Option<i64> {
        self.adjacency[i]
            .iter()
            .find(|&&(nb, _)| nb == j)
            .map(|&(_, w)| w)
    }

    /// `u_i(pi)`: own valuation plus the weight of each incident agent edge
    /// whose endpoints hold adjacent items.
    pub fn utility(&self, alloc: &Allocation, agent: usize) -> i64 {
        assert!(agent < self.n, "agent index out of range");
        let my_item = alloc.item_of(agent);
        let mut total = self.valuations[agent][my_item];
        for &(j, w) in &self.adjacency[agent] {
            if self.items_adjacent(alloc.item_of(j), my_item) {
                total += w;
            }
        }
        total
    }

    /// Summed exchange fees of a coalitional exchange under `alloc`.
    pub fn exchange_cost_total(&self, alloc: &Allocation, ex: &CoalitionalExchange) -> i64 {
        ex.pairs()
            .map(|(x, mx)| self.cost(x, alloc.item_of(x), alloc.item_of(mx)))
            .sum()
    }

    /// A mediator brokers an exchange exactly when the fees sum to >= 0.
    pub fn is_permissible(&self, alloc: &Allocation, ex: &CoalitionalExchange) -> bool {
        self.exchange_cost_total(alloc, ex) >= 0
    }

    /// Permissible and strictly improving for every member net of their fee.
    pub fn is_blocking(&self, alloc: &Allocation, ex: &CoalitionalExchange) -> bool {
        if !self.is_permissible(alloc, ex) {
            return false;
        }
        let after = alloc.apply(ex);
        ex.pairs().all(|(x, _)| {
            let fee = self.cost(x, alloc.item_of(x), after.item_of(x));
            self.utility(&after, x) - fee > self.utility(alloc, x)
        })
    }

    /// Generalized ordinal potential: `phi(pi) = sum_i v_i(pi(i)) + sum_i u_i(pi)`.
    pub fn potential(&self, alloc: &Allocation) -> i64 {
        let mut total = 0;
        for i in 0..self.n {
            total += 2 * self.valuations[i][alloc.item_of(i)];
        }
        for &(i, j, w) in &self.agent_edges {
            if self.items_adjacent(alloc.item_of(i), alloc.item_of(j)) {
                total += 2 * w;
            }
        }
        total
    }

    /// Potential change of an exchange, computed from coalition-local data
    /// only. Equals `potential(after) - potential(before)` for every
    /// exchange, permissible or not.
    pub fn potential_delta(&self, alloc: &Allocation, ex: &CoalitionalExchange) -> i64 {
        let after = alloc.apply(ex);
        let mut du = 0;
        for (x, _) in ex.pairs() {
            du += self.utility(&after, x) - self.utility(alloc, x);
        }
        // Edges with both endpoints inside the coalition are counted twice
        // in the utility sums; correct with the realized inside-edge weight.
        let members = ex.members();
        let mut inside_before = 0;
        let mut inside_after = 0;
        for (idx, &x) in members.iter().enumerate() {
            for &y in &members[idx + 1..] {
                if let Some(w) = self.agent_edge_weight(x, y) {
                    if self.items_adjacent(alloc.item_of(x), alloc.item_of(y)) {
                        inside_before += w;
                    }
                    if self.items_adjacent(after.item_of(x), after.item_of(y)) {
                        inside_after += w;
                    }
                }
            }
        }
        2 * (du - inside_after + inside_before)
    }
}

/// A bijection from agents to items, stored as `assignment[agent] = item`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    assignment: Vec<usize>,
}

impl Allocation {
    pub fn new(assignment: Vec<usize>) -> Result<Self, MarketError> {
        let n = assignment.len();
        let mut used = vec![false; n];
        for &item in &assignment {
            if item >= n || used[item] {
                return Err(MarketError::NotABijection(n));
            }
            used[item] = true;
        }
        Ok(Allocation { assignment })
    }

    pub fn identity(n: usize) -> Self {
        Allocation {
            assignment: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn item_of(&self, agent: usize) -> usize {
        self.assignment[agent]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.assignment
    }

    /// `pi^(X, mu)`: each coalition member receives the item of its image.
    pub fn apply(&self, ex: &CoalitionalExchange) -> Allocation {
        let mut next = self.assignment.clone();
        for (x, mx) in ex.pairs() {
            next[x] = self.assignment[mx];
        }
        Allocation { assignment: next }
    }
}

/// A coalition with a fixed-point-free bijection on it. Members are kept
/// sorted; `targets[t]` is the image of `members[t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionalExchange {
    members: Vec<usize>,
    targets: Vec<usize>,
}

impl CoalitionalExchange {
    pub fn new(mapping: &[(usize, usize)]) -> Result<Self, MarketError> {
        let mut mapping: Vec<(usize, usize)> = mapping.to_vec();
        mapping.sort_unstable_by_key(|&(x, _)| x);
        let members: Vec<usize> = mapping.iter().map(|&(x, _)| x).collect();
        let targets: Vec<usize> = mapping.iter().map(|&(_, t)| t).collect();
        Self::from_parts(members, targets)
    }

    /// `members` must be strictly increasing; `targets[t] = mu(members[t])`.
    pub fn from_parts(members: Vec<usize>, targets: Vec<usize>) -> Result<Self, MarketError> {
        if members.len() < 2 || members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MarketError::CoalitionTooSmall);
        }
        if targets.len() != members.len() {
            return Err(MarketError::NotADerangement);
        }
        let mut sorted_targets = targets.clone();
        sorted_targets.sort_unstable();
        if sorted_targets != members {
            return Err(MarketError::NotADerangement);
        }
        for (&x, &t) in members.iter().zip(&targets) {
            if x == t {
                return Err(MarketError::FixedPoint(x));
            }
        }
        Ok(CoalitionalExchange { members, targets })
    }

    pub fn swap(i: usize, j: usize) -> Self {
        assert_ne!(i, j);
        let (i, j) = (i.min(j), i.max(j));
        CoalitionalExchange {
            members: vec![i, j],
            targets: vec![j, i],
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// `(x, mu(x))` pairs in member order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.members.iter().copied().zip(self.targets.iter().copied())
    }

    /// The exchange applying `mu^{-1}`, which undoes this one.
    pub fn inverse(&self) -> Self {
        let mut mapping: Vec<(usize, usize)> = self
            .pairs()
            .map(|(x, t)| (t, x))
            .collect();
        mapping.sort_unstable_by_key(|&(x, _)| x);
        CoalitionalExchange {
            members: mapping.iter().map(|&(x, _)| x).collect(),
            targets: mapping.iter().map(|&(_, t)| t).collect(),
        }
    }
}

/// Verdict of a stability check, with a blocking witness when unstable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub stable: bool,
    pub k: usize,
    pub witness: Option<CoalitionalExchange>,
}
