//! Polynomial-time core-stable solving for non-graphical-equivalent
//! instances via maximum-weight perfect matching.
//!
//! The graph terms of the utility are allocation-independent exactly when
//! the agent graph is edge-empty or uniform-complete and the item graph is
//! edge-empty or complete. On such instances a welfare-maximal matching on
//! weights `v_i(a) + 1` is core-stable for arbitrary cost functions.

use thiserror::Error;

use crate::market::{Allocation, MarketInstance};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssignmentError {
    #[error("weight matrix must be square")]
    NonSquare,
    #[error("instance is not non-graphical-equivalent: {0}")]
    NotNonGraphical(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceClass {
    /// Agent graph edge-empty or uniform-weighted complete, and item graph
    /// edge-empty or complete.
    NonGraphicalEquivalent,
    General,
}

fn agent_graph_violation(inst: &MarketInstance) -> Option<String> {
    let n = inst.num_agents();
    let edges = inst.agent_edges();
    if edges.is_empty() {
        return None;
    }
    if edges.len() != n * (n - 1) / 2 {
        return Some("agent graph is neither edge-empty nor complete".into());
    }
    let w0 = edges[0].2;
    if edges.iter().any(|&(_, _, w)| w != w0) {
        return Some("complete agent graph has non-uniform weights".into());
    }
    None
}

fn item_graph_violation(inst: &MarketInstance) -> Option<String> {
    let n = inst.num_agents();
    let m = inst.item_edges().len();
    if m == 0 || m == n * (n - 1) / 2 {
        None
    } else {
        Some("item graph is neither edge-empty nor complete".into())
    }
}

pub fn classify_instance(inst: &MarketInstance) -> InstanceClass {
    if agent_graph_violation(inst).is_none() && item_graph_violation(inst).is_none() {
        InstanceClass::NonGraphicalEquivalent
    } else {
        InstanceClass::General
    }
}

/// Maximum-weight perfect matching on a square matrix, Kuhn-Munkres with
/// potentials, O(n^3). Returns `(perm, total)` with `perm[row] = column`.
pub fn max_weight_perfect_matching(
    weights: &[Vec<i64>],
) -> Result<(Vec<usize>, i64), AssignmentError> {
    let n = weights.len();
    if weights.iter().any(|row| row.len() != n) {
        return Err(AssignmentError::NonSquare);
    }
    if n == 0 {
        return Ok((vec![], 0));
    }

    // Minimization form on negated weights, 1-based internally.
    let inf = i64::MAX / 4;
    let cost = |i: usize, j: usize| -weights[i][j];
    let mut row_pot = vec![0i64; n + 1];
    let mut col_pot = vec![0i64; n + 1];
    let mut matched_row = vec![0usize; n + 1]; // matched_row[col] = row
    let mut prev_col = vec![0usize; n + 1];

    for row in 1..=n {
        matched_row[0] = row;
        let mut j0 = 0usize;
        let mut min_slack = vec![inf; n + 1];
        let mut visited = vec![false; n + 1];
        loop {
            visited[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if visited[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - row_pot[i0] - col_pot[j];
                if reduced < min_slack[j] {
                    min_slack[j] = reduced;
                    prev_col[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if visited[j] {
                    row_pot[matched_row[j]] += delta;
                    col_pot[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        // Augment along the alternating path.
        while j0 != 0 {
            let j1 = prev_col[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[matched_row[j] - 1] = j - 1;
    }
    let total = (0..n).map(|i| weights[i][perm[i]]).sum();
    Ok((perm, total))
}

/// Core-stable allocation for a non-graphical-equivalent instance: the
/// maximum-weight perfect matching on `w(i, a) = v_i(a) + 1`.
pub fn solve_core_stable(inst: &MarketInstance) -> Result<Allocation, AssignmentError> {
    if let Some(reason) = agent_graph_violation(inst) {
        return Err(AssignmentError::NotNonGraphical(reason));
    }
    if let Some(reason) = item_graph_violation(inst) {
        return Err(AssignmentError::NotNonGraphical(reason));
    }
    let n = inst.num_agents();
    let weights: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|a| inst.valuation(i, a) + 1).collect())
        .collect();
    let (perm, _) = max_weight_perfect_matching(&weights)?;
    Ok(Allocation::new(perm).expect("matching is a bijection"))
}
