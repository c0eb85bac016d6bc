//! Exact k-stability and core-stability checking by enumeration.
//!
//! Checking is coNP-hard in general, so the only general method is to walk
//! every coalition of size at most k and every fixed-point-free bijection on
//! it. The walk order is deterministic: coalitions in lexicographic order of
//! their sorted member lists, then image sequences in lexicographic order.

use itertools::Itertools;
use thiserror::Error;

use crate::market::{Allocation, CoalitionalExchange, MarketInstance, StabilityReport};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StabilityError {
    #[error("k = {0} out of range; expected 2 <= k <= {1}")]
    KOutOfRange(usize, usize),
}

/// All permissible blocking exchanges with coalition size at most `k`, in
/// deterministic order.
pub fn blocking_exchanges<'a>(
    inst: &'a MarketInstance,
    alloc: &'a Allocation,
    k: usize,
) -> impl Iterator<Item = CoalitionalExchange> + 'a {
    let n = inst.num_agents();
    (2..=k.min(n)).flat_map(move |size| {
        (0..n).combinations(size).flat_map(move |coalition| {
            coalition
                .clone()
                .into_iter()
                .permutations(size)
                .filter_map(move |images| {
                    if images.iter().zip(&coalition).any(|(t, x)| t == x) {
                        return None;
                    }
                    let ex = CoalitionalExchange::from_parts(coalition.clone(), images)
                        .expect("combination with derangement images is well-formed");
                    if inst.is_blocking(alloc, &ex) {
                        Some(ex)
                    } else {
                        None
                    }
                })
        })
    })
}

/// Exhaustive variant of [`check_k_stable`]: collects every blocking
/// exchange instead of stopping at the first.
pub fn enumerate_blocking(
    inst: &MarketInstance,
    alloc: &Allocation,
    k: usize,
) -> Result<Vec<CoalitionalExchange>, StabilityError> {
    validate_k(inst, k)?;
    Ok(blocking_exchanges(inst, alloc, k).collect())
}

/// Decides k-stability; `k = n` is core stability. Stops at the first
/// blocking exchange found, which is the reported witness.
pub fn check_k_stable(
    inst: &MarketInstance,
    alloc: &Allocation,
    k: usize,
) -> Result<StabilityReport, StabilityError> {
    validate_k(inst, k)?;
    let witness = blocking_exchanges(inst, alloc, k).next();
    Ok(StabilityReport {
        stable: witness.is_none(),
        k,
        witness,
    })
}

fn validate_k(inst: &MarketInstance, k: usize) -> Result<(), StabilityError> {
    let n = inst.num_agents();
    // A single-agent market has no coalition of size >= 2; any k <= n would
    // reject k = 2 there, so allow the vacuous check.
    if k < 2 || (k > n && !(n == 1 && k == 2)) {
        return Err(StabilityError::KOutOfRange(k, n));
    }
    Ok(())
}

/// Number of candidate `(X, mu)` pairs visited by a full enumeration:
/// `sum_{j=2..k} C(n, j) * D_j` with `D_j` the derangement count.
pub fn candidate_count(n: usize, k: usize) -> u128 {
    let mut derangements = vec![1u128, 0];
    for j in 2..=k {
        let d = (j as u128 - 1) * (derangements[j - 1] + derangements[j - 2]);
        derangements.push(d);
    }
    let mut total = 0u128;
    let mut binom = 1u128;
    for j in 1..=k.min(n) {
        binom = binom * (n - j + 1) as u128 / j as u128;
        if j >= 2 {
            total = total.saturating_add(binom.saturating_mul(derangements[j]));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::market::{Allocation, CostSpec, MarketInstance};

    #[test]
    fn fixture_unstable_allocation_yields_exactly_the_pair_swap() {
        let inst = fixtures::two_agent_fee_market();
        let alloc = Allocation::new(vec![0, 1]).unwrap();
        let found = enumerate_blocking(&inst, &alloc, 2).unwrap();
        assert_eq!(found, vec![CoalitionalExchange::swap(0, 1)]);

        let report = check_k_stable(&inst, &alloc, 2).unwrap();
        assert!(!report.stable);
        assert_eq!(report.witness, Some(CoalitionalExchange::swap(0, 1)));
    }

    #[test]
    fn fixture_other_allocation_is_two_stable() {
        let inst = fixtures::two_agent_fee_market();
        let alloc = Allocation::new(vec![1, 0]).unwrap();
        assert!(check_k_stable(&inst, &alloc, 2).unwrap().stable);
    }

    #[test]
    fn flat_market_has_no_blocking_exchange() {
        let inst = MarketInstance::new(
            4,
            vec![],
            vec![],
            vec![vec![0; 4]; 4],
            vec![CostSpec::Trivial; 4],
        )
        .unwrap();
        let alloc = Allocation::new(vec![2, 3, 0, 1]).unwrap();
        assert!(enumerate_blocking(&inst, &alloc, 4).unwrap().is_empty());
    }

    #[test]
    fn single_agent_market_is_vacuously_stable() {
        let inst =
            MarketInstance::new(1, vec![], vec![], vec![vec![7]], vec![CostSpec::Trivial])
                .unwrap();
        let report = check_k_stable(&inst, &Allocation::identity(1), 2).unwrap();
        assert!(report.stable);
    }

    #[test]
    fn k_out_of_range_rejected() {
        let inst = fixtures::two_agent_fee_market();
        let alloc = Allocation::identity(2);
        assert!(check_k_stable(&inst, &alloc, 1).is_err());
        assert!(check_k_stable(&inst, &alloc, 3).is_err());
    }

    #[test]
    fn candidate_count_small_values() {
        // n = 5: C(5,2)*1 + C(5,3)*2 + C(5,4)*9 + C(5,5)*44 = 10+20+45+44.
        assert_eq!(candidate_count(5, 5), 119);
        assert_eq!(candidate_count(3, 2), 3);
    }
}
