//! Python bindings. Allocations cross the boundary as plain lists of item
//! indices; per-agent cost matrices are dense lists, with `None` standing
//! for the all-zero cost function.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use exmarket_core::assignment;
use exmarket_core::io;
use exmarket_core::local_search::{find_2_stable, InitMode, PivotRule, SearchConfig};
use exmarket_core::market::{Allocation, CostSpec, MarketInstance};
use exmarket_core::stability::check_k_stable;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_alloc(inst: &MarketInstance, assignment: Vec<usize>) -> PyResult<Allocation> {
    if assignment.len() != inst.num_agents() {
        return Err(value_err(format!(
            "allocation covers {} agents but the market has {}",
            assignment.len(),
            inst.num_agents()
        )));
    }
    Allocation::new(assignment).map_err(value_err)
}

/// A graphical one-sided matching market with exchange costs.
#[pyclass(frozen, module = "exmarket")]
struct Market {
    inner: MarketInstance,
}

#[pymethods]
impl Market {
    #[new]
    #[pyo3(signature = (n, agent_edges, item_edges, valuations, costs))]
    fn new(
        n: usize,
        agent_edges: Vec<(usize, usize, i64)>,
        item_edges: Vec<(usize, usize)>,
        valuations: Vec<Vec<i64>>,
        costs: Vec<Option<Vec<Vec<i64>>>>,
    ) -> PyResult<Self> {
        let costs = costs
            .into_iter()
            .map(|c| c.map_or(CostSpec::Trivial, CostSpec::Dense))
            .collect();
        let inner = MarketInstance::new(n, agent_edges, item_edges, valuations, costs)
            .map_err(value_err)?;
        Ok(Market { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file = serde_json::from_str(text).map_err(value_err)?;
        let inner = io::market_from_file(&file).map_err(value_err)?;
        Ok(Market { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&io::market_to_file(&self.inner)).map_err(value_err)
    }

    fn num_agents(&self) -> usize {
        self.inner.num_agents()
    }

    fn utility(&self, allocation: Vec<usize>, agent: usize) -> PyResult<i64> {
        let alloc = to_alloc(&self.inner, allocation)?;
        if agent >= self.inner.num_agents() {
            return Err(value_err("agent index out of range"));
        }
        Ok(self.inner.utility(&alloc, agent))
    }

    fn potential(&self, allocation: Vec<usize>) -> PyResult<i64> {
        Ok(self.inner.potential(&to_alloc(&self.inner, allocation)?))
    }

    /// `(stable, witness)`; the witness is a list of `(agent, image)` pairs.
    fn check_stable(
        &self,
        allocation: Vec<usize>,
        k: usize,
    ) -> PyResult<(bool, Option<Vec<(usize, usize)>>)> {
        let alloc = to_alloc(&self.inner, allocation)?;
        let report = check_k_stable(&self.inner, &alloc, k).map_err(value_err)?;
        Ok((report.stable, report.witness.map(|w| w.pairs().collect())))
    }

    #[pyo3(signature = (pivot = "best", init = "identity", seed = None, max_steps = None))]
    fn find_2_stable(
        &self,
        pivot: &str,
        init: &str,
        seed: Option<u64>,
        max_steps: Option<u64>,
    ) -> PyResult<Vec<usize>> {
        let config = SearchConfig {
            pivot: match pivot {
                "best" => PivotRule::BestImprovement,
                "first" => PivotRule::FirstImprovement,
                other => return Err(value_err(format!("unknown pivot {other:?}"))),
            },
            init: match init {
                "identity" => InitMode::Identity,
                "random" => InitMode::Random,
                other => return Err(value_err(format!("unknown init {other:?}"))),
            },
            seed,
            max_steps,
        };
        let result = find_2_stable(&self.inner, &config).map_err(value_err)?;
        if !result.converged {
            return Err(value_err("step limit reached before 2-stability"));
        }
        Ok(result.allocation.as_slice().to_vec())
    }

    fn solve_core_stable(&self) -> PyResult<Vec<usize>> {
        let alloc = assignment::solve_core_stable(&self.inner).map_err(value_err)?;
        Ok(alloc.as_slice().to_vec())
    }
}

/// Maximum-weight perfect matching; returns `(assignment, total_weight)`.
#[pyfunction]
fn max_weight_perfect_matching(weights: Vec<Vec<i64>>) -> PyResult<(Vec<usize>, i64)> {
    assignment::max_weight_perfect_matching(&weights).map_err(value_err)
}

#[pymodule]
fn exmarket(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Market>()?;
    m.add_function(wrap_pyfunction!(max_weight_perfect_matching, m)?)?;
    Ok(())
}
