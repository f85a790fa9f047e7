//! Hardness gadgets: instances built from a partition or Hamiltonian path
//! question so that "feasible within the threshold" answers the source
//! question, plus exhaustive source solvers to check that equivalence.
//!
//! Vertex numbering: task vertices first, then robot vertices, then (star)
//! the center last.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Graph, Instance, ModelError, Task, VertexId};
use crate::oracle::{feasible_within, OracleError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("value {value} at position {index} is below 2")]
    ValueTooSmall { index: usize, value: u32 },
    #[error("sum {sum} is not divisible by {k}")]
    Indivisible { sum: u32, k: usize },
    #[error("need at least one value and one part")]
    Empty,
    #[error("graph is not connected")]
    Disconnected,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Integers to split into `k` parts of equal sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionInput {
    pub values: Vec<u32>,
    pub k: usize,
}

/// A generated instance and the makespan threshold of its decision question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    pub instance: Instance,
    pub threshold: u32,
}

fn at_least_two(values: &[u32]) -> Result<(), GadgetError> {
    if values.is_empty() {
        return Err(GadgetError::Empty);
    }
    match values.iter().position(|&s| s < 2) {
        Some(index) => Err(GadgetError::ValueTooSmall { index, value: values[index] }),
        None => Ok(()),
    }
}

/// Complete graph on `m + k` vertices; task `i` takes `s_i - 1` at vertex
/// `i`, robot `j` starts on vertex `m + j`. Threshold `Σs / k`.
pub fn gadget_complete(values: &[u32], k: usize) -> Result<Gadget, GadgetError> {
    if k == 0 {
        return Err(GadgetError::Empty);
    }
    at_least_two(values)?;
    let sum: u32 = values.iter().sum();
    if !sum.is_multiple_of(k as u32) {
        return Err(GadgetError::Indivisible { sum, k });
    }
    let m = values.len() as u32;
    let n = m + k as u32;
    let edges = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| [a, b])).collect();
    let tasks = values.iter().zip(1..).map(|(&s, v)| Task::new(v, s - 1)).collect();
    let starts = (m + 1..=n).map(VertexId).collect();
    let instance = Instance::new(Graph::general(n, edges)?, tasks, starts)?;
    Ok(Gadget { instance, threshold: sum / k as u32 })
}

/// Star with `m` task leaves, two robot leaves and the center last; task `i`
/// takes `2 s_i - 2`. Threshold `1 + Σs`.
pub fn gadget_star(values: &[u32]) -> Result<Gadget, GadgetError> {
    at_least_two(values)?;
    let m = values.len() as u32;
    let center = m + 3;
    let edges = (1..center).map(|leaf| [leaf, center]).collect();
    let tasks = values.iter().zip(1..).map(|(&s, v)| Task::new(v, 2 * s - 2)).collect();
    let instance = Instance::new(Graph::general(center, edges)?, tasks, vec![VertexId(m + 1), VertexId(m + 2)])?;
    Ok(Gadget { instance, threshold: 1 + values.iter().sum::<u32>() })
}

/// One unit task on every vertex and a single robot at `start`. Threshold
/// `2n - 1`. Planarity of `graph` is not checked.
pub fn gadget_planar(graph: &Graph, start: VertexId) -> Result<Gadget, GadgetError> {
    if !graph.is_connected() {
        return Err(GadgetError::Disconnected);
    }
    let n = graph.vertex_count() as u32;
    let tasks = (1..=n).map(|v| Task::new(v, 1)).collect();
    let instance = Instance::new(graph.clone(), tasks, vec![start])?;
    Ok(Gadget { instance, threshold: 2 * n - 1 })
}

/// Whether `values` split into `k` parts of equal sum, by exhaustive search.
pub fn has_exact_partition(values: &[u32], k: usize) -> bool {
    let sum: u32 = values.iter().sum();
    if k == 0 || !sum.is_multiple_of(k as u32) {
        return false;
    }
    fn place(values: &[u32], bins: &mut [u32], target: u32) -> bool {
        let Some((&v, rest)) = values.split_first() else { return true };
        for i in 0..bins.len() {
            // Bins with equal load are interchangeable; try only the first.
            if bins[..i].contains(&bins[i]) || bins[i] + v > target {
                continue;
            }
            bins[i] += v;
            if place(rest, bins, target) {
                return true;
            }
            bins[i] -= v;
        }
        false
    }
    place(values, &mut vec![0; k], sum / k as u32)
}

/// Whether a simple path from `start` visits every vertex, by depth-first
/// enumeration of simple paths.
pub fn has_hamiltonian_path_from(graph: &Graph, start: VertexId) -> bool {
    fn extend(graph: &Graph, at: VertexId, visited: &mut [bool], count: usize) -> bool {
        if count == visited.len() {
            return true;
        }
        for &u in graph.neighbors(at) {
            if !visited[u.index()] {
                visited[u.index()] = true;
                if extend(graph, u, visited, count + 1) {
                    return true;
                }
                visited[u.index()] = false;
            }
        }
        false
    }
    let mut visited = vec![false; graph.vertex_count()];
    visited[start.index()] = true;
    extend(graph, start, &mut visited, 1)
}

/// Both answers of one reduction check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReductionCheck {
    pub gadget: bool,
    pub source: bool,
}

impl ReductionCheck {
    pub fn matches(&self) -> bool {
        self.gadget == self.source
    }
}

/// Decides the gadget with the oracle and pairs it with the source answer.
pub fn check_reduction(gadget: &Gadget, source: bool) -> Result<ReductionCheck, GadgetError> {
    let answer = feasible_within(&gadget.instance, gadget.threshold)?;
    Ok(ReductionCheck { gadget: answer, source })
}
