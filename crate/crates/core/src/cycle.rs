//! Scheduling on cycles by cutting one edge and solving the remaining path.
//!
//! With equal durations some fastest schedule leaves an edge untraversed, so
//! the best of the `n` cut-open path instances is optimal. With general
//! durations the result is within a factor of k.

use thiserror::Error;

use crate::model::{Graph, Instance, ModelError, Topology, VertexId};
use crate::path::{solve_k_partition_dp, PathError};
use crate::schedule::{walk_representation, ScheduleError, ScheduleSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("expected a cycle topology, got {0}")]
    NotACycle(&'static str),
    #[error("cut at edge {cut}: {source}")]
    Cut { cut: usize, source: PathError },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Bijection between a cycle and the path left after removing the edge
/// `(v_cut, v_cut+1)`: path vertex 1 is `v_cut+1`, path vertex `n` is `v_cut`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutOpen {
    n: u32,
    cut: u32,
}

impl CutOpen {
    /// `cut` in `1..=n`; cut `n` removes the closing edge `(v_n, v_1)`.
    pub fn new(n: u32, cut: u32) -> Self {
        debug_assert!((1..=n).contains(&cut));
        CutOpen { n, cut }
    }

    pub fn removed_edge(&self) -> (VertexId, VertexId) {
        (VertexId(self.cut), VertexId(self.cut % self.n + 1))
    }

    pub fn to_path(&self, v: VertexId) -> VertexId {
        VertexId((v.0 + self.n - self.cut - 1) % self.n + 1)
    }

    pub fn to_cycle(&self, v: VertexId) -> VertexId {
        VertexId((v.0 + self.cut - 1) % self.n + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSolution {
    pub schedules: ScheduleSet,
    pub removed_edge: (VertexId, VertexId),
    pub makespan: u32,
    /// Makespan for every cut `1..=n`, in order.
    pub per_cut: Vec<u32>,
    /// Equal task durations, so the makespan is optimal.
    pub optimal: bool,
}

fn cycle_len(graph: &Graph) -> Result<u32, CycleError> {
    match graph.topology() {
        Topology::Cycle { n } => Ok(*n),
        other => Err(CycleError::NotACycle(other.name())),
    }
}

/// Solves the path instance for one cut and maps the schedules back.
pub fn solve_cut(inst: &Instance, cut: u32) -> Result<(u32, ScheduleSet), CycleError> {
    let n = cycle_len(inst.graph())?;
    let map = CutOpen::new(n, cut);
    let tasks = inst
        .tasks()
        .iter()
        .map(|t| crate::model::Task { vertex: map.to_path(t.vertex), duration: t.duration })
        .collect();
    let starts = inst.robots().iter().map(|r| map.to_path(r.start)).collect();
    let sub = Instance::new(Graph::path(n)?, tasks, starts)?;
    let solved = solve_k_partition_dp(&sub).map_err(|source| CycleError::Cut { cut: cut as usize, source })?;
    let schedules = solved.schedules.schedules.iter().map(|c| c.map_vertices(c.robot, |v| map.to_cycle(v))).collect();
    Ok((solved.makespan, ScheduleSet::new(schedules)))
}

/// Best over all edge cuts; ties go to the smallest cut index.
pub fn solve_cycle(inst: &Instance) -> Result<CycleSolution, CycleError> {
    let n = cycle_len(inst.graph())?;
    let mut per_cut = Vec::with_capacity(n as usize);
    let mut best: Option<(u32, u32, ScheduleSet)> = None;
    for cut in 1..=n {
        let (span, set) = solve_cut(inst, cut)?;
        per_cut.push(span);
        if best.as_ref().is_none_or(|(s, _, _)| span < *s) {
            best = Some((span, cut, set));
        }
    }
    let (makespan, cut, schedules) = best.expect("a cycle has at least three edges");
    Ok(CycleSolution {
        schedules,
        removed_edge: CutOpen::new(n, cut).removed_edge(),
        makespan,
        per_cut,
        optimal: inst.has_equal_durations(),
    })
}

/// Whether any robot moves across `edge` (in either direction).
pub fn traverses(set: &ScheduleSet, inst: &Instance, edge: (VertexId, VertexId)) -> Result<bool, ScheduleError> {
    for c in &set.schedules {
        let rep = walk_representation(c, inst)?;
        if rep.moves().iter().any(|&(a, b)| (a, b) == edge || (b, a) == edge) {
            return Ok(true);
        }
    }
    Ok(false)
}
