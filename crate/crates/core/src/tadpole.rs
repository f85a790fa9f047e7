//! Scheduling on tadpoles: a cycle `c1..cM` (vertices `1..=M`) with a tail
//! `p1..pN` (vertices `M+1..=M+N`) attached by the bridge `(c1, p1)`.
//!
//! Every cycle edge is tried as the untraversed one. Removing an edge next to
//! `c1` leaves a path, solved by the partition table; removing any other edge
//! leaves a spider centred on `c1` whose arms are the two cycle arcs and the
//! tail, solved by the selection solver in [`crate::spider`]. A lone robot
//! serving both the cycle and the tail may instead go once around the whole
//! cycle, since then a fastest schedule can use every cycle edge. The best
//! cut wins, ties to the smallest cut.

use thiserror::Error;

use crate::model::{Graph, Instance, ModelError, Task, Topology, VertexId};
use crate::path::{solve_k_partition_dp, PathError};
use crate::schedule::{ScheduleError, ScheduleSet};
use crate::spider::{solve_spider_in, Act, Host, Plan, Selection, Spider, SpiderError};

pub use crate::spider::{solve_two_robot_spider, TwoRobotSpider};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TadpoleError {
    #[error("expected a tadpole topology, got {0}")]
    NotATadpole(&'static str),
    #[error("no cut produced a valid schedule set")]
    Unsolved,
    #[error(transparent)]
    Spider(#[from] SpiderError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// How the best cut was solved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutKind {
    /// The cut touches `c1`, leaving a path.
    Path,
    /// A spider around `c1`, with the winning selection.
    Spider(Selection),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TadpoleSolution {
    pub schedules: ScheduleSet,
    pub makespan: u32,
    pub removed_edge: (VertexId, VertexId),
    pub kind: CutKind,
    /// Equal task durations, the case the decomposition is exact for.
    pub optimal: bool,
}

fn shape(graph: &Graph) -> Result<(u32, u32), TadpoleError> {
    match graph.topology() {
        Topology::Tadpole { cycle, path } => Ok((*cycle, *path)),
        other => Err(TadpoleError::NotATadpole(other.name())),
    }
}

/// Cycle edge `i` joins `c_i` and `c_{i+1}` (edge `M` closes the cycle).
fn cycle_edge(cycle: u32, i: u32) -> (VertexId, VertexId) {
    (VertexId(i), VertexId(i % cycle + 1))
}

fn without_edge(graph: &Graph, cut: (VertexId, VertexId)) -> Result<Graph, ModelError> {
    let edges = graph
        .edges()
        .into_iter()
        .filter(|&(a, b)| (a, b) != cut && (b, a) != cut)
        .map(|(a, b)| [a.0, b.0])
        .collect();
    Graph::general(graph.vertex_count() as u32, edges)
}

/// Path left by a cut at `c1`, listed from one end to the other.
fn path_order(cycle: u32, tail: u32, cut: u32) -> Vec<VertexId> {
    // Removing (c1, c2) leaves c2 .. cM, c1, tail; removing (cM, c1) leaves
    // cM .. c2, c1, tail.
    let arc: Vec<u32> = if cut == 1 { (2..=cycle).collect() } else { (2..=cycle).rev().collect() };
    arc.into_iter().chain(std::iter::once(1)).chain(cycle + 1..=cycle + tail).map(VertexId).collect()
}

fn solve_path_cut(inst: &Instance, order: &[VertexId]) -> Result<Option<(u32, ScheduleSet)>, TadpoleError> {
    let mut to_path = vec![VertexId(0); order.len()];
    for (i, v) in order.iter().enumerate() {
        to_path[v.index()] = VertexId::from_index(i);
    }
    let tasks = inst.tasks().iter().map(|t| Task { vertex: to_path[t.vertex.index()], duration: t.duration }).collect();
    let starts = inst.robots().iter().map(|r| to_path[r.start.index()]).collect();
    let sub = Instance::new(Graph::path(order.len() as u32)?, tasks, starts)?;
    match solve_k_partition_dp(&sub) {
        Ok(sol) => {
            let set = sol.schedules.schedules.iter().map(|c| c.map_vertices(c.robot, |v| order[v.index()])).collect();
            Ok(Some((sol.makespan, ScheduleSet::new(set))))
        }
        Err(PathError::RepairFailed(_) | PathError::RepairOverrun { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Shortest walk from `start` that goes once around the whole cycle and
/// reaches every task, working each on first arrival. The walk must cover the
/// cycle and the tail up to the deepest task or start, `H`; its length is
/// `|E(H)|` plus a minimum T-join fixing the odd-degree vertices of `H`.
fn loop_walk(graph: &Graph, cycle: u32, robot: usize, start: VertexId, tasks: &[Task]) -> Option<Plan> {
    if tasks.is_empty() {
        return None;
    }
    let depth = |v: VertexId| v.0.saturating_sub(cycle);
    let reach = tasks.iter().map(|t| depth(t.vertex)).chain([depth(start)]).max().unwrap_or(0);
    let last = cycle + reach;
    let dist: Vec<Vec<Option<u32>>> = (1..=last).map(|v| graph.distances_from(VertexId(v))).collect();
    let d = |a: u32, b: u32| dist[(a - 1) as usize][(b - 1) as usize].expect("tadpoles are connected");
    // Odd-degree vertices of H, toggled by the walk's two ends.
    let toggle = |set: &mut Vec<u32>, v: u32| match set.iter().position(|&x| x == v) {
        Some(i) => {
            set.remove(i);
        }
        None => set.push(v),
    };
    let mut best: Option<(u32, Vec<(u32, u32)>)> = None;
    for end in 1..=last {
        let mut odd = if reach > 0 { vec![1, last] } else { vec![] };
        toggle(&mut odd, start.0);
        toggle(&mut odd, end);
        let pairings: Vec<Vec<(u32, u32)>> = match odd.as_slice() {
            [] => vec![vec![]],
            &[a, b] => vec![vec![(a, b)]],
            &[a, b, c, e] => vec![vec![(a, b), (c, e)], vec![(a, c), (b, e)], vec![(a, e), (b, c)]],
            _ => unreachable!("at most four odd vertices"),
        };
        for pairs in pairings {
            let extra: u32 = pairs.iter().map(|&(a, b)| d(a, b)).sum();
            if best.as_ref().is_none_or(|(len, _)| extra < *len) {
                best = Some((extra, pairs));
            }
        }
    }
    let (_, pairs) = best?;
    // Multigraph: H once, plus a shortest path per pair.
    let mut edges: Vec<(u32, u32)> = (1..=cycle).map(|i| (i, i % cycle + 1)).collect();
    edges.extend((1..=reach).map(|j| (if j == 1 { 1 } else { cycle + j - 1 }, cycle + j)));
    for &(a, b) in &pairs {
        let mut at = a;
        while at != b {
            let next = graph
                .neighbors(VertexId(at))
                .iter()
                .map(|u| u.0)
                .find(|&u| u <= last && d(u, b) + 1 == d(at, b))
                .expect("a neighbour lies on a shortest path");
            edges.push((at, next));
            at = next;
        }
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); last as usize + 1];
    for (i, &(a, b)) in edges.iter().enumerate() {
        incident[a as usize].push(i);
        incident[b as usize].push(i);
    }
    // Hierholzer from the start.
    let mut used = vec![false; edges.len()];
    let mut cursor = vec![0usize; last as usize + 1];
    let mut stack = vec![start.0];
    let mut trail = Vec::with_capacity(edges.len() + 1);
    while let Some(&v) = stack.last() {
        let list = &incident[v as usize];
        while cursor[v as usize] < list.len() && used[list[cursor[v as usize]]] {
            cursor[v as usize] += 1;
        }
        match list.get(cursor[v as usize]) {
            Some(&e) => {
                used[e] = true;
                let (a, b) = edges[e];
                stack.push(if a == v { b } else { a });
            }
            None => trail.push(stack.pop().expect("stack is non-empty")),
        }
    }
    trail.reverse();
    let mut pending: Vec<Option<u32>> = vec![None; graph.vertex_count() + 1];
    for t in tasks {
        pending[t.vertex.0 as usize] = Some(t.duration);
    }
    let mut acts = Vec::with_capacity(trail.len() + tasks.len());
    let mut worked = 0;
    for (i, &v) in trail.iter().enumerate() {
        if i > 0 {
            acts.push(Act::Go(VertexId(v)));
        }
        if let Some(dur) = pending[v as usize].take() {
            acts.push(Act::Work(dur));
            worked = acts.len();
        }
    }
    acts.truncate(worked);
    Some(Plan { robot, start, acts })
}

/// Best schedule set over all cycle cuts.
pub fn solve_tadpole(inst: &Instance) -> Result<TadpoleSolution, TadpoleError> {
    let (cycle, tail) = shape(inst.graph())?;
    let mut best: Option<TadpoleSolution> = None;
    for i in 1..=cycle {
        let cut = cycle_edge(cycle, i);
        let found = if i == 1 || i == cycle {
            solve_path_cut(inst, &path_order(cycle, tail, i))?.map(|(span, set)| (span, set, CutKind::Path))
        } else {
            let graph = without_edge(inst.graph(), cut)?;
            let spider = Spider::with_center(&graph, VertexId(1))?;
            let sub = Instance::new(graph, inst.tasks().to_vec(), inst.starts())?;
            let walk = |robot: usize, start: VertexId, tasks: &[Task]| loop_walk(inst.graph(), cycle, robot, start, tasks);
            let host = Host { inst, walk: &walk };
            match solve_spider_in(&sub, &spider, Some(&host)) {
                Ok(sol) => Some((sol.makespan, sol.schedules, CutKind::Spider(sol.selection))),
                Err(SpiderError::NoValidCandidate) => None,
                Err(e) => return Err(e.into()),
            }
        };
        if let Some((makespan, schedules, kind)) = found {
            if best.as_ref().is_none_or(|b| makespan < b.makespan) {
                best = Some(TadpoleSolution {
                    schedules,
                    makespan,
                    removed_edge: cut,
                    kind,
                    optimal: inst.has_equal_durations(),
                });
            }
        }
    }
    best.ok_or(TadpoleError::Unsolved)
}

/// Robots whose tasks lie on both the cycle and the tail.
pub fn crossing_robots(inst: &Instance, set: &ScheduleSet) -> Result<Vec<usize>, TadpoleError> {
    let (cycle, _) = shape(inst.graph())?;
    Ok(set
        .schedules
        .iter()
        .filter(|c| {
            let on_cycle = c.task_vertices().any(|v| v.0 <= cycle);
            let on_tail = c.task_vertices().any(|v| v.0 > cycle);
            on_cycle && on_tail
        })
        .map(|c| c.robot)
        .collect())
}
