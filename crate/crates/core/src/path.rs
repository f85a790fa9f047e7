//! Scheduling on path graphs.
//!
//! * A single robot sweeps: it walks to the nearer extreme task, then sweeps
//!   to the other extreme, working each task on the way.
//! * Two robots split the sorted task list at the point minimising the larger
//!   of the two single-robot spans.
//! * k robots use a table `S[c][l]` = best makespan for the first `l` tasks
//!   using the `c` leftmost robots, filled from single-robot spans of
//!   contiguous task blocks.
//!
//! With equal task durations the k-robot table value is optimal. With general
//! durations it is within a factor of k (factor 2 for the two-robot split).
//!
//! Positions on a path are vertex ids, so `|a - b|` is the hop distance.

use std::ops::Range;

use thiserror::Error;

use crate::model::{Graph, Instance, ModelError, Task, Topology, VertexId};
use crate::schedule::{collisions, walk_representation, Schedule, ScheduleBuilder, ScheduleError, ScheduleSet, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("expected a path topology, got {0}")]
    NotAPath(&'static str),
    #[error("{0} is outside the path")]
    OutOfRange(VertexId),
    #[error("precondition violated: {0}")]
    Unsorted(&'static str),
    #[error("expected {expected} robots, got {got}")]
    RobotCount { expected: usize, got: usize },
    #[error("collision repair did not converge after {0} delays")]
    RepairFailed(usize),
    #[error("collision repair stretched the makespan to {span}, above the table value {bound}")]
    RepairOverrun { span: u32, bound: u32 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

fn path_len(graph: &Graph) -> Result<u32, PathError> {
    match graph.topology() {
        Topology::Path { n } => Ok(*n),
        other => Err(PathError::NotAPath(other.name())),
    }
}

/// Span of the fastest single-robot schedule: distance to the nearer extreme
/// task, plus the extent of the tasks, plus total work. Tasks must be sorted
/// by vertex; no tasks means span 0.
pub fn one_robot_span(tasks: &[Task], start: VertexId) -> u32 {
    let (Some(first), Some(last)) = (tasks.first(), tasks.last()) else {
        return 0;
    };
    let (s, lo, hi) = (start.0, first.vertex.0, last.vertex.0);
    s.abs_diff(lo).min(s.abs_diff(hi)) + (hi - lo) + tasks.iter().map(|t| t.duration).sum::<u32>()
}

/// Vertices visited walking from `from` to `to` along the path, excluding `from`.
fn line_route(from: u32, to: u32) -> impl Iterator<Item = VertexId> {
    let forward = to >= from;
    let steps = from.abs_diff(to);
    (1..=steps).map(move |i| VertexId(if forward { from + i } else { from - i }))
}

/// Appends the sweep for `tasks` (sorted) to `builder`.
fn sweep(builder: &mut ScheduleBuilder, tasks: &[Task]) {
    let (Some(first), Some(last)) = (tasks.first(), tasks.last()) else {
        return;
    };
    let s = builder.position().0;
    let right_first = s.abs_diff(last.vertex.0) <= s.abs_diff(first.vertex.0);
    let ordered: Box<dyn Iterator<Item = &Task>> =
        if right_first { Box::new(tasks.iter().rev()) } else { Box::new(tasks.iter()) };
    for task in ordered {
        builder.follow(line_route(builder.position().0, task.vertex.0));
        builder.work();
    }
}

fn check_range(n: u32, v: VertexId) -> Result<(), PathError> {
    if v.0 == 0 || v.0 > n {
        return Err(PathError::OutOfRange(v));
    }
    Ok(())
}

/// Fastest single-robot schedule on a path.
pub fn solve_one_robot(path: &Graph, tasks: &[Task], start: VertexId, robot: usize) -> Result<Schedule, PathError> {
    let n = path_len(path)?;
    check_range(n, start)?;
    for t in tasks {
        check_range(n, t.vertex)?;
    }
    let mut sorted = tasks.to_vec();
    sorted.sort();
    let mut builder = ScheduleBuilder::new(robot, start);
    sweep(&mut builder, &sorted);
    Ok(builder.build())
}

/// Prefix sums over a sorted task list for O(1) block spans.
struct Blocks<'a> {
    tasks: &'a [Task],
    work: Vec<u32>,
}

impl<'a> Blocks<'a> {
    fn new(tasks: &'a [Task]) -> Self {
        let mut work = Vec::with_capacity(tasks.len() + 1);
        work.push(0);
        for t in tasks {
            work.push(work.last().unwrap() + t.duration);
        }
        Blocks { tasks, work }
    }

    /// Single-robot span for `tasks[lo..hi]` from `start`.
    fn span(&self, lo: usize, hi: usize, start: u32) -> u32 {
        if lo >= hi {
            return 0;
        }
        let (a, b) = (self.tasks[lo].vertex.0, self.tasks[hi - 1].vertex.0);
        start.abs_diff(a).min(start.abs_diff(b)) + (b - a) + self.work[hi] - self.work[lo]
    }
}

fn sorted_robots(inst: &Instance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.robots().len()).collect();
    order.sort_by_key(|&i| inst.robots()[i].start);
    order
}

/// Result of the two-robot split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoRobotSplit {
    /// `(left span, right span)` when the left robot takes the first `q`
    /// tasks, for every `q` in `0..=m`.
    pub candidates: Vec<(u32, u32)>,
    /// Number of tasks given to the left robot.
    pub split: usize,
    pub makespan: u32,
    pub schedules: ScheduleSet,
}

/// Two robots on a path: best contiguous split of the sorted tasks.
pub fn solve_two_robot_partition(inst: &Instance) -> Result<TwoRobotSplit, PathError> {
    path_len(inst.graph())?;
    if inst.robots().len() != 2 {
        return Err(PathError::RobotCount { expected: 2, got: inst.robots().len() });
    }
    let order = sorted_robots(inst);
    let (left, right) = (inst.robots()[order[0]].start.0, inst.robots()[order[1]].start.0);
    let tasks = inst.tasks();
    let blocks = Blocks::new(tasks);
    let m = tasks.len();
    let candidates: Vec<(u32, u32)> =
        (0..=m).map(|q| (blocks.span(0, q, left), blocks.span(q, m, right))).collect();
    let split = (0..=m).min_by_key(|&q| candidates[q].0.max(candidates[q].1)).unwrap_or(0);
    let makespan = candidates[split].0.max(candidates[split].1);
    let realized = realize(inst, &order, vec![0..split, split..m])?;
    debug_assert!(realized.makespan <= makespan);
    Ok(TwoRobotSplit { candidates, split: realized.blocks[0].end, makespan: realized.makespan, schedules: realized.schedules })
}

/// The k-robot partition table, with split backpointers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpTable {
    robots: usize,
    tasks: usize,
    spans: Vec<u32>,
    splits: Vec<usize>,
}

impl DpTable {
    fn at(&self, c: usize, l: usize) -> usize {
        c * (self.tasks + 1) + l
    }

    pub fn robots(&self) -> usize {
        self.robots
    }

    pub fn tasks(&self) -> usize {
        self.tasks
    }

    /// `S[c][l]` for `1 <= c <= k`, `0 <= l <= m`.
    pub fn span(&self, c: usize, l: usize) -> u32 {
        self.spans[self.at(c, l)]
    }

    /// Tasks handed to robots `1..c` in the optimum for `S[c][l]`; robot `c`
    /// takes tasks `split+1 ..= l`.
    pub fn split(&self, c: usize, l: usize) -> usize {
        self.splits[self.at(c, l)]
    }

    pub fn value(&self) -> u32 {
        self.span(self.robots, self.tasks)
    }

    /// Rows `c = 1..=k`, columns `l = 1..=m`.
    pub fn rows(&self) -> Vec<Vec<u32>> {
        (1..=self.robots).map(|c| (1..=self.tasks).map(|l| self.span(c, l)).collect()).collect()
    }

    /// Contiguous task ranges per robot (in start order) behind `S[k][m]`.
    pub fn blocks(&self) -> Vec<Range<usize>> {
        let mut blocks = vec![0..0; self.robots];
        let mut l = self.tasks;
        for c in (1..=self.robots).rev() {
            let r = self.split(c, l);
            blocks[c - 1] = r..l;
            l = r;
        }
        blocks
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("c");
        for l in 1..=self.tasks {
            out.push_str(&format!(",{l}"));
        }
        out.push('\n');
        for (c, row) in self.rows().iter().enumerate() {
            out.push_str(&(c + 1).to_string());
            for value in row {
                out.push_str(&format!(",{value}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Fills the partition table. Tasks must be strictly increasing by vertex
/// and starts strictly increasing.
///
/// `S[c][l] = min over r in 0..=l of max(S[c-1][r], span(tasks r+1..=l, robot c))`,
/// with `S[0][0] = 0`, `S[0][l > 0]` infinite, ties to the smallest `r`.
pub fn dp_table(tasks: &[Task], starts: &[VertexId]) -> Result<DpTable, PathError> {
    if tasks.windows(2).any(|w| w[0].vertex >= w[1].vertex) {
        return Err(PathError::Unsorted("tasks must be sorted by vertex"));
    }
    if starts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PathError::Unsorted("robots must be sorted by start vertex"));
    }
    let (k, m) = (starts.len(), tasks.len());
    let blocks = Blocks::new(tasks);
    let mut table = DpTable { robots: k, tasks: m, spans: vec![u32::MAX; (k + 1) * (m + 1)], splits: vec![0; (k + 1) * (m + 1)] };
    let origin = table.at(0, 0);
    table.spans[origin] = 0;
    for c in 1..=k {
        let start = starts[c - 1].0;
        for l in 0..=m {
            let mut best = (u32::MAX, 0);
            for r in 0..=l {
                let before = table.span(c - 1, r);
                if before == u32::MAX {
                    continue;
                }
                let value = before.max(blocks.span(r, l, start));
                if value < best.0 {
                    best = (value, r);
                }
            }
            let idx = table.at(c, l);
            table.spans[idx] = best.0;
            table.splits[idx] = best.1;
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KPartition {
    pub table: DpTable,
    /// Task ranges per robot id − 1, after idle-robot handover.
    pub blocks: Vec<Range<usize>>,
    pub makespan: u32,
    /// Waits inserted by collision repair.
    pub repair_delays: usize,
    /// Equal task durations, so the makespan is optimal.
    pub optimal: bool,
    pub schedules: ScheduleSet,
}

/// k robots on a path via the partition table.
pub fn solve_k_partition_dp(inst: &Instance) -> Result<KPartition, PathError> {
    path_len(inst.graph())?;
    let order = sorted_robots(inst);
    let starts: Vec<VertexId> = order.iter().map(|&i| inst.robots()[i].start).collect();
    let table = dp_table(inst.tasks(), &starts)?;
    let realized = realize(inst, &order, table.blocks())?;
    let optimal = inst.has_equal_durations();
    if optimal && realized.makespan > table.value() {
        return Err(PathError::RepairOverrun { span: realized.makespan, bound: table.value() });
    }
    let mut blocks = vec![0..0; order.len()];
    for (rank, &i) in order.iter().enumerate() {
        blocks[i] = realized.blocks[rank].clone();
    }
    Ok(KPartition {
        table,
        blocks,
        makespan: realized.makespan,
        repair_delays: realized.delays,
        optimal,
        schedules: realized.schedules,
    })
}

struct Realized {
    schedules: ScheduleSet,
    /// Per rank in start order.
    blocks: Vec<Range<usize>>,
    makespan: u32,
    delays: usize,
}

/// Route extent of a robot: its start plus its block's extreme tasks.
fn hull(tasks: &[Task], block: &Range<usize>, start: u32) -> Option<(u32, u32)> {
    if block.is_empty() {
        return None;
    }
    let (a, b) = (tasks[block.start].vertex.0, tasks[block.end - 1].vertex.0);
    Some((start.min(a), start.max(b)))
}

/// Hands tasks to idle robots that stand inside a neighbour's route. The
/// idle robot is nearer to those tasks than the neighbour, so neither span
/// grows, and afterwards no robot has to pass a robot that never moves.
fn hand_over_to_idle(tasks: &[Task], starts: &[u32], blocks: &mut [Range<usize>]) {
    loop {
        let mut changed = false;
        for i in 0..blocks.len().saturating_sub(1) {
            let (a, b) = (i, i + 1);
            if blocks[a].is_empty() {
                if let Some((lo, _)) = hull(tasks, &blocks[b], starts[b]) {
                    if lo <= starts[a] {
                        let cut = blocks[b].start
                            + tasks[blocks[b].clone()].iter().take_while(|t| t.vertex.0 <= starts[a]).count();
                        blocks[a] = blocks[b].start..cut;
                        blocks[b] = cut..blocks[b].end;
                        changed = true;
                    }
                }
            } else if blocks[b].is_empty() {
                if let Some((_, hi)) = hull(tasks, &blocks[a], starts[a]) {
                    if hi >= starts[b] {
                        let keep = tasks[blocks[a].clone()].iter().take_while(|t| t.vertex.0 < starts[b]).count();
                        let cut = blocks[a].start + keep;
                        blocks[b] = cut..blocks[a].end;
                        blocks[a] = blocks[a].start..cut;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Turns contiguous blocks (per robot rank in start order) into schedules.
fn realize(inst: &Instance, order: &[usize], mut blocks: Vec<Range<usize>>) -> Result<Realized, PathError> {
    let tasks = inst.tasks();
    let starts: Vec<u32> = order.iter().map(|&i| inst.robots()[i].start.0).collect();
    hand_over_to_idle(tasks, &starts, &mut blocks);
    let mut schedules = Vec::with_capacity(order.len());
    for (rank, &i) in order.iter().enumerate() {
        let robot = inst.robots()[i];
        let mut builder = ScheduleBuilder::new(robot.id, robot.start);
        sweep(&mut builder, &tasks[blocks[rank].clone()]);
        schedules.push(builder.build());
    }
    let mut set = ScheduleSet::new(schedules);
    let delays = repair(inst, &mut set)?;
    let makespan = crate::schedule::time_span(&set, inst)?;
    Ok(Realized { schedules: set, blocks, makespan, delays })
}

/// Resolves collisions by delaying schedules: at the earliest collision, the
/// robot whose start is farther from the contested vertex gets one extra
/// wait at its start. Returns the number of waits inserted.
pub fn repair(inst: &Instance, set: &mut ScheduleSet) -> Result<usize, PathError> {
    let limit = 4 * (inst.graph().vertex_count() + inst.total_duration() as usize + 1) * inst.robots().len().max(1);
    let mut delays = 0;
    loop {
        let reps = inst
            .robots()
            .iter()
            .map(|r| match set.get(r.id) {
                Some(c) => walk_representation(c, inst),
                None => Ok(crate::schedule::WalkRep::new(r.start, Vec::new())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let Some(first) = collisions(&reps).into_iter().min_by_key(|v| match v {
            Violation::VertexCollision { step, .. }
            | Violation::DepartureCollision { step, .. }
            | Violation::SwapCollision { step, .. } => *step,
            _ => 0,
        }) else {
            return Ok(delays);
        };
        let (robots, vertex) = match first {
            Violation::VertexCollision { robots, vertex, .. } | Violation::DepartureCollision { robots, vertex, .. } => {
                (robots, vertex)
            }
            Violation::SwapCollision { robots, edge, .. } => (robots, edge.1),
            // Shared start vertices cannot be repaired by waiting.
            _ => return Err(PathError::RepairFailed(delays)),
        };
        if delays >= limit {
            return Err(PathError::RepairFailed(delays));
        }
        let dist = inst.graph().distances_from(vertex);
        let far = |id: usize| dist[inst.robots()[id - 1].start.index()].unwrap_or(u32::MAX);
        let victim = if far(robots.0) > far(robots.1) { robots.0 } else { robots.1 };
        let start = inst.robots()[victim - 1].start;
        match set.schedules.iter_mut().find(|c| c.robot == victim) {
            Some(c) => c.delay(start, 1),
            None => return Err(PathError::RepairFailed(delays)),
        }
        delays += 1;
    }
}
