//! Exact optimum by breadth-first search over joint robot configurations.
//!
//! A search state is every robot's position, the set of completed tasks and,
//! per robot, how many timesteps it has already spent on the task under it.
//! Each layer of the search is one timestep in which every robot moves along
//! an edge, waits, or works. A robot that has started a task keeps working
//! until it is finished. Only usable at desk scale.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::model::{Instance, VertexId};
use crate::schedule::{ScheduleBuilder, ScheduleSet};

pub const MAX_ROBOTS: usize = 6;
pub const MAX_TASKS: usize = 32;
pub const DEFAULT_STATE_BUDGET: usize = 8_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("no task-completing collision-free schedule within {horizon} timesteps")]
    InfeasibleWithinHorizon { horizon: u32 },
    #[error("state budget of {budget} states exceeded")]
    StateBudgetExceeded { budget: usize },
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
}

/// Joint configuration of all robots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JointState {
    positions: [u8; MAX_ROBOTS],
    progress: [u8; MAX_ROBOTS],
    done: u32,
}

impl JointState {
    pub fn position(&self, robot: usize) -> VertexId {
        VertexId(u32::from(self.positions[robot]))
    }

    /// Timesteps already spent on the task under `robot`, 0 when idle.
    pub fn progress(&self, robot: usize) -> u32 {
        u32::from(self.progress[robot])
    }

    pub fn is_done(&self, task: usize) -> bool {
        self.done & (1 << task) != 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSolution {
    pub makespan: u32,
    pub schedules: ScheduleSet,
    pub states_explored: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub horizon: u32,
    pub state_budget: usize,
}

impl OracleConfig {
    pub fn for_instance(inst: &Instance) -> Self {
        OracleConfig { horizon: default_horizon(inst), state_budget: DEFAULT_STATE_BUDGET }
    }
}

/// `2 * (n + total task duration)`.
pub fn default_horizon(inst: &Instance) -> u32 {
    2 * (inst.graph().vertex_count() as u32 + inst.total_duration())
}

/// Minimum makespan with a witness schedule set, searching up to `horizon`.
pub fn exact_optimum(inst: &Instance, horizon: u32) -> Result<OracleSolution, OracleError> {
    solve(inst, OracleConfig { horizon, state_budget: DEFAULT_STATE_BUDGET })
}

pub fn exact_optimum_default(inst: &Instance) -> Result<OracleSolution, OracleError> {
    solve(inst, OracleConfig::for_instance(inst))
}

/// Decision version: is there a valid set with span at most `limit`?
pub fn feasible_within(inst: &Instance, limit: u32) -> Result<bool, OracleError> {
    match solve(inst, OracleConfig { horizon: limit, state_budget: DEFAULT_STATE_BUDGET }) {
        Ok(_) => Ok(true),
        Err(OracleError::InfeasibleWithinHorizon { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

pub fn solve(inst: &Instance, config: OracleConfig) -> Result<OracleSolution, OracleError> {
    let search = Search::new(inst)?;
    search.run(config)
}

struct Search<'a> {
    inst: &'a Instance,
    k: usize,
    full: u32,
    /// Task index at each vertex (0-based vertex index).
    task_at: Vec<Option<u8>>,
    durations: Vec<u8>,
    neighbors: Vec<Vec<u8>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Action {
    Work,
    Wait,
    Move(u8),
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance) -> Result<Self, OracleError> {
        let n = inst.graph().vertex_count();
        let k = inst.robots().len();
        let m = inst.tasks().len();
        if k > MAX_ROBOTS {
            return Err(OracleError::TooLarge(format!("{k} robots (max {MAX_ROBOTS})")));
        }
        if m > MAX_TASKS {
            return Err(OracleError::TooLarge(format!("{m} tasks (max {MAX_TASKS})")));
        }
        if n > u8::MAX as usize {
            return Err(OracleError::TooLarge(format!("{n} vertices (max 255)")));
        }
        if let Some(t) = inst.tasks().iter().find(|t| t.duration > u32::from(u8::MAX)) {
            return Err(OracleError::TooLarge(format!("task at {} lasts {}", t.vertex, t.duration)));
        }
        let mut task_at = vec![None; n];
        for (i, t) in inst.tasks().iter().enumerate() {
            task_at[t.vertex.index()] = Some(i as u8);
        }
        Ok(Search {
            inst,
            k,
            full: if m == 32 { u32::MAX } else { (1u32 << m) - 1 },
            task_at,
            durations: inst.tasks().iter().map(|t| t.duration as u8).collect(),
            neighbors: inst
                .graph()
                .vertices()
                .map(|v| inst.graph().neighbors(v).iter().map(|u| u.0 as u8).collect())
                .collect(),
        })
    }

    fn start(&self) -> JointState {
        let mut s = JointState { positions: [0; MAX_ROBOTS], progress: [0; MAX_ROBOTS], done: 0 };
        for (i, r) in self.inst.robots().iter().enumerate() {
            s.positions[i] = r.start.0 as u8;
        }
        s
    }

    fn options(&self, s: &JointState, r: usize, out: &mut Vec<Action>) {
        out.clear();
        if s.progress[r] > 0 {
            out.push(Action::Work);
            return;
        }
        let pos = s.positions[r];
        if let Some(t) = self.task_at[pos as usize - 1] {
            if s.done & (1 << t) == 0 {
                out.push(Action::Work);
            }
        }
        out.push(Action::Wait);
        out.extend(self.neighbors[pos as usize - 1].iter().map(|&u| Action::Move(u)));
    }

    fn successors(&self, s: &JointState, options: &mut [Vec<Action>], out: &mut Vec<JointState>) {
        out.clear();
        for (r, opts) in options.iter_mut().enumerate().take(self.k) {
            self.options(s, r, opts);
        }
        let mut next = *s;
        self.expand(s, options, 0, &mut next, out);
    }

    fn expand(&self, s: &JointState, options: &[Vec<Action>], r: usize, next: &mut JointState, out: &mut Vec<JointState>) {
        if r == self.k {
            out.push(*next);
            return;
        }
        let pos = s.positions[r];
        for &action in &options[r] {
            let target = match action {
                Action::Move(u) => u,
                Action::Work | Action::Wait => pos,
            };
            let clash = (0..r).any(|j| {
                next.positions[j] == target || (target == s.positions[j] && next.positions[j] == pos && target != pos)
            });
            if clash {
                continue;
            }
            let saved = *next;
            next.positions[r] = target;
            if action == Action::Work {
                let t = self.task_at[pos as usize - 1].expect("work only offered on task vertices");
                let p = s.progress[r] + 1;
                if p == self.durations[t as usize] {
                    next.progress[r] = 0;
                    next.done |= 1 << t;
                } else {
                    next.progress[r] = p;
                }
            }
            self.expand(s, options, r + 1, next, out);
            *next = saved;
        }
    }

    fn run(&self, config: OracleConfig) -> Result<OracleSolution, OracleError> {
        let start = self.start();
        if self.inst.tasks().is_empty() {
            return Ok(OracleSolution {
                makespan: 0,
                schedules: self.reconstruct(&FxHashMap::default(), start),
                states_explored: 1,
            });
        }
        let mut parents: FxHashMap<JointState, JointState> = FxHashMap::default();
        parents.insert(start, start);
        let mut frontier = vec![start];
        let mut options = vec![Vec::new(); self.k];
        let mut succ = Vec::new();
        for depth in 0..config.horizon {
            let mut next_frontier = Vec::new();
            for s in &frontier {
                self.successors(s, &mut options, &mut succ);
                for &t in &succ {
                    if parents.contains_key(&t) {
                        continue;
                    }
                    parents.insert(t, *s);
                    if t.done == self.full {
                        return Ok(OracleSolution {
                            makespan: depth + 1,
                            schedules: self.reconstruct(&parents, t),
                            states_explored: parents.len(),
                        });
                    }
                    next_frontier.push(t);
                }
                if parents.len() > config.state_budget {
                    return Err(OracleError::StateBudgetExceeded { budget: config.state_budget });
                }
            }
            if next_frontier.is_empty() {
                break;
            }
            frontier = next_frontier;
        }
        Err(OracleError::InfeasibleWithinHorizon { horizon: config.horizon })
    }

    fn reconstruct(&self, parents: &FxHashMap<JointState, JointState>, goal: JointState) -> ScheduleSet {
        let mut chain = vec![goal];
        let mut cur = goal;
        while let Some(&p) = parents.get(&cur) {
            if p == cur {
                break;
            }
            chain.push(p);
            cur = p;
        }
        chain.reverse();

        let mut schedules = Vec::with_capacity(self.k);
        for (r, robot) in self.inst.robots().iter().enumerate() {
            // (target, completes_task) per timestep, trailing waits dropped.
            let mut steps: Vec<(u8, bool, bool)> = chain
                .windows(2)
                .map(|w| {
                    let (a, b) = (&w[0], &w[1]);
                    let worked = b.progress[r] > a.progress[r] || {
                        let pos = a.positions[r];
                        a.positions[r] == b.positions[r]
                            && self.task_at[pos as usize - 1]
                                .is_some_and(|t| a.done & (1 << t) == 0 && b.done & (1 << t) != 0)
                    };
                    let completes = worked && b.progress[r] == 0;
                    (b.positions[r], worked, completes)
                })
                .collect();
            while let Some(&(to, worked, _)) = steps.last() {
                let before = steps.len().checked_sub(2).map_or(robot.start.0 as u8, |i| steps[i].0);
                if worked || before != to {
                    break;
                }
                steps.pop();
            }
            let mut builder = ScheduleBuilder::new(robot.id, robot.start);
            for (to, worked, completes) in steps {
                if worked {
                    if completes {
                        builder.work();
                    }
                } else {
                    builder.step(VertexId(u32::from(to)));
                }
            }
            schedules.push(builder.build());
        }
        ScheduleSet::new(schedules)
    }
}

/// Lower bound: every task needs its nearest robot to travel there and work it.
pub fn distance_lower_bound(inst: &Instance) -> u32 {
    let dists: Vec<_> = inst.robots().iter().map(|r| inst.graph().distances_from(r.start)).collect();
    inst.tasks()
        .iter()
        .map(|t| {
            let reach = dists.iter().filter_map(|d| d[t.vertex.index()]).min().unwrap_or(u32::MAX / 2);
            reach + t.duration
        })
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Graph, Task};
    use crate::schedule::{time_span, validate_set};

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn check(inst: &Instance, expected: u32) {
        let sol = exact_optimum_default(inst).unwrap();
        assert_eq!(sol.makespan, expected);
        let verdict = validate_set(&sol.schedules, inst);
        assert!(verdict.is_valid(), "{verdict}");
        assert_eq!(time_span(&sol.schedules, inst).unwrap(), expected);
    }

    #[test]
    fn partition_gap_optimum_is_seven() {
        check(&fixtures::partition_gap(), 7);
    }

    #[test]
    fn two_robot_split_optimum() {
        // Brute force agrees with the contiguous split value of 6: the left
        // robot alone needs 5 for v1, and the right robot then needs 7 for the rest.
        check(&fixtures::two_robot_split(), 6);
    }

    #[test]
    fn zero_tasks() {
        let inst = Instance::new(Graph::path(4).unwrap(), vec![], vec![v(1), v(3)]).unwrap();
        let sol = exact_optimum_default(&inst).unwrap();
        assert_eq!(sol.makespan, 0);
        assert!(sol.schedules.schedules.iter().all(|s| s.segments.is_empty()));
    }

    #[test]
    fn lab_example_optimum_is_eight() {
        check(&fixtures::lab_example(), 8);
    }

    #[test]
    fn feasibility_threshold() {
        let inst = fixtures::partition_gap();
        assert!(feasible_within(&inst, 7).unwrap());
        assert!(!feasible_within(&inst, 6).unwrap());
        assert!(!feasible_within(&inst, 0).unwrap());
    }

    #[test]
    fn horizon_exhaustion_is_reported() {
        let inst = fixtures::partition_gap();
        assert_eq!(exact_optimum(&inst, 3), Err(OracleError::InfeasibleWithinHorizon { horizon: 3 }));
    }

    #[test]
    fn unreachable_task_is_infeasible() {
        let g = Graph::general(3, vec![[1, 2]]).unwrap();
        let inst = Instance::new(g, vec![Task::new(3, 1)], vec![v(1)]).unwrap();
        assert!(matches!(exact_optimum_default(&inst), Err(OracleError::InfeasibleWithinHorizon { .. })));
    }

    #[test]
    fn commitment_blocks_passing() {
        let inst = Instance::new(
            Graph::path(3).unwrap(),
            vec![Task::new(2, 3), Task::new(1, 1)],
            vec![v(2), v(3)],
        )
        .unwrap();
        // Best is robot 1 stepping aside to v1 while robot 2 follows onto v2: 1 + 3.
        let sol = exact_optimum_default(&inst).unwrap();
        assert!(validate_set(&sol.schedules, &inst).is_valid());
        assert_eq!(sol.makespan, 4);
    }

    #[test]
    fn lower_bound_holds() {
        for inst in [fixtures::partition_gap(), fixtures::two_robot_split(), fixtures::lab_example()] {
            assert!(exact_optimum_default(&inst).unwrap().makespan >= distance_lower_bound(&inst));
        }
    }
}
