//! Trees with at most one vertex of degree 3 ("spiders"): a center with up to
//! three arms. Provides single-robot tours, the two-robot partition solver and
//! the k-robot selection solver used for tadpoles.
//!
//! Candidate task assignments are scored by their collision-free relaxation
//! (each robot's solo span), then realised in increasing score order: plans
//! are composed, collisions are resolved by inserting waits, and the result is
//! validated. The first realised makespan that no remaining score can beat is
//! returned.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::model::{Graph, Instance, ModelError, Task, VertexId};
use crate::path::{solve_k_partition_dp, PathError};
use crate::schedule::{collisions, validate_set, walk_representation, Schedule, ScheduleBuilder, ScheduleError, ScheduleSet, Segment, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpiderError {
    #[error("not a spider: {0}")]
    NotASpider(String),
    #[error("expected {expected} robots, got {got}")]
    RobotCount { expected: usize, got: usize },
    #[error("no candidate assignment could be realised without collisions")]
    NoValidCandidate,
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// A center vertex and the arms leaving it, each listed outward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spider {
    center: VertexId,
    arms: Vec<Vec<VertexId>>,
    /// Per vertex index: `(arm, depth)`; the center has no arm and depth 0.
    place: Vec<(Option<usize>, u32)>,
}

impl Spider {
    /// Checks the shape and picks the degree-3 vertex as center, or a
    /// lowest-numbered leaf when there is none (a path).
    pub fn new(graph: &Graph) -> Result<Self, SpiderError> {
        let n = graph.vertex_count();
        if graph.edge_count() + 1 != n || !graph.is_connected() {
            return Err(SpiderError::NotASpider("graph is not a tree".into()));
        }
        if let Some(v) = graph.vertices().find(|&v| graph.degree(v) > 3) {
            return Err(SpiderError::NotASpider(format!("{v} has degree {}", graph.degree(v))));
        }
        let branching: Vec<_> = graph.vertices().filter(|&v| graph.degree(v) == 3).collect();
        let center = match branching.as_slice() {
            [] => graph.vertices().find(|&v| graph.degree(v) <= 1).expect("a tree has a leaf"),
            [c] => *c,
            _ => return Err(SpiderError::NotASpider(format!("{} vertices of degree 3", branching.len()))),
        };
        Self::with_center(graph, center)
    }

    /// Uses `center` as the hub; every other vertex must have degree <= 2.
    pub fn with_center(graph: &Graph, center: VertexId) -> Result<Self, SpiderError> {
        let n = graph.vertex_count();
        if graph.edge_count() + 1 != n || !graph.is_connected() {
            return Err(SpiderError::NotASpider("graph is not a tree".into()));
        }
        if let Some(v) = graph.vertices().find(|&v| v != center && graph.degree(v) > 2) {
            return Err(SpiderError::NotASpider(format!("{v} branches away from the center")));
        }
        let mut place = vec![(None, 0); n];
        let mut arms = Vec::new();
        for &first in graph.neighbors(center) {
            let arm_id = arms.len();
            let mut arm = vec![first];
            let (mut prev, mut cur) = (center, first);
            place[cur.index()] = (Some(arm_id), 1);
            while let Some(&next) = graph.neighbors(cur).iter().find(|&&u| u != prev) {
                arm.push(next);
                place[next.index()] = (Some(arm_id), arm.len() as u32);
                (prev, cur) = (cur, next);
            }
            arms.push(arm);
        }
        Ok(Spider { center, arms, place })
    }

    pub fn center(&self) -> VertexId {
        self.center
    }

    pub fn arms(&self) -> &[Vec<VertexId>] {
        &self.arms
    }

    pub fn arm_of(&self, v: VertexId) -> Option<usize> {
        self.place[v.index()].0
    }

    /// Hop distance from the center.
    pub fn depth(&self, v: VertexId) -> u32 {
        self.place[v.index()].1
    }

    pub fn dist(&self, a: VertexId, b: VertexId) -> u32 {
        match (self.arm_of(a), self.arm_of(b)) {
            (Some(x), Some(y)) if x == y => self.depth(a).abs_diff(self.depth(b)),
            _ => self.depth(a) + self.depth(b),
        }
    }

    fn at(&self, arm: Option<usize>, depth: u32) -> VertexId {
        match arm {
            Some(j) if depth > 0 => self.arms[j][depth as usize - 1],
            _ => self.center,
        }
    }

    /// Vertices walked from `from` to `to`, excluding `from`.
    pub fn route(&self, from: VertexId, to: VertexId) -> Vec<VertexId> {
        let (fa, fd) = self.place[from.index()];
        let (ta, td) = self.place[to.index()];
        let mut out = Vec::with_capacity(self.dist(from, to) as usize);
        if fa == ta || fd == 0 || td == 0 {
            let arm = if fd == 0 { ta } else { fa };
            if fd <= td {
                out.extend((fd + 1..=td).map(|d| self.at(arm, d)));
            } else {
                out.extend((td..fd).rev().map(|d| self.at(arm, d)));
            }
        } else {
            out.extend((0..fd).rev().map(|d| self.at(fa, d)));
            out.extend((1..=td).map(|d| self.at(ta, d)));
        }
        out
    }
}

/// One timestep-consuming action of a robot plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Act {
    Go(VertexId),
    Wait,
    /// Work the task at the current vertex for its whole duration.
    Work(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Plan {
    pub robot: usize,
    pub start: VertexId,
    pub acts: Vec<Act>,
}

impl Plan {
    pub fn from_schedule(c: &Schedule, start: VertexId, inst: &Instance) -> Self {
        let mut acts = Vec::new();
        for segment in &c.segments {
            match segment {
                Segment::Walk(moves) => {
                    acts.extend(moves.iter().map(|&(a, b)| if a == b { Act::Wait } else { Act::Go(b) }));
                }
                Segment::DoTask(v) => acts.push(Act::Work(inst.task_at(*v).map_or(1, |t| t.duration))),
            }
        }
        Plan { robot: c.robot, start, acts }
    }

    pub fn to_schedule(&self) -> Schedule {
        let mut builder = ScheduleBuilder::new(self.robot, self.start);
        for act in &self.acts {
            match *act {
                Act::Go(v) => {
                    builder.step(v);
                }
                Act::Wait => {
                    builder.wait(1);
                }
                Act::Work(_) => {
                    builder.work();
                }
            }
        }
        builder.build()
    }

    pub fn span(&self) -> u32 {
        self.acts.iter().map(|a| if let Act::Work(d) = a { *d } else { 1 }).sum()
    }

    /// Inserts a wait so that whatever happened at timestep `step` (1-based)
    /// happens one step later. Work in progress is postponed as a whole.
    fn delay_at(&mut self, step: usize) {
        let mut elapsed = 0usize;
        for i in 0..self.acts.len() {
            let len = if let Act::Work(d) = self.acts[i] { d as usize } else { 1 };
            if elapsed + len >= step {
                self.acts.insert(i, Act::Wait);
                return;
            }
            elapsed += len;
        }
        self.acts.push(Act::Wait);
    }
}

/// Tour of a single robot over `tasks` on a tree: depth-first from the start,
/// entering the branch holding the farthest task last, working each task on
/// first arrival. Length is `2 W - D` plus work, where `W` is the size of the
/// tree spanning the start and the tasks and `D` the farthest task distance.
pub(crate) fn tour(graph: &Graph, robot: usize, start: VertexId, tasks: &[Task]) -> Plan {
    let n = graph.vertex_count();
    let mut parent = vec![None; n];
    let mut depth = vec![0u32; n];
    let mut order = vec![start];
    let mut seen = vec![false; n];
    seen[start.index()] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &u in graph.neighbors(v) {
            if !seen[u.index()] {
                seen[u.index()] = true;
                parent[u.index()] = Some(v);
                depth[u.index()] = depth[v.index()] + 1;
                order.push(u);
                queue.push_back(u);
            }
        }
    }
    let mut duration = vec![None; n];
    for t in tasks {
        duration[t.vertex.index()] = Some(t.duration);
    }
    // Deepest task distance within each subtree, `None` when it holds no task.
    let mut reach: Vec<Option<u32>> = (0..n).map(|i| duration[i].map(|_| depth[i])).collect();
    for &v in order.iter().rev() {
        if let (Some(p), Some(r)) = (parent[v.index()], reach[v.index()]) {
            reach[p.index()] = Some(reach[p.index()].map_or(r, |x| x.max(r)));
        }
    }
    tour_with_moves(graph, robot, start, &parent, &reach, &duration)
}

fn tour_with_moves(
    graph: &Graph,
    robot: usize,
    start: VertexId,
    parent: &[Option<VertexId>],
    reach: &[Option<u32>],
    duration: &[Option<u32>],
) -> Plan {
    enum Step {
        /// Enter a vertex; `true` when the walk must come back out of it.
        Enter(VertexId, bool),
        Go(VertexId),
    }
    let mut acts = Vec::new();
    let mut stack = vec![Step::Enter(start, false)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Go(to) => acts.push(Act::Go(to)),
            Step::Enter(v, back) => {
                if v != start {
                    acts.push(Act::Go(v));
                }
                if let Some(d) = duration[v.index()] {
                    acts.push(Act::Work(d));
                }
                if back {
                    stack.push(Step::Go(parent[v.index()].expect("only non-start vertices return")));
                }
                let mut children: Vec<VertexId> = graph
                    .neighbors(v)
                    .iter()
                    .copied()
                    .filter(|u| parent[u.index()] == Some(v) && reach[u.index()].is_some())
                    .collect();
                children.sort_by_key(|u| (reach[u.index()], u.0));
                let last = children.len().saturating_sub(1);
                for (i, &u) in children.iter().enumerate().rev() {
                    stack.push(Step::Enter(u, back || i != last));
                }
            }
        }
    }
    Plan { robot, start, acts }
}

/// Solo span of the tour: `2 W - D` moves plus the work.
pub(crate) fn tour_span(graph: &Graph, start: VertexId, tasks: &[Task]) -> u32 {
    if tasks.is_empty() {
        return 0;
    }
    tour(graph, 0, start, tasks).span()
}

/// Which robot yields at a collision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Yield {
    /// The robot moving onto an occupied vertex, else the one with more slack.
    Mover,
    /// The robot with the shorter plan.
    Slack,
}

fn step_of(v: &Violation) -> usize {
    match v {
        Violation::VertexCollision { step, .. }
        | Violation::DepartureCollision { step, .. }
        | Violation::SwapCollision { step, .. } => *step,
        _ => 0,
    }
}

/// Resolves collisions by inserting waits at the earliest conflict. `plans`
/// are indexed by robot id − 1. Returns `false` when it gives up.
fn resolve(inst: &Instance, plans: &mut [Plan], rule: Yield) -> bool {
    let limit = 2 * (inst.graph().vertex_count() + inst.total_duration() as usize + 2) * plans.len().max(1);
    for _ in 0..=limit {
        let reps: Vec<_> = match plans.iter().map(|p| walk_representation(&p.to_schedule(), inst)).collect() {
            Ok(reps) => reps,
            Err(_) => return false,
        };
        let Some(first) = collisions(&reps).into_iter().min_by_key(step_of) else {
            return true;
        };
        let (step, (a, b)) = match first {
            Violation::VertexCollision { step, robots, .. }
            | Violation::DepartureCollision { step, robots, .. }
            | Violation::SwapCollision { step, robots, .. } => (step, robots),
            _ => return false,
        };
        let active = |r: usize| step <= reps[r - 1].len();
        let moving = |r: usize| {
            let (from, to) = reps[r - 1].move_at(step);
            from != to
        };
        let span = |r: usize| plans[r - 1].span();
        let victim = match (active(a), active(b)) {
            (false, false) => return false,
            (true, false) => a,
            (false, true) => b,
            (true, true) => {
                let by_slack = if span(a) <= span(b) { a } else { b };
                match rule {
                    Yield::Mover if moving(a) && !moving(b) => a,
                    Yield::Mover if moving(b) && !moving(a) => b,
                    _ => by_slack,
                }
            }
        };
        plans[victim - 1].delay_at(step);
    }
    false
}

/// Realises plans: resolves collisions under each yield rule and keeps the
/// shortest valid result.
pub(crate) fn realise(inst: &Instance, plans: Vec<Plan>) -> Option<(u32, ScheduleSet)> {
    let mut best: Option<(u32, ScheduleSet)> = None;
    for rule in [Yield::Mover, Yield::Slack] {
        let mut attempt = plans.clone();
        if !resolve(inst, &mut attempt, rule) {
            continue;
        }
        let set = ScheduleSet::new(attempt.iter().map(Plan::to_schedule).collect());
        if !validate_set(&set, inst).is_valid() {
            continue;
        }
        let span = attempt.iter().map(Plan::span).max().unwrap_or(0);
        if best.as_ref().is_none_or(|(s, _)| span < *s) {
            best = Some((span, set));
        }
    }
    best
}

/// Scored candidates, realised cheapest first until no score can improve on
/// the best realised makespan.
fn best_first<C>(
    mut candidates: Vec<(u32, C)>,
    mut realise_one: impl FnMut(&C) -> Result<Option<(u32, ScheduleSet)>, SpiderError>,
) -> Result<Option<(u32, ScheduleSet, C)>, SpiderError> {
    candidates.sort_by_key(|(score, _)| *score);
    let mut best: Option<(u32, ScheduleSet, C)> = None;
    for (score, cand) in candidates {
        if best.as_ref().is_some_and(|(s, _, _)| score >= *s) {
            break;
        }
        if let Some((span, set)) = realise_one(&cand)? {
            if best.as_ref().is_none_or(|(s, _, _)| span < *s) {
                best = Some((span, set, cand));
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoRobotSpider {
    pub makespan: u32,
    /// Task vertices handled by robot 1 and robot 2.
    pub assignment: [Vec<VertexId>; 2],
    pub schedules: ScheduleSet,
}

/// Two-robot partitions: on every arm the tasks are split into an inner and
/// an outer part, each handed to either robot; the task on the center goes to
/// either robot. Returns masks of robot 1's tasks.
fn two_robot_partitions(spider: &Spider, tasks: &[Task]) -> BTreeSet<u64> {
    let mut per_arm: Vec<Vec<usize>> = vec![Vec::new(); spider.arms().len()];
    let mut center = None;
    for (i, t) in tasks.iter().enumerate() {
        match spider.arm_of(t.vertex) {
            Some(j) => per_arm[j].push(i),
            None => center = Some(i),
        }
    }
    let mut partial: Vec<u64> = match center {
        Some(c) => vec![0, 1 << c],
        None => vec![0],
    };
    for list in &mut per_arm {
        list.sort_by_key(|&i| spider.depth(tasks[i].vertex));
        let mut next = BTreeSet::new();
        for &m in &partial {
            for p in 0..=list.len() {
                let inner: u64 = list[..p].iter().fold(0, |m, &i| m | 1 << i);
                let outer: u64 = list[p..].iter().fold(0, |m, &i| m | 1 << i);
                next.insert(m | inner);
                next.insert(m | outer);
            }
        }
        partial = next.into_iter().collect();
    }
    partial.into_iter().collect()
}

fn subset(tasks: &[Task], mask: u64) -> Vec<Task> {
    tasks.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, t)| *t).collect()
}

/// Two robots on a spider tree.
pub fn solve_two_robot_spider(inst: &Instance) -> Result<TwoRobotSpider, SpiderError> {
    let spider = Spider::new(inst.graph())?;
    if inst.robots().len() != 2 {
        return Err(SpiderError::RobotCount { expected: 2, got: inst.robots().len() });
    }
    if inst.tasks().len() > 63 {
        return Err(SpiderError::NotASpider("more than 63 tasks".into()));
    }
    two_robot_on(&spider, inst)
}

fn two_robot_on(spider: &Spider, inst: &Instance) -> Result<TwoRobotSpider, SpiderError> {
    let tasks = inst.tasks();
    let starts = [inst.robots()[0].start, inst.robots()[1].start];
    let full = if tasks.len() == 64 { u64::MAX } else { (1u64 << tasks.len()) - 1 };
    let graph = inst.graph();
    let candidates: Vec<(u32, u64)> = two_robot_partitions(spider, tasks)
        .into_iter()
        .map(|m| {
            let a = tour_span(graph, starts[0], &subset(tasks, m));
            let b = tour_span(graph, starts[1], &subset(tasks, full & !m));
            (a.max(b), m)
        })
        .collect();
    let best = best_first(candidates, |&m| {
        let plans = vec![
            tour(graph, 1, starts[0], &subset(tasks, m)),
            tour(graph, 2, starts[1], &subset(tasks, full & !m)),
        ];
        Ok(realise(inst, plans))
    })?;
    let (makespan, schedules, m) = best.ok_or(SpiderError::NoValidCandidate)?;
    let verts = |mask: u64| subset(tasks, mask).iter().map(|t| t.vertex).collect();
    Ok(TwoRobotSpider { makespan, assignment: [verts(m), verts(full & !m)], schedules })
}

/// One selection of the k-robot solver.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Selection {
    /// Robots (ids) serving the core tree around the center; at most two.
    pub crossing: Vec<usize>,
    /// Per arm, how many tasks nearest the center belong to the core.
    pub core_prefix: Vec<usize>,
    /// Arm whose instance takes the task on the center, `None` for the core
    /// (or when the center holds no task).
    pub center_arm: Option<usize>,
    /// Per robot id − 1: the arm it serves, `None` for crossing robots.
    pub arm_of_robot: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpiderSolution {
    pub makespan: u32,
    pub selection: Selection,
    pub schedules: ScheduleSet,
}

/// Realised result of one part of a selection: a makespan and plans for the
/// robots involved (indexed by robot id − 1 in the full instance).
type Part = Option<(u32, Vec<Plan>)>;

/// Graph the spider was cut from: plans are validated on its instance and a
/// lone core robot may take `walk` there instead of the tree tour.
pub(crate) struct Host<'a> {
    pub inst: &'a Instance,
    pub walk: &'a WalkFn<'a>,
}

/// Plan for `(robot, start, tasks)`, if the host offers one.
pub(crate) type WalkFn<'a> = dyn Fn(usize, VertexId, &[Task]) -> Option<Plan> + 'a;

struct KSolver<'a> {
    inst: &'a Instance,
    spider: &'a Spider,
    host: Option<&'a Host<'a>>,
    /// Task indices per arm, innermost first.
    arm_tasks: Vec<Vec<usize>>,
    center_task: Option<usize>,
    core_cache: HashMap<(Vec<usize>, u64), Part>,
    arm_cache: HashMap<(usize, Vec<usize>, u64), Part>,
}

impl<'a> KSolver<'a> {
    fn new(inst: &'a Instance, spider: &'a Spider, host: Option<&'a Host<'a>>) -> Self {
        let mut arm_tasks = vec![Vec::new(); spider.arms().len()];
        let mut center_task = None;
        for (i, t) in inst.tasks().iter().enumerate() {
            match spider.arm_of(t.vertex) {
                Some(j) => arm_tasks[j].push(i),
                None => center_task = Some(i),
            }
        }
        for list in &mut arm_tasks {
            list.sort_by_key(|&i| spider.depth(inst.tasks()[i].vertex));
        }
        KSolver { inst, spider, host, arm_tasks, center_task, core_cache: HashMap::new(), arm_cache: HashMap::new() }
    }

    fn mask(ids: impl IntoIterator<Item = usize>) -> u64 {
        ids.into_iter().fold(0, |m, i| m | 1 << i)
    }

    /// Core tree tasks served by one or two robots.
    fn core(&mut self, robots: &[usize], mask: u64) -> Result<Part, SpiderError> {
        let key = (robots.to_vec(), mask);
        if let Some(hit) = self.core_cache.get(&key) {
            return Ok(hit.clone());
        }
        let tasks = subset(self.inst.tasks(), mask);
        let result = match robots {
            [r] => {
                let start = self.inst.robots()[r - 1].start;
                let mut plan = tour(self.inst.graph(), *r, start, &tasks);
                if let Some(walk) = self.host.and_then(|h| (h.walk)(*r, start, &tasks)) {
                    if walk.span() < plan.span() {
                        plan = walk;
                    }
                }
                Some((plan.span(), vec![plan]))
            }
            [a, b] => {
                let starts = vec![self.inst.robots()[a - 1].start, self.inst.robots()[b - 1].start];
                let sub = Instance::new(self.inst.graph().clone(), tasks, starts)?;
                match two_robot_on(self.spider, &sub) {
                    Ok(sol) => {
                        let plans = sol
                            .schedules
                            .schedules
                            .iter()
                            .map(|c| {
                                let id = if c.robot == 1 { *a } else { *b };
                                let mut p = Plan::from_schedule(c, self.inst.robots()[id - 1].start, &sub);
                                p.robot = id;
                                p
                            })
                            .collect();
                        Some((sol.makespan, plans))
                    }
                    Err(SpiderError::NoValidCandidate) => None,
                    Err(e) => return Err(e),
                }
            }
            _ => unreachable!("core has one or two robots"),
        };
        self.core_cache.insert(key, result.clone());
        Ok(result)
    }

    /// Tasks `mask` on arm `arm` (plus possibly the center) served by
    /// `robots`, as a path instance: the arm, the center, and a virtual
    /// extension beyond the center on which robots from elsewhere are placed
    /// at their distance from the center (next free slot, by robot id).
    fn arm(&mut self, arm: usize, robots: &[usize], mask: u64) -> Result<Part, SpiderError> {
        let key = (arm, robots.to_vec(), mask);
        if let Some(hit) = self.arm_cache.get(&key) {
            return Ok(hit.clone());
        }
        let result = self.solve_arm(arm, robots, mask)?;
        self.arm_cache.insert(key, result.clone());
        Ok(result)
    }

    fn solve_arm(&self, arm: usize, robots: &[usize], mask: u64) -> Result<Part, SpiderError> {
        let spider = self.spider;
        let len = spider.arms()[arm].len() as u32;
        // Virtual slot per robot from elsewhere; slot 0 is the center itself.
        let mut taken = BTreeSet::new();
        let mut slot: HashMap<usize, u32> = HashMap::new();
        let mut outsiders: Vec<(u32, usize)> = Vec::new();
        for &r in robots {
            let s = self.inst.robots()[r - 1].start;
            if spider.arm_of(s) != Some(arm) {
                outsiders.push((spider.depth(s), r));
            }
        }
        outsiders.sort();
        for &(d, r) in &outsiders {
            let mut i = d;
            while taken.contains(&i) {
                i += 1;
            }
            taken.insert(i);
            slot.insert(r, i);
        }
        let virt = taken.iter().max().copied().unwrap_or(0);
        // Extended path: 1..=virt virtual (vertex u at distance virt+1-u),
        // virt+1 the center, virt+1+d the arm vertex at depth d.
        let hub = virt + 1;
        let to_ext = |v: VertexId| if v == spider.center() { hub } else { hub + spider.depth(v) };
        let tasks: Vec<Task> = subset(self.inst.tasks(), mask)
            .into_iter()
            .map(|t| Task { vertex: VertexId(to_ext(t.vertex)), duration: t.duration })
            .collect();
        let starts: Vec<VertexId> = robots
            .iter()
            .map(|r| match slot.get(r) {
                Some(&i) => VertexId(hub - i),
                None => VertexId(to_ext(self.inst.robots()[r - 1].start)),
            })
            .collect();
        let ext = Instance::new(Graph::path(hub + len)?, tasks, starts)?;
        let solved = match solve_k_partition_dp(&ext) {
            Ok(s) => s,
            Err(PathError::RepairFailed(_)) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let mut plans = Vec::with_capacity(robots.len());
        for (local, &r) in robots.iter().enumerate() {
            let start = self.inst.robots()[r - 1].start;
            let home = spider.route(start, spider.center());
            let depth = home.len() as u32;
            let back = |e: VertexId| -> VertexId {
                if e.0 > hub {
                    spider.arms()[arm][(e.0 - hub - 1) as usize]
                } else if e.0 == hub {
                    spider.center()
                } else {
                    let q = hub - e.0;
                    if q >= depth {
                        start
                    } else {
                        home[(depth - q - 1) as usize]
                    }
                }
            };
            let c = solved.schedules.get(local + 1).cloned().unwrap_or_else(|| Schedule::empty(local + 1));
            let mapped = c.map_vertices(r, back);
            plans.push(Plan::from_schedule(&mapped, start, self.inst));
        }
        Ok(Some((solved.makespan, plans)))
    }
}

/// k robots on a spider: best selection of up to two crossing robots serving
/// the tasks nearest the center, with every other robot serving one arm.
pub fn solve_spider(inst: &Instance, spider: &Spider) -> Result<SpiderSolution, SpiderError> {
    solve_spider_in(inst, spider, None)
}

pub(crate) fn solve_spider_in(
    inst: &Instance,
    spider: &Spider,
    host: Option<&Host<'_>>,
) -> Result<SpiderSolution, SpiderError> {
    let k = inst.robots().len();
    let m = inst.tasks().len();
    if m > 63 {
        return Err(SpiderError::NotASpider("more than 63 tasks".into()));
    }
    if m == 0 {
        let schedules = ScheduleSet::new((1..=k).map(Schedule::empty).collect());
        let selection = Selection { crossing: vec![], core_prefix: vec![0; spider.arms().len()], center_arm: None, arm_of_robot: vec![None; k] };
        return Ok(SpiderSolution { makespan: 0, selection, schedules });
    }
    let mut solver = KSolver::new(inst, spider, host);
    let arms = spider.arms().len();
    let mut cores: Vec<Vec<usize>> = vec![vec![]];
    for a in 1..=k {
        cores.push(vec![a]);
        for b in a + 1..=k {
            cores.push(vec![a, b]);
        }
    }
    // Every prefix vector.
    let mut prefixes: Vec<Vec<usize>> = vec![vec![]];
    for j in 0..arms {
        prefixes = prefixes
            .into_iter()
            .flat_map(|p| (0..=solver.arm_tasks[j].len()).map(move |x| [p.clone(), vec![x]].concat()))
            .collect();
    }
    let center_choices: Vec<Option<usize>> =
        if solver.center_task.is_some() { std::iter::once(None).chain((0..arms).map(Some)).collect() } else { vec![None] };

    let mut candidates: Vec<(u32, Selection)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for core in &cores {
        let others: Vec<usize> = (1..=k).filter(|r| !core.contains(r)).collect();
        for prefix in &prefixes {
            for &center_arm in &center_choices {
                let mut core_mask =
                    KSolver::mask((0..arms).flat_map(|j| solver.arm_tasks[j][..prefix[j]].iter().copied()));
                if let (Some(c), None) = (solver.center_task, center_arm) {
                    core_mask |= 1 << c;
                }
                if core.is_empty() != (core_mask == 0) {
                    continue;
                }
                let core_score = match core.as_slice() {
                    [] => Some(0),
                    _ => solver.core(core, core_mask)?.map(|(s, _)| s),
                };
                let Some(core_score) = core_score else { continue };
                let outer: Vec<u64> = (0..arms)
                    .map(|j| {
                        let mut mk = KSolver::mask(solver.arm_tasks[j][prefix[j]..].iter().copied());
                        if let (Some(c), Some(a)) = (solver.center_task, center_arm) {
                            if a == j {
                                mk |= 1 << c;
                            }
                        }
                        mk
                    })
                    .collect();
                let busy: Vec<usize> = (0..arms).filter(|&j| outer[j] != 0).collect();
                if busy.is_empty() {
                    let arm_of_robot = vec![None; k];
                    let sel = Selection { crossing: core.clone(), core_prefix: prefix.clone(), center_arm, arm_of_robot };
                    if seen.insert(sel.clone()) {
                        candidates.push((core_score, sel));
                    }
                    continue;
                }
                // Each other robot serves one busy arm or stays idle.
                let choices = busy.len() + 1;
                let total = choices.checked_pow(others.len() as u32).unwrap_or(usize::MAX);
                if total > 1 << 20 {
                    return Err(SpiderError::NotASpider(format!("{} arm assignments is too many", total)));
                }
                for code in 0..total {
                    let mut c = code;
                    let mut arm_of_robot = vec![None; k];
                    for &r in &others {
                        let pick = c % choices;
                        c /= choices;
                        arm_of_robot[r - 1] = busy.get(pick).copied();
                    }
                    if busy.iter().any(|&j| !arm_of_robot.contains(&Some(j))) {
                        continue;
                    }
                    let mut score = core_score;
                    let mut ok = true;
                    for &j in &busy {
                        let robots: Vec<usize> = (1..=k).filter(|&r| arm_of_robot[r - 1] == Some(j)).collect();
                        match solver.arm(j, &robots, outer[j])? {
                            Some((s, _)) => score = score.max(s),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let sel = Selection { crossing: core.clone(), core_prefix: prefix.clone(), center_arm, arm_of_robot };
                    if seen.insert(sel.clone()) {
                        candidates.push((score, sel));
                    }
                }
            }
        }
    }

    let best = best_first(candidates, |sel| {
        let mut plans: Vec<Plan> =
            inst.robots().iter().map(|r| Plan { robot: r.id, start: r.start, acts: Vec::new() }).collect();
        let core_mask = {
            let mut mk = KSolver::mask((0..arms).flat_map(|j| solver.arm_tasks[j][..sel.core_prefix[j]].iter().copied()));
            if let (Some(c), None) = (solver.center_task, sel.center_arm) {
                mk |= 1 << c;
            }
            mk
        };
        if !sel.crossing.is_empty() {
            let Some((_, core_plans)) = solver.core(&sel.crossing, core_mask)? else { return Ok(None) };
            for p in core_plans {
                let id = p.robot;
                plans[id - 1] = p;
            }
        }
        for j in 0..arms {
            let mut mk = KSolver::mask(solver.arm_tasks[j][sel.core_prefix[j]..].iter().copied());
            if let (Some(c), Some(a)) = (solver.center_task, sel.center_arm) {
                if a == j {
                    mk |= 1 << c;
                }
            }
            if mk == 0 {
                continue;
            }
            let robots: Vec<usize> = (1..=k).filter(|&r| sel.arm_of_robot[r - 1] == Some(j)).collect();
            let Some((_, arm_plans)) = solver.arm(j, &robots, mk)? else { return Ok(None) };
            for p in arm_plans {
                let id = p.robot;
                plans[id - 1] = p;
            }
        }
        Ok(realise(host.map_or(inst, |h| h.inst), plans))
    })?;
    let (makespan, schedules, selection) = best.ok_or(SpiderError::NoValidCandidate)?;
    Ok(SpiderSolution { makespan, selection, schedules })
}
