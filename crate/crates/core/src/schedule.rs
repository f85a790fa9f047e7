//! Schedules, their walk representation, and the task-completing /
//! collision-free validator.
//!
//! A schedule is an alternating sequence of walks and tasks. Flattening it
//! into one move per timestep (each task of duration `d` becomes `d`
//! self-loops at its vertex) gives the walk representation, on which all
//! collision rules are checked. A robot that has finished its schedule stays
//! on its last vertex for the rest of the set's span.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, VertexId};

/// One timestep of movement `(from, to)`; `from == to` is a self-loop.
pub type Move = (VertexId, VertexId);

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Segment {
    #[serde(rename = "walk")]
    Walk(Vec<Move>),
    /// Complete the task located at this vertex, for its full duration.
    #[serde(rename = "task")]
    DoTask(VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    pub robot: usize,
    pub segments: Vec<Segment>,
}

impl Schedule {
    pub fn empty(robot: usize) -> Self {
        Schedule { robot, segments: Vec::new() }
    }

    /// Vertices of the tasks this schedule completes, in order.
    pub fn task_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.segments.iter().filter_map(|s| match s {
            Segment::DoTask(v) => Some(*v),
            Segment::Walk(_) => None,
        })
    }

    /// Prepends `steps` waits at `start`.
    pub fn delay(&mut self, start: VertexId, steps: u32) {
        if steps == 0 {
            return;
        }
        let waits = std::iter::repeat_n((start, start), steps as usize);
        match self.segments.first_mut() {
            Some(Segment::Walk(moves)) => {
                let tail = std::mem::take(moves);
                moves.extend(waits);
                moves.extend(tail);
            }
            _ => self.segments.insert(0, Segment::Walk(waits.collect())),
        }
    }

    /// Relabels every vertex through `f`.
    pub fn map_vertices(&self, robot: usize, f: impl Fn(VertexId) -> VertexId) -> Schedule {
        let segments = self
            .segments
            .iter()
            .map(|s| match s {
                Segment::Walk(moves) => Segment::Walk(moves.iter().map(|&(a, b)| (f(a), f(b))).collect()),
                Segment::DoTask(v) => Segment::DoTask(f(*v)),
            })
            .collect();
        Schedule { robot, segments }
    }
}

/// Incrementally assembles a schedule from single moves and tasks.
#[derive(Debug, Clone)]
pub struct ScheduleBuilder {
    robot: usize,
    position: VertexId,
    segments: Vec<Segment>,
    walk: Vec<Move>,
}

impl ScheduleBuilder {
    pub fn new(robot: usize, start: VertexId) -> Self {
        ScheduleBuilder { robot, position: start, segments: Vec::new(), walk: Vec::new() }
    }

    pub fn position(&self) -> VertexId {
        self.position
    }

    pub fn step(&mut self, to: VertexId) -> &mut Self {
        self.walk.push((self.position, to));
        self.position = to;
        self
    }

    pub fn wait(&mut self, steps: u32) -> &mut Self {
        for _ in 0..steps {
            self.step(self.position);
        }
        self
    }

    /// Follows `route`, one vertex per timestep.
    pub fn follow(&mut self, route: impl IntoIterator<Item = VertexId>) -> &mut Self {
        for v in route {
            self.step(v);
        }
        self
    }

    /// Works the task at the current vertex.
    pub fn work(&mut self) -> &mut Self {
        if !self.walk.is_empty() {
            self.segments.push(Segment::Walk(std::mem::take(&mut self.walk)));
        }
        self.segments.push(Segment::DoTask(self.position));
        self
    }

    pub fn build(mut self) -> Schedule {
        if !self.walk.is_empty() {
            self.segments.push(Segment::Walk(self.walk));
        }
        Schedule { robot: self.robot, segments: self.segments }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleSet {
    pub schedules: Vec<Schedule>,
}

impl ScheduleSet {
    pub fn new(mut schedules: Vec<Schedule>) -> Self {
        schedules.sort_by_key(|s| s.robot);
        ScheduleSet { schedules }
    }

    pub fn get(&self, robot: usize) -> Option<&Schedule> {
        self.schedules.iter().find(|s| s.robot == robot)
    }
}

/// The timestep-indexed move sequence of a schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkRep {
    start: VertexId,
    moves: Vec<Move>,
}

impl WalkRep {
    pub fn new(start: VertexId, moves: Vec<Move>) -> Self {
        WalkRep { start, moves }
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn end(&self) -> VertexId {
        self.moves.last().map_or(self.start, |m| m.1)
    }

    /// Vertex occupied after timestep `t` (`t = 0` is the start); the robot
    /// stays on its final vertex once the moves run out.
    pub fn position_at(&self, t: usize) -> VertexId {
        match t {
            0 => self.start,
            t if t <= self.moves.len() => self.moves[t - 1].1,
            _ => self.end(),
        }
    }

    /// Move taken at timestep `t >= 1`, a self-loop past the end.
    pub fn move_at(&self, t: usize) -> Move {
        self.moves.get(t - 1).copied().unwrap_or((self.end(), self.end()))
    }

    /// Pads with self-loops at the final vertex up to length `span`.
    pub fn pad_to(&self, span: usize) -> WalkRep {
        let mut moves = self.moves.clone();
        let end = self.end();
        moves.resize(span.max(moves.len()), (end, end));
        WalkRep { start: self.start, moves }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("robot {0} is not part of the instance")]
    UnknownRobot(usize),
    #[error("robot {robot}: no task at {vertex}")]
    UnknownTask { robot: usize, vertex: VertexId },
    #[error("robot {robot}: {reason}")]
    Malformed { robot: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StepKind {
    Move,
    Wait,
    Work,
}

fn expand(c: &Schedule, inst: &Instance) -> Result<(WalkRep, Vec<StepKind>), ScheduleError> {
    let robot = inst.robot(c.robot).ok_or(ScheduleError::UnknownRobot(c.robot))?;
    let graph = inst.graph();
    let malformed = |reason: String| ScheduleError::Malformed { robot: c.robot, reason };
    let mut pos = robot.start;
    let mut moves = Vec::new();
    let mut kinds = Vec::new();
    for (i, segment) in c.segments.iter().enumerate() {
        match segment {
            Segment::Walk(walk) => {
                if walk.is_empty() {
                    return Err(malformed(format!("segment {} is an empty walk", i + 1)));
                }
                for &(from, to) in walk {
                    if from != pos {
                        return Err(malformed(format!("move ({from}, {to}) does not start at {pos}")));
                    }
                    if !graph.is_move(from, to) {
                        return Err(malformed(format!("({from}, {to}) is neither an edge nor a self-loop")));
                    }
                    moves.push((from, to));
                    kinds.push(if from == to { StepKind::Wait } else { StepKind::Move });
                    pos = to;
                }
            }
            Segment::DoTask(v) => {
                let task = inst.task_at(*v).ok_or(ScheduleError::UnknownTask { robot: c.robot, vertex: *v })?;
                if *v != pos {
                    return Err(malformed(format!("task at {v} scheduled while standing on {pos}")));
                }
                for _ in 0..task.duration {
                    moves.push((pos, pos));
                    kinds.push(StepKind::Work);
                }
            }
        }
    }
    Ok((WalkRep { start: robot.start, moves }, kinds))
}

/// Flattens a schedule into its walk representation.
pub fn walk_representation(c: &Schedule, inst: &Instance) -> Result<WalkRep, ScheduleError> {
    expand(c, inst).map(|(rep, _)| rep)
}

/// Number of timesteps of a single schedule.
pub fn schedule_span(c: &Schedule, inst: &Instance) -> Result<u32, ScheduleError> {
    walk_representation(c, inst).map(|w| w.len() as u32)
}

/// Largest span over the set.
pub fn time_span(cs: &ScheduleSet, inst: &Instance) -> Result<u32, ScheduleError> {
    cs.schedules.iter().map(|c| schedule_span(c, inst)).try_fold(0, |acc, s| Ok(acc.max(s?)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnknownRobot { robot: usize },
    MissingSchedule { robot: usize },
    DuplicateSchedule { robot: usize },
    Malformed { robot: usize, reason: String },
    TaskNotCompleted { task: VertexId },
    TaskRepeated { task: VertexId, robots: Vec<usize> },
    StartCollision { robots: (usize, usize), vertex: VertexId },
    VertexCollision { step: usize, robots: (usize, usize), vertex: VertexId },
    DepartureCollision { step: usize, robots: (usize, usize), vertex: VertexId },
    SwapCollision { step: usize, robots: (usize, usize), edge: (VertexId, VertexId) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownRobot { robot } => write!(f, "schedule for unknown robot {robot}"),
            Violation::MissingSchedule { robot } => write!(f, "robot {robot} has no schedule"),
            Violation::DuplicateSchedule { robot } => write!(f, "robot {robot} has more than one schedule"),
            Violation::Malformed { robot, reason } => write!(f, "robot {robot}: malformed schedule: {reason}"),
            Violation::TaskNotCompleted { task } => write!(f, "task at {task} is not completed"),
            Violation::TaskRepeated { task, robots } => {
                write!(f, "task at {task} is completed more than once (robots {robots:?})")
            }
            Violation::StartCollision { robots: (a, b), vertex } => {
                write!(f, "robots {a} and {b} both start on {vertex}")
            }
            Violation::VertexCollision { step, robots: (a, b), vertex } => {
                write!(f, "timestep {step}: robots {a} and {b} both end on {vertex}")
            }
            Violation::DepartureCollision { step, robots: (a, b), vertex } => {
                write!(f, "timestep {step}: robots {a} and {b} both leave {vertex}")
            }
            Violation::SwapCollision { step, robots: (a, b), edge: (u, v) } => {
                write!(f, "timestep {step}: robots {a} and {b} swap across ({u}, {v})")
            }
        }
    }
}

/// Outcome of [`validate_set`]; valid iff there are no violations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        write!(f, "invalid")?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

/// Checks that `cs` is task-completing and collision-free for `inst`.
pub fn validate_set(cs: &ScheduleSet, inst: &Instance) -> Verdict {
    let mut violations = Vec::new();
    let k = inst.robots().len();

    // One walk representation per robot; robots without a usable schedule
    // are treated as standing still on their start vertex.
    let mut reps: Vec<Option<WalkRep>> = vec![None; k];
    let mut seen = vec![false; k];
    let mut completed: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    for c in &cs.schedules {
        if inst.robot(c.robot).is_none() {
            violations.push(Violation::UnknownRobot { robot: c.robot });
            continue;
        }
        let slot = c.robot - 1;
        if std::mem::replace(&mut seen[slot], true) {
            violations.push(Violation::DuplicateSchedule { robot: c.robot });
            continue;
        }
        match walk_representation(c, inst) {
            Ok(rep) => {
                reps[slot] = Some(rep);
                for v in c.task_vertices() {
                    completed.entry(v).or_default().push(c.robot);
                }
            }
            Err(e) => violations.push(Violation::Malformed { robot: c.robot, reason: e.to_string() }),
        }
    }
    for robot in inst.robots() {
        if !seen[robot.id - 1] {
            violations.push(Violation::MissingSchedule { robot: robot.id });
        }
    }

    for task in inst.tasks() {
        match completed.get(&task.vertex) {
            None => violations.push(Violation::TaskNotCompleted { task: task.vertex }),
            Some(robots) if robots.len() > 1 => {
                violations.push(Violation::TaskRepeated { task: task.vertex, robots: robots.clone() })
            }
            Some(_) => {}
        }
    }

    let reps: Vec<WalkRep> = inst
        .robots()
        .iter()
        .zip(reps)
        .map(|(r, rep)| rep.unwrap_or_else(|| WalkRep::new(r.start, Vec::new())))
        .collect();
    violations.extend(collisions(&reps));
    Verdict { violations }
}

/// Collision rules over walk representations, indexed by robot id − 1.
/// Shorter representations are padded at their final vertex.
pub fn collisions(reps: &[WalkRep]) -> Vec<Violation> {
    let mut violations = Vec::new();
    let span = reps.iter().map(WalkRep::len).max().unwrap_or(0);
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            let robots = (i + 1, j + 1);
            if reps[i].start() == reps[j].start() {
                violations.push(Violation::StartCollision { robots, vertex: reps[i].start() });
            }
            for step in 1..=span {
                let (v, u) = reps[i].move_at(step);
                let (v2, u2) = reps[j].move_at(step);
                if u == u2 {
                    violations.push(Violation::VertexCollision { step, robots, vertex: u });
                }
                if v == v2 {
                    violations.push(Violation::DepartureCollision { step, robots, vertex: v });
                }
                if v != u && (v, u) == (u2, v2) {
                    violations.push(Violation::SwapCollision { step, robots, edge: (v, u) });
                }
            }
        }
    }
    violations
}

/// Text chart: one row per robot, one column per timestep showing the vertex
/// occupied after that step; `*` marks task work and `.` marks waiting.
pub fn gantt(cs: &ScheduleSet, inst: &Instance) -> Result<String, ScheduleError> {
    let mut rows = Vec::new();
    for c in &cs.schedules {
        let (rep, kinds) = expand(c, inst)?;
        rows.push((c.robot, rep, kinds));
    }
    let span = rows.iter().map(|(_, rep, _)| rep.len()).max().unwrap_or(0);
    if span == 0 {
        return Ok(String::new());
    }
    let cells: Vec<(usize, Vec<String>)> = rows
        .into_iter()
        .map(|(robot, rep, kinds)| {
            let cells = (1..=span)
                .map(|t| {
                    let mark = match kinds.get(t - 1) {
                        Some(StepKind::Work) => "*",
                        Some(StepKind::Move) => "",
                        Some(StepKind::Wait) | None => ".",
                    };
                    format!("{}{mark}", rep.position_at(t).get())
                })
                .collect();
            (robot, cells)
        })
        .collect();
    let width = cells.iter().flat_map(|(_, c)| c.iter().map(String::len)).max().unwrap_or(1);
    let label_width = cells.iter().map(|(r, _)| format!("R{r}").len()).max().unwrap_or(2);
    let mut out = String::new();
    for (robot, row) in cells {
        let label = format!("R{robot}");
        out.push_str(&format!("{label:<label_width$} |"));
        for cell in row {
            out.push_str(&format!(" {cell:<width$}"));
        }
        let trimmed = out.trim_end().len();
        out.truncate(trimmed);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Graph, Task};

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn walk(pairs: &[(u32, u32)]) -> Segment {
        Segment::Walk(pairs.iter().map(|&(a, b)| (v(a), v(b))).collect())
    }

    #[test]
    fn lab_walk_representation() {
        let inst = fixtures::lab_example();
        let c = Schedule { robot: 1, segments: vec![walk(&[(7, 8), (8, 5)]), Segment::DoTask(v(5))] };
        let rep = walk_representation(&c, &inst).unwrap();
        let mut expected = vec![(v(7), v(8)), (v(8), v(5))];
        expected.extend(std::iter::repeat_n((v(5), v(5)), 5));
        assert_eq!(rep.moves(), expected.as_slice());
        assert_eq!(rep.len(), 7);
    }

    #[test]
    fn empty_and_wait_only() {
        let inst = fixtures::lab_example();
        let rep = walk_representation(&Schedule::empty(1), &inst).unwrap();
        assert!(rep.is_empty());
        let c = Schedule { robot: 2, segments: vec![walk(&[(9, 9), (9, 9)])] };
        assert_eq!(walk_representation(&c, &inst).unwrap().len(), 2);
    }

    #[test]
    fn unknown_task_and_broken_chain() {
        let inst = fixtures::lab_example();
        let c = Schedule { robot: 1, segments: vec![walk(&[(7, 8)]), Segment::DoTask(v(8))] };
        assert_eq!(walk_representation(&c, &inst), Err(ScheduleError::UnknownTask { robot: 1, vertex: v(8) }));
        let c = Schedule { robot: 1, segments: vec![walk(&[(7, 8), (5, 4)])] };
        assert!(matches!(walk_representation(&c, &inst), Err(ScheduleError::Malformed { .. })));
        let c = Schedule { robot: 1, segments: vec![walk(&[(7, 6)])] };
        assert!(matches!(walk_representation(&c, &inst), Err(ScheduleError::Malformed { .. })));
    }

    #[test]
    fn lab_sets_validate_with_known_spans() {
        let inst = fixtures::lab_example();
        let first = fixtures::lab_first_set();
        let second = fixtures::lab_second_set();
        assert!(validate_set(&first, &inst).is_valid(), "{}", validate_set(&first, &inst));
        assert!(validate_set(&second, &inst).is_valid(), "{}", validate_set(&second, &inst));
        assert_eq!(time_span(&first, &inst).unwrap(), 10);
        assert_eq!(time_span(&second, &inst).unwrap(), 8);
        assert_eq!(time_span(&ScheduleSet::default(), &inst).unwrap(), 0);
    }

    #[test]
    fn padding() {
        let inst = fixtures::lab_example();
        let first = fixtures::lab_first_set();
        let rep = walk_representation(&first.schedules[0], &inst).unwrap();
        let padded = rep.pad_to(10);
        assert_eq!(padded.len(), 10);
        assert_eq!(&padded.moves()[7..], &[(v(5), v(5)); 3]);
        assert_eq!(rep.pad_to(rep.len()), rep);
        let empty = WalkRep::new(v(2), Vec::new());
        assert_eq!(empty.pad_to(3).moves(), &[(v(2), v(2)); 3]);
    }

    #[test]
    fn swap_is_detected() {
        let inst = Instance::new(Graph::path(2).unwrap(), vec![], vec![v(1), v(2)]).unwrap();
        let cs = ScheduleSet::new(vec![
            Schedule { robot: 1, segments: vec![walk(&[(1, 2)])] },
            Schedule { robot: 2, segments: vec![walk(&[(2, 1)])] },
        ]);
        let verdict = validate_set(&cs, &inst);
        assert!(verdict.violations.contains(&Violation::SwapCollision {
            step: 1,
            robots: (1, 2),
            edge: (v(1), v(2))
        }));
    }

    #[test]
    fn finished_robot_blocks_its_vertex() {
        let inst = Instance::new(Graph::path(3).unwrap(), vec![], vec![v(1), v(3)]).unwrap();
        let cs = ScheduleSet::new(vec![
            Schedule { robot: 1, segments: vec![walk(&[(1, 2)])] },
            Schedule { robot: 2, segments: vec![walk(&[(3, 3), (3, 2)])] },
        ]);
        let verdict = validate_set(&cs, &inst);
        assert_eq!(
            verdict.violations,
            vec![Violation::VertexCollision { step: 2, robots: (1, 2), vertex: v(2) }]
        );
    }

    #[test]
    fn missing_task_is_named() {
        let inst = fixtures::lab_example();
        let mut cs = fixtures::lab_first_set();
        // Drop the final task (v4) of robot 2.
        cs.schedules[1].segments.pop();
        let verdict = validate_set(&cs, &inst);
        assert_eq!(verdict.violations, vec![Violation::TaskNotCompleted { task: v(4) }]);
    }

    #[test]
    fn repeated_task_and_missing_schedule() {
        let inst = Instance::new(Graph::path(3).unwrap(), vec![Task::new(2, 1)], vec![v(1), v(3)]).unwrap();
        let cs = ScheduleSet::new(vec![Schedule {
            robot: 1,
            segments: vec![walk(&[(1, 2)]), Segment::DoTask(v(2)), Segment::DoTask(v(2))],
        }]);
        let verdict = validate_set(&cs, &inst);
        assert!(verdict.violations.contains(&Violation::MissingSchedule { robot: 2 }));
        assert!(verdict
            .violations
            .contains(&Violation::TaskRepeated { task: v(2), robots: vec![1, 1] }));
    }

    #[test]
    fn builder_and_delay() {
        let mut b = ScheduleBuilder::new(1, v(3));
        b.step(v(2)).step(v(1)).work().step(v(2));
        let mut c = b.build();
        assert_eq!(
            c.segments,
            vec![walk(&[(3, 2), (2, 1)]), Segment::DoTask(v(1)), walk(&[(1, 2)])]
        );
        c.delay(v(3), 2);
        assert_eq!(c.segments[0], walk(&[(3, 3), (3, 3), (3, 2), (2, 1)]));
        let mut d = Schedule { robot: 1, segments: vec![Segment::DoTask(v(3))] };
        d.delay(v(3), 1);
        assert_eq!(d.segments, vec![walk(&[(3, 3)]), Segment::DoTask(v(3))]);
    }

    #[test]
    fn gantt_rows() {
        let inst = fixtures::lab_example();
        let text = gantt(&fixtures::lab_second_set(), &inst).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "R1 | 4  4* 4* 1  2  2* 2* 2*");
        assert_eq!(lines[1], "R2 | 6  5  5* 5* 5* 5* 5* 5.");
        assert_eq!(gantt(&ScheduleSet::default(), &inst).unwrap(), "");

        let single = Instance::new(Graph::path(3).unwrap(), vec![], vec![v(2)]).unwrap();
        let cs = ScheduleSet::new(vec![Schedule { robot: 1, segments: vec![walk(&[(2, 2), (2, 2)])] }]);
        assert_eq!(gantt(&cs, &single).unwrap(), "R1 | 2. 2.\n");
    }

    #[test]
    fn schedule_json_shape() {
        let cs = ScheduleSet::new(vec![Schedule {
            robot: 1,
            segments: vec![walk(&[(5, 4), (4, 3)]), Segment::DoTask(v(3))],
        }]);
        let text = serde_json::to_string(&cs).unwrap();
        assert_eq!(text, r#"{"schedules":[{"robot":1,"segments":[{"walk":[[5,4],[4,3]]},{"task":3}]}]}"#);
        assert_eq!(serde_json::from_str::<ScheduleSet>(&text).unwrap(), cs);
    }
}
