//! Graph topologies, tasks, robots and validated problem instances.
//!
//! Vertices are 1-based everywhere (`v1 .. vn`), including every file format.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A 1-based vertex index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    pub const fn new(index: u32) -> Self {
        VertexId(index)
    }

    pub const fn get(self) -> u32 {
        self.0
    }

    /// Zero-based position, for indexing per-vertex arrays.
    pub const fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    pub const fn from_index(index: usize) -> Self {
        VertexId(index as u32 + 1)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid size for {kind}: {reason}")]
    InvalidSize { kind: &'static str, reason: String },
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(u32, u32),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
    #[error("invalid range: {0} > {1}")]
    InvalidRange(u32, u32),
    #[error("expected a {expected} topology")]
    WrongTopology { expected: &'static str },
    #[error("invalid instance: {}", join_violations(.0))]
    InvalidInstance(Vec<InstanceViolation>),
}

fn join_violations(violations: &[InstanceViolation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Declarative description of a graph; this is also the `graph` object of the
/// instance JSON format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Topology {
    Path { n: u32 },
    Cycle { n: u32 },
    /// Cycle `c1..c{cycle}` on vertices `1..=cycle`, tail `p1..p{path}` on the
    /// following vertices, joined by the bridge `(c1, p1)`.
    Tadpole { cycle: u32, path: u32 },
    General { n: u32, edges: Vec<[u32; 2]> },
}

impl Topology {
    pub fn name(&self) -> &'static str {
        match self {
            Topology::Path { .. } => "path",
            Topology::Cycle { .. } => "cycle",
            Topology::Tadpole { .. } => "tadpole",
            Topology::General { .. } => "general",
        }
    }
}

/// An undirected simple graph together with the topology it was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Topology", into = "Topology")]
pub struct Graph {
    topology: Topology,
    adjacency: Vec<Vec<VertexId>>,
}

impl Graph {
    pub fn path(n: u32) -> Result<Self, ModelError> {
        Self::from_topology(Topology::Path { n })
    }

    pub fn cycle(n: u32) -> Result<Self, ModelError> {
        Self::from_topology(Topology::Cycle { n })
    }

    pub fn tadpole(cycle: u32, path: u32) -> Result<Self, ModelError> {
        Self::from_topology(Topology::Tadpole { cycle, path })
    }

    pub fn general(n: u32, edges: Vec<[u32; 2]>) -> Result<Self, ModelError> {
        Self::from_topology(Topology::General { n, edges })
    }

    pub fn from_topology(topology: Topology) -> Result<Self, ModelError> {
        let (n, edges): (u32, Vec<(u32, u32)>) = match &topology {
            Topology::Path { n } => {
                if *n == 0 {
                    return Err(ModelError::InvalidSize {
                        kind: "path",
                        reason: "a path needs at least one vertex".into(),
                    });
                }
                (*n, (1..*n).map(|i| (i, i + 1)).collect())
            }
            Topology::Cycle { n } => {
                if *n < 3 {
                    return Err(ModelError::InvalidSize {
                        kind: "cycle",
                        reason: format!("a cycle needs at least 3 vertices, got {n}"),
                    });
                }
                let mut edges: Vec<_> = (1..*n).map(|i| (i, i + 1)).collect();
                edges.push((*n, 1));
                (*n, edges)
            }
            Topology::Tadpole { cycle, path } => {
                if *cycle < 3 || *path < 1 {
                    return Err(ModelError::InvalidSize {
                        kind: "tadpole",
                        reason: format!("need cycle >= 3 and path >= 1, got ({cycle}, {path})"),
                    });
                }
                let mut edges: Vec<_> = (1..*cycle).map(|i| (i, i + 1)).collect();
                edges.push((*cycle, 1));
                edges.push((1, cycle + 1));
                edges.extend((cycle + 1..cycle + path).map(|i| (i, i + 1)));
                (cycle + path, edges)
            }
            Topology::General { n, edges } => {
                if *n == 0 {
                    return Err(ModelError::InvalidSize {
                        kind: "general",
                        reason: "a graph needs at least one vertex".into(),
                    });
                }
                (*n, edges.iter().map(|e| (e[0], e[1])).collect())
            }
        };

        let mut adjacency: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); n as usize];
        for (u, v) in edges {
            if u == v || u == 0 || v == 0 || u > n || v > n {
                return Err(ModelError::InvalidEdge(u, v));
            }
            let (a, b) = (VertexId(u), VertexId(v));
            if !adjacency[a.index()].insert(b) {
                return Err(ModelError::DuplicateEdge(u, v));
            }
            adjacency[b.index()].insert(a);
        }

        Ok(Graph {
            topology,
            adjacency: adjacency.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.adjacency.len()).map(VertexId::from_index)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.0 >= 1 && v.index() < self.adjacency.len()
    }

    /// Neighbors of `v` in increasing order.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v.index()]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.index()].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.contains(u) && self.contains(v) && self.adjacency[u.index()].binary_search(&v).is_ok()
    }

    /// A legal single-timestep move: an edge or a self-loop.
    pub fn is_move(&self, from: VertexId, to: VertexId) -> bool {
        (from == to && self.contains(from)) || self.has_edge(from, to)
    }

    /// Every edge once, as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.vertices()
            .flat_map(|u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Breadth-first hop distances from `source`; `None` when unreachable.
    pub fn distances_from(&self, source: VertexId) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[source.index()] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u.index()].unwrap();
            for &v in self.neighbors(u) {
                if dist[v.index()].is_none() {
                    dist[v.index()] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(VertexId(1)).iter().all(Option::is_some)
    }
}

impl TryFrom<Topology> for Graph {
    type Error = ModelError;

    fn try_from(topology: Topology) -> Result<Self, Self::Error> {
        Graph::from_topology(topology)
    }
}

impl From<Graph> for Topology {
    fn from(graph: Graph) -> Self {
        graph.topology
    }
}

/// Work located at a fixed vertex, taking `duration` timesteps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Task {
    pub vertex: VertexId,
    pub duration: u32,
}

impl Task {
    pub fn new(vertex: u32, duration: u32) -> Self {
        Task { vertex: VertexId(vertex), duration }
    }
}

/// A robot with a 1-based id and its start vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Robot {
    pub id: usize,
    pub start: VertexId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceViolation {
    #[error("task vertex {0} is not in the graph")]
    TaskOutOfRange(VertexId),
    #[error("robot {robot} starts at {vertex}, which is not in the graph")]
    StartOutOfRange { robot: usize, vertex: VertexId },
    #[error("task at {0} has zero duration")]
    ZeroDuration(VertexId),
    #[error("more than one task at {0}")]
    TaskCollision(VertexId),
    #[error("robots {first} and {second} share start vertex {vertex}")]
    DuplicateStart { first: usize, second: usize, vertex: VertexId },
}

/// Checks every instance invariant and returns all violations (empty when valid).
pub fn validate_instance(graph: &Graph, tasks: &[Task], starts: &[VertexId]) -> Vec<InstanceViolation> {
    let mut violations = Vec::new();
    let mut task_seen = vec![false; graph.vertex_count()];
    for task in tasks {
        if !graph.contains(task.vertex) {
            violations.push(InstanceViolation::TaskOutOfRange(task.vertex));
            continue;
        }
        if task.duration == 0 {
            violations.push(InstanceViolation::ZeroDuration(task.vertex));
        }
        if std::mem::replace(&mut task_seen[task.vertex.index()], true) {
            violations.push(InstanceViolation::TaskCollision(task.vertex));
        }
    }
    let mut start_owner: Vec<Option<usize>> = vec![None; graph.vertex_count()];
    for (i, &start) in starts.iter().enumerate() {
        let robot = i + 1;
        if !graph.contains(start) {
            violations.push(InstanceViolation::StartOutOfRange { robot, vertex: start });
            continue;
        }
        match start_owner[start.index()] {
            Some(first) => violations.push(InstanceViolation::DuplicateStart { first, second: robot, vertex: start }),
            None => start_owner[start.index()] = Some(robot),
        }
    }
    violations
}

/// A validated k-robot scheduling instance. Tasks are kept sorted by vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    graph: Graph,
    tasks: Vec<Task>,
    robots: Vec<Robot>,
}

impl Instance {
    pub fn new(graph: Graph, mut tasks: Vec<Task>, starts: Vec<VertexId>) -> Result<Self, ModelError> {
        let violations = validate_instance(&graph, &tasks, &starts);
        if !violations.is_empty() {
            return Err(ModelError::InvalidInstance(violations));
        }
        tasks.sort();
        let robots = starts.into_iter().enumerate().map(|(i, start)| Robot { id: i + 1, start }).collect();
        Ok(Instance { graph, tasks, robots })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn robots(&self) -> &[Robot] {
        &self.robots
    }

    pub fn robot(&self, id: usize) -> Option<&Robot> {
        id.checked_sub(1).and_then(|i| self.robots.get(i))
    }

    pub fn starts(&self) -> Vec<VertexId> {
        self.robots.iter().map(|r| r.start).collect()
    }

    pub fn task_at(&self, v: VertexId) -> Option<&Task> {
        self.task_index(v).map(|i| &self.tasks[i])
    }

    pub fn task_index(&self, v: VertexId) -> Option<usize> {
        self.tasks.binary_search_by_key(&v, |t| t.vertex).ok()
    }

    pub fn total_duration(&self) -> u32 {
        self.tasks.iter().map(|t| t.duration).sum()
    }

    /// True when every task has the same duration (vacuously for zero tasks).
    pub fn has_equal_durations(&self) -> bool {
        self.tasks.windows(2).all(|w| w[0].duration == w[1].duration)
    }

    /// Same graph and robots with a different task list.
    pub fn with_tasks(&self, tasks: Vec<Task>) -> Result<Self, ModelError> {
        Instance::new(self.graph.clone(), tasks, self.starts())
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    graph: Graph,
    tasks: Vec<Task>,
    robots: Vec<RobotDoc>,
}

#[derive(Serialize, Deserialize)]
struct RobotDoc {
    start: VertexId,
}

impl Serialize for Instance {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        InstanceDoc {
            graph: self.graph.clone(),
            tasks: self.tasks.clone(),
            robots: self.robots.iter().map(|r| RobotDoc { start: r.start }).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = InstanceDoc::deserialize(deserializer)?;
        Instance::new(doc.graph, doc.tasks, doc.robots.into_iter().map(|r| r.start).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// The induced sub-path `P_{i,j}` of a path, renumbered `1..=j-i+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubPath {
    pub graph: Graph,
    /// Added to a local vertex id to recover the id on the parent path.
    pub offset: u32,
}

impl SubPath {
    pub fn to_parent(&self, v: VertexId) -> VertexId {
        VertexId(v.0 + self.offset)
    }

    pub fn to_local(&self, v: VertexId) -> Option<VertexId> {
        let local = v.0.checked_sub(self.offset)?;
        (local >= 1 && (local as usize) <= self.graph.vertex_count()).then_some(VertexId(local))
    }
}

pub fn subpath(path: &Graph, i: VertexId, j: VertexId) -> Result<SubPath, ModelError> {
    let Topology::Path { n } = *path.topology() else {
        return Err(ModelError::WrongTopology { expected: "path" });
    };
    if i > j {
        return Err(ModelError::InvalidRange(i.0, j.0));
    }
    if i.0 == 0 || j.0 > n {
        return Err(ModelError::InvalidSize { kind: "path", reason: format!("range {i}..{j} outside P_{n}") });
    }
    Ok(SubPath { graph: Graph::path(j.0 - i.0 + 1)?, offset: i.0 - 1 })
}
