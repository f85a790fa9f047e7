//! Collision-free scheduling of robots that must complete fixed-location tasks
//! on a graph.
//!
//! Given a graph, tasks (a vertex and a duration) and robots with distinct start
//! vertices, the goal is one schedule per robot such that every task is
//! completed by exactly one robot, no two robots ever share a vertex or swap
//! across an edge, and the longest schedule is as short as possible.
//!
//! * [`model`]: graphs, tasks, robots, instances.
//! * [`schedule`]: schedules, walk representations and the validator.
//! * [`oracle`]: exact breadth-first search over joint configurations.
//! * [`path`]: single-robot sweep, two-robot split and k-robot partition DP.
//! * [`cycle`]: best-over-edge-cuts reduction to paths.
//! * [`spider`]: trees with one branching vertex; tours and selection solvers.
//! * [`tadpole`]: best-over-cycle-cuts reduction to paths and spiders.
//! * [`gadgets`]: hardness-reduction instance generators.
//! * [`io`]: reports, comparison harness and random instance generation.

pub mod cycle;
pub mod fixtures;
pub mod gadgets;
pub mod io;
pub mod model;
pub mod oracle;
pub mod path;
pub mod schedule;
pub mod spider;
pub mod tadpole;

pub use model::{Graph, Instance, Robot, Task, Topology, VertexId};
pub use schedule::{Schedule, ScheduleSet, Segment, Verdict};
