//! Small reference instances with known answers, shared by tests, the
//! acceptance suite and the CLI examples.

use crate::model::{Graph, Instance, Task, VertexId};
use crate::schedule::{Schedule, ScheduleSet, Segment};

fn starts(vs: &[u32]) -> Vec<VertexId> {
    vs.iter().map(|&i| VertexId(i)).collect()
}

fn tasks(spec: &[(u32, u32)]) -> Vec<Task> {
    spec.iter().map(|&(v, d)| Task::new(v, d)).collect()
}

fn walk(pairs: &[(u32, u32)]) -> Segment {
    Segment::Walk(pairs.iter().map(|&(a, b)| (VertexId(a), VertexId(b))).collect())
}

fn task(v: u32) -> Segment {
    Segment::DoTask(VertexId(v))
}

/// Nine-vertex lab graph with tasks at v2 (3), v4 (2), v5 (5) and robots on
/// v7 and v9.
pub fn lab_example() -> Instance {
    let edges = vec![
        [4, 1], [4, 5], [1, 2], [2, 5], [2, 3], [6, 9],
        [5, 8], [8, 9], [6, 3], [6, 5], [8, 7], [4, 7],
    ];
    Instance::new(Graph::general(9, edges).unwrap(), tasks(&[(2, 3), (4, 2), (5, 5)]), starts(&[7, 9])).unwrap()
}

/// A valid but slow schedule set for [`lab_example`] (span 10).
pub fn lab_first_set() -> ScheduleSet {
    ScheduleSet::new(vec![
        Schedule { robot: 1, segments: vec![walk(&[(7, 8), (8, 5)]), task(5)] },
        Schedule {
            robot: 2,
            segments: vec![walk(&[(9, 6), (6, 3), (3, 2)]), task(2), walk(&[(2, 1), (1, 4)]), task(4)],
        },
    ])
}

/// An optimal schedule set for [`lab_example`] (span 8).
pub fn lab_second_set() -> ScheduleSet {
    ScheduleSet::new(vec![
        Schedule { robot: 1, segments: vec![walk(&[(7, 4)]), task(4), walk(&[(4, 1), (1, 2)]), task(2)] },
        Schedule { robot: 2, segments: vec![walk(&[(9, 6), (6, 5)]), task(5)] },
    ])
}

/// `P6`, tasks v1:1 v3:1 v4:1 v6:2, robots on v5 and v6. The two-robot
/// split candidates evaluate to (5,7), (6,5), (7,2).
pub fn two_robot_split() -> Instance {
    Instance::new(Graph::path(6).unwrap(), tasks(&[(1, 1), (3, 1), (4, 1), (6, 2)]), starts(&[5, 6])).unwrap()
}

/// `P6`, tasks v1:1 v2:1 v3:4 v4:1 v5:1, robots on v3 and v6. The contiguous
/// split needs 8 timesteps while the optimum is 7.
pub fn partition_gap() -> Instance {
    Instance::new(
        Graph::path(6).unwrap(),
        tasks(&[(1, 1), (2, 1), (3, 4), (4, 1), (5, 1)]),
        starts(&[3, 6]),
    )
    .unwrap()
}

/// `P6`, tasks v1:2 v2:1 v3:1 v4:2 v5:1 v6:1, robots on v1, v3, v6.
pub fn three_robot_table() -> Instance {
    Instance::new(
        Graph::path(6).unwrap(),
        tasks(&[(1, 2), (2, 1), (3, 1), (4, 2), (5, 1), (6, 1)]),
        starts(&[1, 3, 6]),
    )
    .unwrap()
}

/// Expected k-partition table for [`three_robot_table`].
pub const THREE_ROBOT_TABLE: [[u32; 6]; 3] = [[2, 4, 6, 9, 11, 13], [2, 2, 3, 4, 6, 7], [2, 2, 3, 4, 4, 4]];
