//! Property tests over randomly drawn desk-scale instances.

use proptest::prelude::*;

use rsched::cycle::solve_cycle;
use rsched::gadgets::{gadget_complete, gadget_planar, gadget_star};
use rsched::io::{random_instances, RandomSpec, Shape};
use rsched::model::validate_instance;
use rsched::oracle::{distance_lower_bound, exact_optimum_default, feasible_within};
use rsched::path::{dp_table, one_robot_span, solve_k_partition_dp, solve_one_robot};
use rsched::schedule::{collisions, schedule_span, time_span, validate_set, walk_representation};
use rsched::tadpole::{crossing_robots, solve_tadpole};
use rsched::{Graph, Instance, ScheduleSet, Task, Topology, VertexId};

fn instance(seed: u64, shape: Shape, n: u32, k: usize, m: usize, d: u32, equal: bool) -> Instance {
    let spec = RandomSpec { seed, count: 1, shape, n, k, m, d, equal };
    random_instances(&spec).unwrap().remove(0)
}

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![Just(Shape::Path), Just(Shape::Cycle), Just(Shape::Tadpole)]
}

fn solve_any(inst: &Instance) -> (u32, ScheduleSet) {
    match inst.graph().topology() {
        Topology::Path { .. } => solve_k_partition_dp(inst).map(|s| (s.makespan, s.schedules)).unwrap(),
        Topology::Cycle { .. } => solve_cycle(inst).map(|s| (s.makespan, s.schedules)).unwrap(),
        Topology::Tadpole { .. } => solve_tadpole(inst).map(|s| (s.makespan, s.schedules)).unwrap(),
        Topology::General { .. } => unreachable!("random batches are structured"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(200) })]

    #[test]
    fn solver_output_is_valid_and_spans_match(seed in any::<u64>(), shape in shape(), d in 1u32..=5) {
        let inst = instance(seed, shape, 10, 3, 6, d, false);
        let (span, set) = solve_any(&inst);
        prop_assert!(validate_set(&set, &inst).is_valid());
        prop_assert_eq!(time_span(&set, &inst).unwrap(), span);
    }

    #[test]
    fn padding_keeps_collision_freedom(seed in any::<u64>(), shape in shape(), extra in 0usize..5) {
        let inst = instance(seed, shape, 10, 3, 6, 3, false);
        let (span, set) = solve_any(&inst);
        let reps: Vec<_> = set.schedules.iter().map(|c| walk_representation(c, &inst).unwrap()).collect();
        let padded: Vec<_> = reps.iter().map(|r| r.pad_to(span as usize + extra)).collect();
        prop_assert!(collisions(&reps).is_empty());
        prop_assert!(collisions(&padded).is_empty());
        for (r, p) in reps.iter().zip(&padded) {
            prop_assert_eq!(p.len(), span as usize + extra);
            prop_assert_eq!(p.end(), r.end());
        }
    }

    #[test]
    fn path_robots_keep_their_order(seed in any::<u64>(), d in 1u32..=4) {
        let inst = instance(seed, Shape::Path, 12, 4, 8, d, false);
        let (span, set) = solve_any(&inst);
        let mut reps: Vec<_> = set.schedules.iter().map(|c| walk_representation(c, &inst).unwrap()).collect();
        reps.sort_by_key(|r| r.start());
        for t in 0..=span as usize {
            for w in reps.windows(2) {
                prop_assert!(w[0].position_at(t) < w[1].position_at(t));
            }
        }
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), shape in shape()) {
        let inst = instance(seed, shape, 10, 3, 6, 4, false);
        let text = serde_json::to_string(&inst).unwrap();
        let back: Instance = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
        let (_, set) = solve_any(&inst);
        let text = serde_json::to_string(&set).unwrap();
        let back: ScheduleSet = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &set);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn one_robot_formula_matches_construction(
        n in 1u32..=30,
        picks in proptest::collection::btree_map(1u32..=30, 1u32..=6, 0..12),
        start in 1u32..=30,
    ) {
        let tasks: Vec<Task> = picks.iter().filter(|(&v, _)| v <= n).map(|(&v, &d)| Task::new(v, d)).collect();
        let start = VertexId(start.min(n));
        let path = Graph::path(n).unwrap();
        let inst = Instance::new(path.clone(), tasks.clone(), vec![start]).unwrap();
        let c = solve_one_robot(&path, &tasks, start, 1).unwrap();
        prop_assert_eq!(schedule_span(&c, &inst).unwrap(), one_robot_span(&tasks, start));
    }

    #[test]
    fn dp_table_is_monotone(seed in any::<u64>(), d in 1u32..=5) {
        let inst = instance(seed, Shape::Path, 12, 4, 8, d, false);
        let mut starts = inst.starts();
        starts.sort();
        let table = dp_table(inst.tasks(), &starts).unwrap();
        let k = inst.robots().len();
        let m = inst.tasks().len();
        for c in 1..=k {
            for l in 1..=m {
                prop_assert!(table.span(c, l - 1) <= table.span(c, l));
                if c > 1 {
                    prop_assert!(table.span(c, l) <= table.span(c - 1, l));
                }
            }
        }
    }

    #[test]
    fn cycle_rotation_keeps_makespan(seed in any::<u64>(), shift in 1u32..8, d in 1u32..=4) {
        let inst = instance(seed, Shape::Cycle, 9, 3, 6, d, false);
        let n = inst.graph().vertex_count() as u32;
        let turn = |v: VertexId| VertexId((v.0 - 1 + shift) % n + 1);
        let rotated = Instance::new(
            inst.graph().clone(),
            inst.tasks().iter().map(|t| Task { vertex: turn(t.vertex), duration: t.duration }).collect(),
            inst.starts().into_iter().map(turn).collect(),
        ).unwrap();
        prop_assert_eq!(solve_cycle(&inst).unwrap().makespan, solve_cycle(&rotated).unwrap().makespan);
    }

    #[test]
    fn tadpole_has_at_most_two_crossing_robots(seed in any::<u64>(), d in 1u32..=3) {
        let inst = instance(seed, Shape::Tadpole, 10, 4, 6, d, true);
        let sol = solve_tadpole(&inst).unwrap();
        prop_assert!(crossing_robots(&inst, &sol.schedules).unwrap().len() <= 2);
    }

    #[test]
    fn gadgets_are_valid_instances(values in proptest::collection::vec(2u32..=9, 1..7), k in 1usize..4) {
        let star = gadget_star(&values).unwrap();
        prop_assert!(validate_instance(star.instance.graph(), star.instance.tasks(), &star.instance.starts()).is_empty());
        prop_assert_eq!(star.threshold, 1 + values.iter().sum::<u32>());
        if values.iter().sum::<u32>() % k as u32 == 0 {
            let complete = gadget_complete(&values, k).unwrap();
            prop_assert_eq!(complete.instance.graph().vertex_count(), values.len() + k);
        } else {
            prop_assert!(gadget_complete(&values, k).is_err());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(60) })]

    #[test]
    fn oracle_is_monotone_and_bounded(seed in any::<u64>(), shape in shape(), d in 1u32..=3) {
        let inst = instance(seed, shape, 7, 2, 4, d, false);
        let best = exact_optimum_default(&inst).unwrap().makespan;
        prop_assert!(best >= distance_lower_bound(&inst));
        prop_assert!(feasible_within(&inst, best).unwrap());
        prop_assert!(feasible_within(&inst, best + 1).unwrap());
        if best > 0 {
            prop_assert!(!feasible_within(&inst, best - 1).unwrap());
        }
        // Structured solvers never beat the optimum.
        prop_assert!(solve_any(&inst).0 >= best);
    }

    #[test]
    fn planar_gadget_threshold(seed in any::<u64>(), n in 1u32..=6) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        // A random spanning tree plus random extra edges keeps it connected.
        let mut edges: Vec<[u32; 2]> = (2..=n).map(|v| [rng.gen_range(1..v), v]).collect();
        for a in 1..=n {
            for b in a + 1..=n {
                if rng.gen_bool(0.3) && !edges.contains(&[a, b]) {
                    edges.push([a, b]);
                }
            }
        }
        let graph = Graph::general(n, edges).unwrap();
        let gadget = gadget_planar(&graph, VertexId(1)).unwrap();
        prop_assert_eq!(gadget.threshold, 2 * n - 1);
        prop_assert_eq!(gadget.instance.tasks().len(), n as usize);
    }
}
