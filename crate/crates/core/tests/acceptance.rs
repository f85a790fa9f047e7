//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test --test acceptance -- --nocapture` to see the report.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rsched::cycle::solve_cycle;
use rsched::fixtures;
use rsched::gadgets::{gadget_planar, gadget_star, has_exact_partition, has_hamiltonian_path_from};
use rsched::io::{random_instances, RandomSpec, Shape};
use rsched::oracle::{exact_optimum_default, feasible_within};
use rsched::path::{dp_table, one_robot_span, solve_k_partition_dp, solve_one_robot, solve_two_robot_partition};
use rsched::schedule::{schedule_span, time_span, validate_set, walk_representation, Segment, Violation};
use rsched::tadpole::solve_tadpole;
use rsched::{Graph, Instance, Schedule, ScheduleSet, Task, Topology, VertexId};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn best_of<T>(runs: usize, mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut best = Duration::MAX;
    let mut out = None;
    for _ in 0..runs {
        let clock = Instant::now();
        let value = f();
        best = best.min(clock.elapsed());
        out = Some(value);
    }
    (out.expect("at least one run"), best)
}

fn dp_golden_table() -> Outcome {
    let inst = fixtures::three_robot_table();
    let (table, took) = best_of(3, || dp_table(inst.tasks(), &inst.starts()));
    let table = table.map_err(|e| e.to_string())?;
    let rows = table.rows();
    let expected: Vec<Vec<u32>> = fixtures::THREE_ROBOT_TABLE.iter().map(|r| r.to_vec()).collect();
    ensure(rows == expected, || format!("rows {rows:?}"))?;
    ensure(table.span(3, 6) == 4, || format!("S[3,6] = {}", table.span(3, 6)))?;
    ensure(took < Duration::from_millis(1), || format!("took {took:?}"))?;
    Ok(format!("rows match, S[3,6] = 4 in {took:?}"))
}

fn two_robot_split() -> Outcome {
    let inst = fixtures::two_robot_split();
    let split = solve_two_robot_partition(&inst).map_err(|e| e.to_string())?;
    let middle = &split.candidates[1..4];
    ensure(middle == [(5, 7), (6, 5), (7, 2)], || format!("candidates {:?}", split.candidates))?;
    ensure(split.makespan == 6, || format!("makespan {}", split.makespan))?;
    ensure(validate_set(&split.schedules, &inst).is_valid(), || "invalid schedule".into())?;
    Ok(format!("candidates {middle:?}, makespan 6"))
}

fn partition_gap() -> Outcome {
    let inst = fixtures::partition_gap();
    let split = solve_two_robot_partition(&inst).map_err(|e| e.to_string())?;
    let dp = solve_k_partition_dp(&inst).map_err(|e| e.to_string())?;
    let clock = Instant::now();
    let oracle = exact_optimum_default(&inst).map_err(|e| e.to_string())?;
    let took = clock.elapsed();
    ensure(split.makespan == 8 && dp.makespan == 8, || format!("solver {} / dp {}", split.makespan, dp.makespan))?;
    ensure(oracle.makespan == 7, || format!("oracle {}", oracle.makespan))?;
    ensure(split.makespan <= 2 * oracle.makespan, || "ratio above 2".into())?;
    ensure(took < Duration::from_secs(1), || format!("oracle took {took:?}"))?;
    Ok(format!("solver 8, oracle 7 in {took:?}"))
}

fn lab_validation() -> Outcome {
    let inst = fixtures::lab_example();
    let mut spans = Vec::new();
    for set in [fixtures::lab_first_set(), fixtures::lab_second_set()] {
        let verdict = validate_set(&set, &inst);
        ensure(verdict.is_valid(), || format!("{verdict}"))?;
        spans.push(time_span(&set, &inst).map_err(|e| e.to_string())?);
    }
    ensure(spans == [10, 8], || format!("spans {spans:?}"))?;
    Ok("spans 10 and 8".into())
}

fn closed_form_matches_construction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let clock = Instant::now();
    let cases = 1000;
    for case in 0..cases {
        let n = rng.gen_range(1..=20u32);
        let m = rng.gen_range(0..=10.min(n as usize));
        let mut vertices: Vec<u32> = (1..=n).collect();
        rand::seq::SliceRandom::shuffle(vertices.as_mut_slice(), &mut rng);
        let mut tasks: Vec<Task> = vertices[..m].iter().map(|&v| Task::new(v, rng.gen_range(1..=5))).collect();
        tasks.sort_by_key(|t| t.vertex);
        let start = VertexId(rng.gen_range(1..=n));
        let path = Graph::path(n).unwrap();
        let inst = Instance::new(path.clone(), tasks.clone(), vec![start]).unwrap();
        let schedule = solve_one_robot(&path, &tasks, start, 1).map_err(|e| e.to_string())?;
        let built = schedule_span(&schedule, &inst).map_err(|e| e.to_string())?;
        let formula = one_robot_span(&tasks, start);
        ensure(formula == built, || format!("case {case}: formula {formula}, built {built}"))?;
        let set = ScheduleSet::new(vec![schedule]);
        ensure(validate_set(&set, &inst).is_valid(), || format!("case {case}: invalid"))?;
    }
    let took = clock.elapsed();
    ensure(took < Duration::from_secs(5), || format!("took {took:?}"))?;
    Ok(format!("{cases} cases in {took:?}"))
}

fn equal_duration_batch(seed: u64, shape: Shape) -> Vec<Instance> {
    let spec = RandomSpec { seed, count: 200, shape, n: 8, k: 3, m: 5, d: 3, equal: true };
    let mut batch = random_instances(&spec).unwrap();
    if shape == Shape::Tadpole {
        // Tadpoles here have at most four tasks.
        batch = batch
            .into_iter()
            .map(|inst| {
                let kept = inst.tasks().iter().take(4).copied().collect();
                inst.with_tasks(kept).unwrap()
            })
            .collect();
    }
    batch
}

fn oracle_equivalence() -> Outcome {
    let clock = Instant::now();
    let mut counts = Vec::new();
    for (seed, shape) in [(11, Shape::Path), (12, Shape::Cycle), (13, Shape::Tadpole)] {
        let batch = equal_duration_batch(seed, shape);
        for (i, inst) in batch.iter().enumerate() {
            let (span, set) = match shape {
                Shape::Path => solve_k_partition_dp(inst).map(|s| (s.makespan, s.schedules)).map_err(|e| e.to_string()),
                Shape::Cycle => solve_cycle(inst).map(|s| (s.makespan, s.schedules)).map_err(|e| e.to_string()),
                Shape::Tadpole => solve_tadpole(inst).map(|s| (s.makespan, s.schedules)).map_err(|e| e.to_string()),
            }
            .map_err(|e| format!("{shape:?} {i}: {e}"))?;
            let best = exact_optimum_default(inst).map_err(|e| e.to_string())?.makespan;
            ensure(span == best, || format!("{shape:?} {i}: solver {span}, oracle {best}"))?;
            ensure(validate_set(&set, inst).is_valid(), || format!("{shape:?} {i}: invalid schedule"))?;
        }
        counts.push(batch.len());
    }
    let took = clock.elapsed();
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    Ok(format!("{counts:?} path/cycle/tadpole instances equal the oracle in {took:?}"))
}

fn approximation_bounds() -> Outcome {
    let clock = Instant::now();
    let mut worst = (0u32, 1u32);
    let mut cases = 0;
    let mut two_robot = 0;
    for (seed, shape) in [(21, Shape::Path), (22, Shape::Cycle)] {
        let spec = RandomSpec { seed, count: 200, shape, n: 8, k: 3, m: 5, d: 6, equal: false };
        for (i, inst) in random_instances(&spec).unwrap().iter().enumerate() {
            let k = inst.robots().len() as u32;
            let span = match shape {
                Shape::Path => solve_k_partition_dp(inst).map(|s| s.makespan).map_err(|e| e.to_string())?,
                _ => solve_cycle(inst).map(|s| s.makespan).map_err(|e| e.to_string())?,
            };
            let best = exact_optimum_default(inst).map_err(|e| e.to_string())?.makespan;
            ensure(span >= best && span <= k * best, || format!("{shape:?} {i}: {span} vs {best} with k = {k}"))?;
            if u64::from(span) * u64::from(worst.1) > u64::from(worst.0) * u64::from(best.max(1)) {
                worst = (span, best.max(1));
            }
            if shape == Shape::Path && k == 2 {
                let split = solve_two_robot_partition(inst).map_err(|e| e.to_string())?.makespan;
                ensure(split <= 2 * best, || format!("two-robot {i}: {split} vs {best}"))?;
                two_robot += 1;
            }
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} instances ({two_robot} two-robot paths) within bounds, worst {}/{} in {:?}",
        worst.0,
        worst.1,
        clock.elapsed()
    ))
}

/// Multisets of `len` values from `lo..=hi`, in non-decreasing order.
fn multisets(len: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in lo..=hi {
        for mut rest in multisets(len - 1, first, hi) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn star_reduction() -> Outcome {
    let clock = Instant::now();
    let mut cases = 0;
    let mut yes = 0;
    for len in 2..=5 {
        for values in multisets(len, 2, 6) {
            if values.iter().sum::<u32>() % 2 != 0 {
                continue;
            }
            let gadget = gadget_star(&values).map_err(|e| e.to_string())?;
            let feasible = feasible_within(&gadget.instance, gadget.threshold).map_err(|e| e.to_string())?;
            let split = has_exact_partition(&values, 2);
            ensure(feasible == split, || format!("{values:?}: gadget {feasible}, partition {split}"))?;
            cases += 1;
            yes += usize::from(split);
        }
    }
    let took = clock.elapsed();
    ensure(cases >= 100, || format!("only {cases} cases"))?;
    ensure(took < Duration::from_secs(120), || format!("took {took:?}"))?;
    Ok(format!("{cases} multisets ({yes} splittable) agree in {took:?}"))
}

fn random_connected_graph(rng: &mut ChaCha8Rng, n: u32) -> Graph {
    loop {
        let p = rng.gen_range(0.2..0.8);
        let edges: Vec<[u32; 2]> =
            (1..=n).flat_map(|a| (a + 1..=n).map(move |b| [a, b])).filter(|_| rng.gen_bool(p)).collect();
        let graph = Graph::general(n, edges).unwrap();
        if graph.is_connected() {
            return graph;
        }
    }
}

fn planar_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut graphs = 0;
    let mut starts = 0;
    let mut yes = 0;
    for i in 0..150 {
        let n = 1 + (i % 6) as u32;
        let graph = random_connected_graph(&mut rng, n);
        for s in 1..=n {
            let gadget = gadget_planar(&graph, VertexId(s)).map_err(|e| e.to_string())?;
            let feasible = feasible_within(&gadget.instance, gadget.threshold).map_err(|e| e.to_string())?;
            let ham = has_hamiltonian_path_from(&graph, VertexId(s));
            ensure(feasible == ham, || format!("graph {i} start {s}: gadget {feasible}, path {ham}"))?;
            starts += 1;
            yes += usize::from(ham);
        }
        graphs += 1;
    }
    Ok(format!("{graphs} graphs, {starts} starts ({yes} with a Hamiltonian path) agree"))
}

/// Waits appended so the schedule lasts `span` steps.
fn padded(c: &Schedule, inst: &Instance, span: usize) -> Schedule {
    let rep = walk_representation(c, inst).unwrap();
    let end = rep.end();
    let mut out = c.clone();
    if rep.len() < span {
        out.segments.push(Segment::Walk(vec![(end, end); span - rep.len()]));
    }
    out
}

fn validator_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let spec = RandomSpec { seed: 18, count: 1000, shape: Shape::Path, n: 12, k: 4, m: 8, d: 4, equal: false };
    let batch = random_instances(&spec).unwrap();
    for (i, inst) in batch.iter().enumerate() {
        let sol = solve_k_partition_dp(inst).map_err(|e| format!("{i}: {e}"))?;
        let set = &sol.schedules;
        ensure(validate_set(set, inst).is_valid(), || format!("{i}: solver output invalid"))?;

        // Padding invariance.
        let span = time_span(set, inst).unwrap() as usize;
        let pad = ScheduleSet::new(set.schedules.iter().map(|c| padded(c, inst, span + 2)).collect());
        ensure(validate_set(&pad, inst).is_valid(), || format!("{i}: padding broke validity"))?;
        ensure(time_span(&pad, inst).unwrap() as usize == span + 2, || format!("{i}: padded span"))?;

        // Path order preservation.
        let reps: Vec<_> = set.schedules.iter().map(|c| walk_representation(c, inst).unwrap()).collect();
        let mut order: Vec<usize> = (0..reps.len()).collect();
        order.sort_by_key(|&r| reps[r].start());
        for t in 0..=span {
            let pos: Vec<VertexId> = order.iter().map(|&r| reps[r].position_at(t)).collect();
            ensure(pos.windows(2).all(|w| w[0] < w[1]), || format!("{i}: order broken at step {t}: {pos:?}"))?;
        }

        // Round trips, byte-stable.
        let text = serde_json::to_string(inst).unwrap();
        let back: Instance = serde_json::from_str(&text).unwrap();
        ensure(&back == inst && serde_json::to_string(&back).unwrap() == text, || format!("{i}: instance round trip"))?;
        let text = serde_json::to_string(set).unwrap();
        let back: ScheduleSet = serde_json::from_str(&text).unwrap();
        ensure(&back == set && serde_json::to_string(&back).unwrap() == text, || format!("{i}: schedule round trip"))?;

        // Edge swap between two neighbours somewhere on a path.
        let n = rng.gen_range(2..=12u32);
        let u = rng.gen_range(1..n);
        let swap = Instance::new(Graph::path(n).unwrap(), vec![], vec![VertexId(u), VertexId(u + 1)]).unwrap();
        let walk = |a: u32, b: u32| Schedule { robot: 0, segments: vec![Segment::Walk(vec![(VertexId(a), VertexId(b))])] };
        let crossing = ScheduleSet::new(vec![
            Schedule { robot: 1, ..walk(u, u + 1) },
            Schedule { robot: 2, ..walk(u + 1, u) },
        ]);
        let verdict = validate_set(&crossing, &swap);
        ensure(
            verdict.violations.iter().any(|v| matches!(v, Violation::SwapCollision { step: 1, robots: (1, 2), .. })),
            || format!("{i}: swap on ({u}, {}) not reported: {verdict}", u + 1),
        )?;
    }
    Ok(format!("{} cases: padding, order, round trip, swap detection", batch.len()))
}

fn dp_smoke() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let n = 10_000u32;
    let mut vertices: Vec<u32> = (1..=n).collect();
    rand::seq::SliceRandom::shuffle(vertices.as_mut_slice(), &mut rng);
    let tasks = vertices[..1000].iter().map(|&v| Task::new(v, rng.gen_range(1..=5))).collect();
    let starts = vertices[1000..1010].iter().map(|&v| VertexId(v)).collect();
    let inst = Instance::new(Graph::path(n).unwrap(), tasks, starts).unwrap();
    assert!(matches!(inst.graph().topology(), Topology::Path { .. }));
    let clock = Instant::now();
    let sol = solve_k_partition_dp(&inst).map_err(|e| e.to_string())?;
    let took = clock.elapsed();
    ensure(validate_set(&sol.schedules, &inst).is_valid(), || "invalid schedule".into())?;
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("n = 10^4, m = 10^3, k = 10: makespan {} in {took:?}", sol.makespan))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("1 DP golden table", dp_golden_table),
        ("2 two-robot split candidates", two_robot_split),
        ("3 partition gap", partition_gap),
        ("4 lab schedule validation", lab_validation),
        ("5 closed form equals construction", closed_form_matches_construction),
        ("6 oracle equivalence, equal durations", oracle_equivalence),
        ("7 approximation bounds, general durations", approximation_bounds),
        ("8 star gadget iff", star_reduction),
        ("9 planar gadget iff", planar_reduction),
        ("10 validator properties", validator_properties),
        ("smoke k-dp at scale", dp_smoke),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
