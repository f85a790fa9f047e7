//! File formats, solver dispatch, oracle comparison, seeded random batches
//! and bench rows behind the command-line tool.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::cycle::solve_cycle;
use crate::model::{Graph, Instance, ModelError, Task, Topology, VertexId};
use crate::oracle::{default_horizon, exact_optimum, OracleError};
use crate::path::{solve_k_partition_dp, solve_one_robot, solve_two_robot_partition, PathError};
use crate::schedule::{validate_set, ScheduleSet, Verdict};
use crate::tadpole::solve_tadpole;

/// Environment variable overriding the oracle's search horizon.
pub const HORIZON_VAR: &str = "RSCHED_HORIZON";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("reading {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("writing {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("parsing {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{algorithm} does not apply to a {topology} graph with {robots} robot(s)")]
    Unsupported { algorithm: Algorithm, topology: &'static str, robots: usize },
    #[error("no schedule set within the horizon of {horizon} timesteps")]
    Infeasible { horizon: u32 },
    #[error("{HORIZON_VAR}={0} is not a non-negative integer")]
    BadHorizon(String),
    #[error("bad random spec: {0}")]
    BadSpec(String),
    #[error("{algorithm}: {message}")]
    Solver { algorithm: Algorithm, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Auto,
    OneRobot,
    TwoPartition,
    KDp,
    Cycle,
    Tadpole,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Auto,
        Algorithm::OneRobot,
        Algorithm::TwoPartition,
        Algorithm::KDp,
        Algorithm::Cycle,
        Algorithm::Tadpole,
        Algorithm::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::OneRobot => "one-robot",
            Algorithm::TwoPartition => "two-partition",
            Algorithm::KDp => "k-dp",
            Algorithm::Cycle => "cycle",
            Algorithm::Tadpole => "tadpole",
            Algorithm::Oracle => "oracle",
        }
    }

    /// The algorithm `auto` picks for a topology.
    pub fn for_topology(topology: &Topology) -> Algorithm {
        match topology {
            Topology::Path { .. } => Algorithm::KDp,
            Topology::Cycle { .. } => Algorithm::Cycle,
            Topology::Tadpole { .. } => Algorithm::Tadpole,
            Topology::General { .. } => Algorithm::Oracle,
        }
    }

    /// Guaranteed factor over the optimum for `k` robots, if any.
    pub fn bound(self, k: usize) -> Option<u32> {
        match self {
            Algorithm::OneRobot | Algorithm::Oracle => Some(1),
            Algorithm::TwoPartition => Some(2),
            Algorithm::KDp | Algorithm::Cycle => Some(k.max(1) as u32),
            Algorithm::Auto | Algorithm::Tadpole => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
            format!("unknown algorithm {s:?}; expected one of {}", names.join(", "))
        })
    }
}

/// Result of one solver run, validated against the instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub algorithm: String,
    pub makespan: u32,
    pub optimal_claimed: bool,
    pub schedule: ScheduleSet,
    pub validation: Verdict,
    pub wall_time_us: u64,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| IoError::Parse { path: path.into(), source })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serialisable values");
    text.push('\n');
    text
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    std::fs::write(path, to_json(value)).map_err(|source| IoError::Write { path: path.into(), source })
}

/// Horizon override from [`HORIZON_VAR`], if set.
pub fn env_horizon() -> Result<Option<u32>, IoError> {
    match std::env::var(HORIZON_VAR) {
        Ok(text) => text.trim().parse().map(Some).map_err(|_| IoError::BadHorizon(text)),
        Err(_) => Ok(None),
    }
}

fn solver_error(algorithm: Algorithm, e: impl fmt::Display) -> IoError {
    IoError::Solver { algorithm, message: e.to_string() }
}

/// Runs `algorithm` (resolving `auto` by topology) and validates the result.
pub fn solve(inst: &Instance, algorithm: Algorithm, horizon: Option<u32>) -> Result<SolveReport, IoError> {
    let algorithm =
        if algorithm == Algorithm::Auto { Algorithm::for_topology(inst.graph().topology()) } else { algorithm };
    let unsupported = || IoError::Unsupported {
        algorithm,
        topology: inst.graph().topology().name(),
        robots: inst.robots().len(),
    };
    let clock = Instant::now();
    let (makespan, optimal, schedule) = match algorithm {
        Algorithm::OneRobot => {
            let [robot] = inst.robots() else { return Err(unsupported()) };
            let c = solve_one_robot(inst.graph(), inst.tasks(), robot.start, robot.id).map_err(|e| match e {
                PathError::NotAPath(_) => unsupported(),
                e => solver_error(algorithm, e),
            })?;
            let set = ScheduleSet::new(vec![c]);
            let span = crate::schedule::time_span(&set, inst).map_err(|e| solver_error(algorithm, e))?;
            (span, true, set)
        }
        Algorithm::TwoPartition => {
            let sol = solve_two_robot_partition(inst).map_err(|e| match e {
                PathError::NotAPath(_) | PathError::RobotCount { .. } => unsupported(),
                e => solver_error(algorithm, e),
            })?;
            (sol.makespan, inst.has_equal_durations(), sol.schedules)
        }
        Algorithm::KDp => {
            let sol = solve_k_partition_dp(inst).map_err(|e| match e {
                PathError::NotAPath(_) => unsupported(),
                e => solver_error(algorithm, e),
            })?;
            (sol.makespan, sol.optimal, sol.schedules)
        }
        Algorithm::Cycle => {
            if !matches!(inst.graph().topology(), Topology::Cycle { .. }) {
                return Err(unsupported());
            }
            let sol = solve_cycle(inst).map_err(|e| solver_error(algorithm, e))?;
            (sol.makespan, sol.optimal, sol.schedules)
        }
        Algorithm::Tadpole => {
            if !matches!(inst.graph().topology(), Topology::Tadpole { .. }) {
                return Err(unsupported());
            }
            let sol = solve_tadpole(inst).map_err(|e| solver_error(algorithm, e))?;
            (sol.makespan, sol.optimal, sol.schedules)
        }
        Algorithm::Oracle => {
            let horizon = horizon.unwrap_or_else(|| default_horizon(inst));
            let sol = exact_optimum(inst, horizon).map_err(|e| match e {
                OracleError::InfeasibleWithinHorizon { horizon } => IoError::Infeasible { horizon },
                e => solver_error(algorithm, e),
            })?;
            (sol.makespan, true, sol.schedules)
        }
        Algorithm::Auto => unreachable!("resolved above"),
    };
    let wall_time_us = clock.elapsed().as_micros() as u64;
    let validation = validate_set(&schedule, inst);
    Ok(SolveReport { algorithm: algorithm.name().into(), makespan, optimal_claimed: optimal, schedule, validation, wall_time_us })
}

/// Solver makespan against the oracle optimum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub id: usize,
    pub algorithm: String,
    pub k: usize,
    pub makespan: u32,
    pub oracle: u32,
    /// Factor the solver guarantees, if any.
    pub bound: Option<u32>,
}

impl Comparison {
    /// `makespan <= bound * oracle`, checked in integers.
    pub fn within_bound(&self) -> bool {
        self.bound.is_none_or(|b| u64::from(self.makespan) <= u64::from(b) * u64::from(self.oracle))
    }

    /// Ratio for display only; `1` when both spans are zero.
    pub fn ratio(&self) -> f64 {
        if self.oracle == 0 {
            if self.makespan == 0 { 1.0 } else { f64::INFINITY }
        } else {
            f64::from(self.makespan) / f64::from(self.oracle)
        }
    }
}

pub fn compare(inst: &Instance, id: usize, algorithm: Algorithm, horizon: Option<u32>) -> Result<Comparison, IoError> {
    let report = solve(inst, algorithm, horizon)?;
    let oracle = solve(inst, Algorithm::Oracle, horizon)?;
    let resolved: Algorithm = report.algorithm.parse().expect("report names a known algorithm");
    Ok(Comparison {
        id,
        algorithm: report.algorithm,
        k: inst.robots().len(),
        makespan: report.makespan,
        oracle: oracle.makespan,
        bound: resolved.bound(inst.robots().len()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Path,
    Cycle,
    Tadpole,
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path" => Ok(Shape::Path),
            "cycle" => Ok(Shape::Cycle),
            "tadpole" => Ok(Shape::Tadpole),
            _ => Err(format!("unknown topology {s:?}; expected path, cycle or tadpole")),
        }
    }
}

/// Parameters of a seeded random batch. Sizes are upper bounds; every
/// instance draws its own vertex count, robot count, task count and
/// durations below them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub seed: u64,
    pub count: usize,
    pub shape: Shape,
    /// Most vertices (for tadpoles cycle plus tail).
    pub n: u32,
    /// Most robots.
    pub k: usize,
    /// Most tasks.
    pub m: usize,
    /// Longest task duration.
    pub d: u32,
    /// One shared duration per instance instead of one per task.
    pub equal: bool,
}

impl RandomSpec {
    /// Parses `seed,count,topology`, leaving the sizes at desk-scale defaults.
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let bad = || IoError::BadSpec(format!("{text:?}; expected seed,count,topology"));
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let [seed, count, shape] = parts.as_slice() else { return Err(bad()) };
        Ok(RandomSpec {
            seed: seed.parse().map_err(|_| bad())?,
            count: count.parse().map_err(|_| bad())?,
            shape: shape.parse().map_err(IoError::BadSpec)?,
            n: 8,
            k: 3,
            m: 5,
            d: 1,
            equal: false,
        })
    }

    fn min_vertices(&self) -> u32 {
        match self.shape {
            Shape::Path => 1,
            Shape::Cycle => 3,
            Shape::Tadpole => 4,
        }
    }
}

/// Deterministic batch: the same spec always yields the same instances.
pub fn random_instances(spec: &RandomSpec) -> Result<Vec<Instance>, IoError> {
    if spec.n < spec.min_vertices() || spec.k == 0 || spec.d == 0 {
        return Err(IoError::BadSpec(format!(
            "need n >= {}, k >= 1 and d >= 1",
            spec.min_vertices()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.count).map(|_| random_instance(&mut rng, spec)).collect()
}

fn random_instance(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> Result<Instance, IoError> {
    let n = rng.gen_range(spec.min_vertices()..=spec.n);
    let graph = match spec.shape {
        Shape::Path => Graph::path(n)?,
        Shape::Cycle => Graph::cycle(n)?,
        Shape::Tadpole => {
            let cycle = rng.gen_range(3..n);
            Graph::tadpole(cycle, n - cycle)?
        }
    };
    let k = rng.gen_range(1..=spec.k.min(n as usize));
    let m = rng.gen_range(0..=spec.m.min(n as usize));
    let shared = rng.gen_range(1..=spec.d);
    let mut vertices: Vec<u32> = (1..=n).collect();
    vertices.shuffle(rng);
    let tasks = vertices[..m]
        .iter()
        .map(|&v| Task::new(v, if spec.equal { shared } else { rng.gen_range(1..=spec.d) }))
        .collect();
    vertices.shuffle(rng);
    let starts = vertices[..k].iter().map(|&v| VertexId(v)).collect();
    Ok(Instance::new(graph, tasks, starts)?)
}

/// One bench CSV row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub id: usize,
    pub algo: String,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub makespan: u32,
    pub oracle: Option<u32>,
    pub wall_us: u64,
}

pub const BENCH_HEADER: &str = "id,algo,n,k,m,makespan,oracle,wall_us";

impl BenchRow {
    pub fn new(id: usize, inst: &Instance, report: &SolveReport, oracle: Option<u32>) -> Self {
        BenchRow {
            id,
            algo: report.algorithm.clone(),
            n: inst.graph().vertex_count(),
            k: inst.robots().len(),
            m: inst.tasks().len(),
            makespan: report.makespan,
            oracle,
            wall_us: report.wall_time_us,
        }
    }

    pub fn to_csv(&self) -> String {
        let oracle = self.oracle.map(|o| o.to_string()).unwrap_or_default();
        format!("{},{},{},{},{},{},{},{}", self.id, self.algo, self.n, self.k, self.m, self.makespan, oracle, self.wall_us)
    }
}
