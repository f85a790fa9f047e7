use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rsched::gadgets::{gadget_complete, gadget_planar, gadget_star};
use rsched::io::{self, Algorithm, BenchRow, IoError, RandomSpec};
use rsched::path::dp_table;
use rsched::schedule::{gantt, time_span, validate_set};
use rsched::{Graph, Instance, ScheduleSet, VertexId};

const EXIT_INVALID: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

/// Collision-free multi-robot task scheduling on paths, cycles and tadpoles.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance and print a validated report.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "auto")]
        algo: Algorithm,
        /// Write the schedule set here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a Gantt chart to stderr.
        #[arg(long)]
        gantt: bool,
    },
    /// Check a schedule set against an instance.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Compare a solver with the exact optimum.
    Compare {
        #[arg(long = "in", conflicts_with = "random", required_unless_present = "random")]
        input: Option<PathBuf>,
        #[command(flatten)]
        batch: Batch,
        #[arg(long, default_value = "auto")]
        algo: Algorithm,
    },
    /// Generate a hardness gadget.
    Gadget {
        #[command(subcommand)]
        kind: GadgetKind,
        /// Write the bare instance here.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Print the k-partition table of a path instance as CSV.
    DpTable {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run a solver over a random batch and print CSV rows.
    Bench {
        #[command(flatten)]
        batch: Batch,
        #[arg(long, default_value = "auto")]
        algo: Algorithm,
        /// Also run the oracle.
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Args, Debug)]
struct Batch {
    /// `seed,count,topology` with topology path, cycle or tadpole.
    #[arg(long)]
    random: Option<String>,
    /// Most vertices per instance.
    #[arg(long, default_value_t = 8)]
    n: u32,
    /// Most robots per instance.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Most tasks per instance.
    #[arg(long, default_value_t = 5)]
    m: usize,
    /// Longest task duration.
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// Give all tasks of an instance the same duration.
    #[arg(long)]
    equal: bool,
}

impl Batch {
    fn instances(&self) -> Result<Vec<Instance>> {
        let text = self.random.as_deref().context("--random is required")?;
        let spec = RandomSpec { n: self.n, k: self.k, m: self.m, d: self.d, equal: self.equal, ..RandomSpec::parse(text)? };
        Ok(io::random_instances(&spec)?)
    }
}

#[derive(Subcommand, Debug)]
enum GadgetKind {
    /// Two robots on a star; tasks take 2s - 2.
    Star {
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<u32>,
    },
    /// k robots on a complete graph; tasks take s - 1.
    Complete {
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<u32>,
        #[arg(long)]
        k: usize,
    },
    /// One robot, a unit task on every vertex of a graph.
    Planar {
        /// Graph JSON file.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        start: u32,
    },
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    let horizon = io::env_horizon()?;
    match cli.command {
        Command::Solve { input, algo, out, gantt: chart } => {
            let inst: Instance = io::read_json(&input)?;
            let report = match io::solve(&inst, algo, horizon) {
                Ok(report) => report,
                Err(IoError::Infeasible { horizon }) => {
                    eprintln!("infeasible within {horizon} timesteps");
                    return Ok(ExitCode::from(EXIT_INFEASIBLE));
                }
                Err(e) => return Err(e.into()),
            };
            print!("{}", io::to_json(&report));
            if chart {
                eprint!("{}", gantt(&report.schedule, &inst)?);
            }
            if let Some(path) = out {
                io::write_json(&path, &report.schedule)?;
            }
            if !report.validation.is_valid() {
                eprintln!("{}", report.validation);
                return Ok(ExitCode::from(EXIT_INVALID));
            }
        }
        Command::Validate { input, schedule } => {
            let inst: Instance = io::read_json(&input)?;
            let set: ScheduleSet = io::read_json(&schedule)?;
            let verdict = validate_set(&set, &inst);
            println!("{verdict}");
            if !verdict.is_valid() {
                return Ok(ExitCode::from(EXIT_INVALID));
            }
            println!("span {}", time_span(&set, &inst)?);
        }
        Command::Compare { input, batch, algo } => {
            let instances = match input {
                Some(path) => vec![io::read_json::<Instance>(&path)?],
                None => batch.instances()?,
            };
            println!("id,algo,k,makespan,oracle,ratio,bound");
            let mut exceeded = 0;
            for (id, inst) in instances.iter().enumerate() {
                let c = io::compare(inst, id, algo, horizon).with_context(|| format!("instance {id}"))?;
                let bound = c.bound.map(|b| b.to_string()).unwrap_or_default();
                println!("{},{},{},{},{},{:.3},{}", c.id, c.algorithm, c.k, c.makespan, c.oracle, c.ratio(), bound);
                if !c.within_bound() {
                    exceeded += 1;
                }
            }
            if exceeded > 0 {
                bail!("{exceeded} instance(s) exceed the approximation bound");
            }
        }
        Command::Gadget { kind, out } => {
            let gadget = match kind {
                GadgetKind::Star { set } => gadget_star(&set)?,
                GadgetKind::Complete { set, k } => gadget_complete(&set, k)?,
                GadgetKind::Planar { graph, start } => gadget_planar(&io::read_json::<Graph>(&graph)?, VertexId(start))?,
            };
            print!("{}", io::to_json(&gadget));
            if let Some(path) = out {
                io::write_json(&path, &gadget.instance)?;
            }
        }
        Command::DpTable { input } => {
            let inst: Instance = io::read_json(&input)?;
            if !matches!(inst.graph().topology(), rsched::Topology::Path { .. }) {
                bail!("dp-table needs a path instance");
            }
            let mut starts = inst.starts();
            starts.sort();
            print!("{}", dp_table(inst.tasks(), &starts)?.to_csv());
        }
        Command::Bench { batch, algo, oracle } => {
            println!("{}", io::BENCH_HEADER);
            for (id, inst) in batch.instances()?.iter().enumerate() {
                let report = io::solve(inst, algo, horizon).with_context(|| format!("instance {id}"))?;
                let best = if oracle { Some(io::solve(inst, Algorithm::Oracle, horizon)?.makespan) } else { None };
                println!("{}", BenchRow::new(id, inst, &report, best).to_csv());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
