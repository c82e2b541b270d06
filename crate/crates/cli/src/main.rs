//! `taskalloc`: solve, attack and certify task allocations, and run and
//! plot the seeded comparison experiments.
//!
//! Exit status: 0 on success, 2 on invalid input, 3 when a size or node
//! limit is hit, 1 when results cannot be written.

mod error;
mod input;
mod plot;
mod render;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use taskalloc::experiments::{
    run_comparison_with, Execution, ExperimentConfig, ExperimentReport, Solver,
};
use taskalloc::hetero::{solve_het_deterministic_with, BnbConfig, DEFAULT_NODE_BUDGET};
use taskalloc::oracles::{
    oracle_deterministic, oracle_randomized_grid, oracle_randomized_subsets, Witness,
};
use taskalloc::{solve_deterministic, solve_het_randomized, solve_randomized, Error};

use crate::error::{CliError, CliResult};
use crate::input::{load_instance, parse_json, read_text, Allocation, UserAllocation};
use crate::plot::PlotKind;
use crate::render::{render_report, Format, Summary};

#[derive(Debug, Parser)]
#[command(
    name = "taskalloc",
    version,
    about = "Task allocation against a single-worker attacker"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal randomized policy (attacker sees only the policy).
    SolveRand(SolveArgs),
    /// Optimal deterministic counts for equal task utilities.
    SolveDet(SolveArgs),
    /// Optimal deterministic task-to-worker map by branch-and-bound.
    SolveHetDet {
        #[command(flatten)]
        common: SolveArgs,
        /// Search nodes before giving up with exit status 3.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
    },
    /// Attacker's best response to a given allocation.
    Attack {
        #[command(flatten)]
        common: SolveArgs,
        #[command(flatten)]
        allocation: AllocationArgs,
    },
    /// Brute-force optimum for small instances.
    Oracle {
        #[command(flatten)]
        common: SolveArgs,
        #[arg(long, value_enum, default_value_t = OracleKind::Deterministic)]
        kind: OracleKind,
        /// Lattice spacing for `--kind grid`; must divide 1.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Largest number of assignments `--kind deterministic` may visit.
        #[arg(long, default_value_t = 10_000_000)]
        max_space: u64,
    },
    /// Seeded Monte-Carlo comparison of the solvers.
    Experiment {
        /// Experiment config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Seed for every random draw; overrides any seed in the config.
        #[arg(long)]
        seed: u64,
        /// Overrides the config's run count.
        #[arg(long)]
        runs: Option<usize>,
        /// Run on one thread.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// SVG line chart of one or more experiment CSV reports.
    Plot {
        /// Report CSV; repeat to overlay several reports.
        #[arg(long = "input", required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum)]
        kind: PlotKind,
        /// Restrict utility and workers plots to one solver.
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Instance JSON: {"proficiencies": [..], "task_utilities": [..]}.
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct AllocationArgs {
    /// Tasks per worker, in instance order.
    #[arg(long, value_delimiter = ',')]
    counts: Option<Vec<usize>>,
    /// Worker (0-based) of each task.
    #[arg(long, value_delimiter = ',')]
    map: Option<Vec<usize>>,
    /// Policy weights, in instance order.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    weights: Option<Vec<f64>>,
    /// JSON file holding {"counts": ..}, {"task_to_worker": ..} or {"weights": ..}.
    #[arg(long)]
    assignment: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleKind {
    /// Every deterministic assignment.
    Deterministic,
    /// Balanced randomized policy on every worker subset.
    Subsets,
    /// Randomized policies on a lattice of the weight simplex.
    Grid,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Rand,
    Det,
    HetRand,
    HetDet,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Rand => Solver::Rand,
            SolverArg::Det => Solver::Det,
            SolverArg::HetRand => Solver::HetRand,
            SolverArg::HetDet => Solver::HetDet,
        }
    }
}

impl OutputArgs {
    /// Fails early when the output directory does not exist.
    fn check(&self) -> CliResult<()> {
        if let Some(path) = &self.output {
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
            if dir.is_some_and(|d| !d.is_dir()) {
                return Err(CliError::Validation(format!(
                    "output directory for {} does not exist",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    fn emit(&self, text: &str) -> CliResult<()> {
        match &self.output {
            Some(path) => fs::write(path, text)
                .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Output(e.to_string())),
        }
    }
}

fn solve(
    args: &SolveArgs,
    build: impl FnOnce(&taskalloc::Instance) -> CliResult<Summary>,
) -> CliResult<()> {
    args.out.check()?;
    let instance = load_instance(&args.instance)?;
    let summary = build(&instance)?;
    args.out.emit(&summary.render(args.format)?)
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::SolveRand(args) => {
            solve(&args, |i| {
                // equal utilities admit the closed form; otherwise the weighted
                // form applies, and the two agree when both are defined
                let (sol, name) = if i.is_homogeneous() {
                    (solve_randomized(i)?, "randomized")
                } else {
                    (solve_het_randomized(i), "heterogeneous randomized")
                };
                Ok(Summary::new(name, i, &Allocation::Policy(sol.policy))?
                    .detail("k_star", sol.k_star))
            })
        }
        Command::SolveDet(args) => solve(&args, |i| {
            let sol = solve_deterministic(i)?;
            Ok(Summary::new(
                "deterministic",
                i,
                &Allocation::Assignment(sol.assignment()),
            )?
            .detail("intended_target", i.original_index(sol.intended_target)))
        }),
        Command::SolveHetDet {
            common,
            node_budget,
        } => solve(&common, |i| {
            let config = BnbConfig { node_budget };
            let sol = solve_het_deterministic_with(i, &config).map_err(|e| match e {
                Error::NodeBudget {
                    incumbent: Some(best),
                    budget,
                } => CliError::ResourceLimit(format!(
                    "node budget of {budget} exhausted; best assignment found so far has value {} \
                     (raise --node-budget to prove optimality)",
                    best.value
                )),
                other => other.into(),
            })?;
            Ok(Summary::new(
                "branch-and-bound",
                i,
                &Allocation::Assignment(sol.assignment()),
            )?
            .detail("max_contribution", sol.gamma)
            .detail("nodes", sol.nodes))
        }),
        Command::Attack { common, allocation } => solve(&common, |i| {
            let user = match allocation {
                AllocationArgs {
                    counts: Some(c), ..
                } => UserAllocation::Counts(c),
                AllocationArgs { map: Some(m), .. } => UserAllocation::TaskToWorker(m),
                AllocationArgs {
                    weights: Some(w), ..
                } => UserAllocation::Weights(w),
                AllocationArgs {
                    assignment: Some(path),
                    ..
                } => {
                    let user: UserAllocation = parse_json(&path, &read_text(&path)?)?;
                    return Summary::new(
                        "attack",
                        i,
                        &user.to_canonical(i).map_err(|e| e.in_file(&path))?,
                    );
                }
                _ => unreachable!("clap requires one allocation flag"),
            };
            Summary::new("attack", i, &user.to_canonical(i)?)
        }),
        Command::Oracle {
            common,
            kind,
            step,
            max_space,
        } => solve(&common, |i| {
            let result = match kind {
                OracleKind::Deterministic => oracle_deterministic(i, max_space)?,
                OracleKind::Subsets => oracle_randomized_subsets(i)?,
                OracleKind::Grid => oracle_randomized_grid(i, step)?,
            };
            let allocation = match result.witness {
                Witness::Assignment(a) => Allocation::Assignment(a),
                Witness::Policy(p) => Allocation::Policy(p),
            };
            Ok(Summary::new("oracle", i, &allocation)?
                .detail("oracle_value", result.value)
                .detail("method", result.method))
        }),
        Command::Experiment {
            config,
            seed,
            runs,
            sequential,
            out,
            format,
        } => {
            out.check()?;
            let report = experiment(&config, seed, runs, sequential)?;
            out.emit(&render_report(&report, format)?)
        }
        Command::Plot {
            inputs,
            kind,
            solver,
            out,
        } => {
            out.check()?;
            let mut report = ExperimentReport { rows: Vec::new() };
            for path in &inputs {
                let file = fs::File::open(path).map_err(|e| {
                    CliError::Validation(format!("cannot read {}: {e}", path.display()))
                })?;
                let part = ExperimentReport::read_csv(file)
                    .map_err(|e| CliError::from(e).in_file(path))?;
                report.rows.extend(part.rows);
            }
            let series = plot::series(&report, kind, solver.map(Solver::from))?;
            out.emit(&plot::render_svg(&series, kind))
        }
    }
}

fn experiment(
    path: &Path,
    seed: u64,
    runs: Option<usize>,
    sequential: bool,
) -> CliResult<ExperimentReport> {
    let mut raw: Value = parse_json(path, &read_text(path)?)?;
    let Value::Object(fields) = &mut raw else {
        return Err(CliError::Validation(format!(
            "{}: config must be a JSON object",
            path.display()
        )));
    };
    fields.insert("seed".into(), seed.into());
    if let Some(r) = runs {
        fields.insert("runs".into(), r.into());
    }
    let config: ExperimentConfig = serde_path_to_error::deserialize(raw).map_err(|e| {
        CliError::Validation(format!(
            "{}: field `{}`: {}",
            path.display(),
            e.path(),
            e.inner()
        ))
    })?;
    config
        .validate()
        .map_err(|e| CliError::from(e).in_file(path))?;
    let execution = if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    Ok(run_comparison_with(&config, execution)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
