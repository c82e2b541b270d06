//! Seeded Monte-Carlo comparison of randomized and deterministic policies.
//!
//! Each run draws one proficiency vector of length `max_n` and one utility
//! vector per (utility distribution, task count) pair, then sweeps the
//! worker count over prefixes of the proficiency draw so that going from
//! `n` to `n + 1` workers adds exactly one new worker.
//!
//! Run `r` draws from a ChaCha8 generator seeded with the config seed on
//! stream `r`, so every run is independent of scheduling and the report is
//! bitwise identical whether runs execute serially or on any number of
//! threads.

use std::fmt;
use std::io::{Read, Write};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hetero::{
    solve_het_deterministic_with, solve_het_randomized, BnbConfig, DEFAULT_NODE_BUDGET,
};
use crate::homo::{solve_deterministic, solve_randomized};
use crate::model::Instance;
use crate::stats::Accumulator;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub const LOW_PROFICIENCY: f64 = 0.5;
pub const HIGH_PROFICIENCY: f64 = 1.0;

/// Default run count for sweeps without exact heterogeneous solves.
pub const DEFAULT_RUNS: usize = 2000;
/// Default run count when `het_det` is selected.
pub const DEFAULT_RUNS_EXACT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProficiencyDist {
    /// Uniform on [0.5, 1].
    Uniform,
    /// Density proportional to `x^(−k)` on [0.5, 1].
    PowerLaw { k: f64 },
}

impl ProficiencyDist {
    fn validate(&self) -> Result<()> {
        if let ProficiencyDist::PowerLaw { k } = *self {
            if !k.is_finite() || k == 1.0 {
                return Err(Error::Parameter(format!(
                    "power-law exponent {k} unsupported (must be finite and not 1)"
                )));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ProficiencyDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProficiencyDist::Uniform => write!(f, "uniform"),
            ProficiencyDist::PowerLaw { k } => write!(f, "power-law(k={k})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UtilityDist {
    /// Every task has utility `value`.
    Constant { value: f64 },
    /// Uniform on [0, max].
    Uniform { max: f64 },
}

impl UtilityDist {
    fn validate(&self) -> Result<()> {
        match *self {
            UtilityDist::Constant { value } if !(value.is_finite() && value >= 0.0) => Err(
                Error::Parameter(format!("constant utility {value} must be finite and ≥ 0")),
            ),
            UtilityDist::Uniform { max } if !(max.is_finite() && max > 0.0) => {
                Err(Error::Parameter(format!(
                    "uniform utility bound {max} must be finite and > 0"
                )))
            }
            _ => Ok(()),
        }
    }

    fn is_constant(&self) -> bool {
        matches!(self, UtilityDist::Constant { .. })
    }
}

impl fmt::Display for UtilityDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UtilityDist::Constant { value } => write!(f, "constant({value})"),
            UtilityDist::Uniform { max } => write!(f, "uniform(0,{max})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Rand,
    Det,
    HetRand,
    HetDet,
}

impl Solver {
    pub const ALL: [Solver; 4] = [Solver::Rand, Solver::Det, Solver::HetRand, Solver::HetDet];

    pub fn name(&self) -> &'static str {
        match self {
            Solver::Rand => "rand",
            Solver::Det => "det",
            Solver::HetRand => "het_rand",
            Solver::HetDet => "het_det",
        }
    }

    fn slot(&self) -> usize {
        *self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaskCounts {
    One(usize),
    Many(Vec<usize>),
}

impl TaskCounts {
    pub fn values(&self) -> Vec<usize> {
        match self {
            TaskCounts::One(m) => vec![*m],
            TaskCounts::Many(ms) => ms.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Defaults to 2000, or 200 when `het_det` is selected.
    #[serde(default)]
    pub runs: Option<usize>,
    /// Inclusive `[min_n, max_n]`.
    pub worker_range: [usize; 2],
    pub tasks: TaskCounts,
    #[serde(default = "default_proficiency")]
    pub proficiency_dist: ProficiencyDist,
    #[serde(default = "default_utilities")]
    pub utility_dists: Vec<UtilityDist>,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<Solver>,
    #[serde(default)]
    pub node_budget: Option<u64>,
}

fn default_proficiency() -> ProficiencyDist {
    ProficiencyDist::Uniform
}

fn default_utilities() -> Vec<UtilityDist> {
    vec![UtilityDist::Constant { value: 1.0 }]
}

fn default_solvers() -> Vec<Solver> {
    vec![Solver::Rand, Solver::Det]
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn runs(&self) -> usize {
        self.runs
            .unwrap_or(if self.solvers.contains(&Solver::HetDet) {
                DEFAULT_RUNS_EXACT
            } else {
                DEFAULT_RUNS
            })
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.worker_range;
        if lo == 0 || lo > hi {
            return Err(Error::Parameter(format!(
                "worker range [{lo}, {hi}] must satisfy 1 ≤ min ≤ max"
            )));
        }
        if self.runs() == 0 {
            return Err(Error::Parameter("runs must be at least 1".into()));
        }
        let tasks = self.tasks.values();
        if tasks.is_empty() || tasks.contains(&0) {
            return Err(Error::Parameter(format!(
                "task counts {tasks:?} must be non-empty and ≥ 1"
            )));
        }
        if self.utility_dists.is_empty() {
            return Err(Error::Parameter(
                "at least one utility distribution is required".into(),
            ));
        }
        if self.solvers.is_empty() {
            return Err(Error::Parameter("at least one solver is required".into()));
        }
        self.proficiency_dist.validate()?;
        for d in &self.utility_dists {
            d.validate()?;
        }
        let homogeneous_only = self
            .solvers
            .iter()
            .any(|s| matches!(s, Solver::Rand | Solver::Det));
        if homogeneous_only && !self.utility_dists.iter().all(UtilityDist::is_constant) {
            return Err(Error::Mode(
                "solvers rand/det need constant utilities; use het_rand/het_det".into(),
            ));
        }
        if self.node_budget == Some(0) {
            return Err(Error::Parameter("node budget must be positive".into()));
        }
        Ok(())
    }

    fn has(&self, solver: Solver) -> bool {
        self.solvers.contains(&solver)
    }

    /// Configuration points in report order.
    fn points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for (ui, &utility) in self.utility_dists.iter().enumerate() {
            for (ti, &tasks) in self.tasks.values().iter().enumerate() {
                for workers in self.worker_range[0]..=self.worker_range[1] {
                    out.push(Point {
                        utility_index: ui,
                        tasks_index: ti,
                        utility,
                        tasks,
                        workers,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    utility_index: usize,
    tasks_index: usize,
    utility: UtilityDist,
    tasks: usize,
    workers: usize,
}

/// Draws `n` proficiencies in [0.5, 1].
///
/// The power law uses the inverse CDF of `f(x) ∝ x^(−k)`:
/// `x = (a + U (b − a))^(1/(1−k))` with `a = 0.5^(1−k)`, `b = 1`.
pub fn sample_proficiencies<R: Rng + ?Sized>(
    dist: &ProficiencyDist,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Parameter("cannot sample zero proficiencies".into()));
    }
    dist.validate()?;
    let draw = |rng: &mut R| -> f64 {
        let u: f64 = rng.gen();
        match *dist {
            ProficiencyDist::Uniform => LOW_PROFICIENCY + (HIGH_PROFICIENCY - LOW_PROFICIENCY) * u,
            ProficiencyDist::PowerLaw { k } => {
                let e = 1.0 - k;
                let a = LOW_PROFICIENCY.powf(e);
                let b = HIGH_PROFICIENCY.powf(e);
                (a + u * (b - a))
                    .powf(1.0 / e)
                    .clamp(LOW_PROFICIENCY, HIGH_PROFICIENCY)
            }
        }
    };
    Ok((0..n).map(|_| draw(rng)).collect())
}

pub fn sample_utilities<R: Rng + ?Sized>(dist: &UtilityDist, m: usize, rng: &mut R) -> Vec<f64> {
    match *dist {
        UtilityDist::Constant { value } => vec![value; m],
        UtilityDist::Uniform { max } => (0..m).map(|_| rng.gen::<f64>() * max).collect(),
    }
}

/// Generator for run `run` of an experiment seeded with `seed`.
pub fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

#[derive(Debug, Clone, Copy, Default)]
struct Outcome {
    value: f64,
    workers: usize,
}

/// Per-point outcomes of one run, indexed by [`Solver::slot`].
type RunSample = Vec<[Option<Outcome>; 4]>;

fn run_once(config: &ExperimentConfig, points: &[Point], run: usize) -> Result<RunSample> {
    let mut rng = run_rng(config.seed, run as u64);
    let max_n = config.worker_range[1];
    let proficiencies = sample_proficiencies(&config.proficiency_dist, max_n, &mut rng)?;
    let tasks = config.tasks.values();
    let utilities: Vec<Vec<Vec<f64>>> = config
        .utility_dists
        .iter()
        .map(|d| {
            tasks
                .iter()
                .map(|&m| sample_utilities(d, m, &mut rng))
                .collect()
        })
        .collect();
    let bnb = BnbConfig {
        node_budget: config.node_budget.unwrap_or(DEFAULT_NODE_BUDGET),
    };

    points
        .iter()
        .map(|pt| {
            let instance = Instance::new(
                proficiencies[..pt.workers].to_vec(),
                utilities[pt.utility_index][pt.tasks_index].clone(),
            )?;
            let mut out: [Option<Outcome>; 4] = [None; 4];
            if config.has(Solver::Rand) {
                let s = solve_randomized(&instance)?;
                out[Solver::Rand.slot()] = Some(Outcome {
                    value: s.value,
                    workers: s.policy.support().len(),
                });
            }
            if config.has(Solver::Det) {
                let s = solve_deterministic(&instance)?;
                out[Solver::Det.slot()] = Some(Outcome {
                    value: s.value,
                    workers: s.counts.iter().filter(|&&c| c > 0).count(),
                });
            }
            if config.has(Solver::HetRand) {
                let s = solve_het_randomized(&instance);
                out[Solver::HetRand.slot()] = Some(Outcome {
                    value: s.value,
                    workers: s.policy.support().len(),
                });
            }
            if config.has(Solver::HetDet) {
                let s = solve_het_deterministic_with(&instance, &bnb).map_err(|e| match e {
                    Error::NodeBudget { budget, .. } => Error::ResourceLimit(format!(
                        "het_det exhausted its node budget of {budget} at \
                         utility={} tasks={} workers={} (run {run})",
                        pt.utility, pt.tasks, pt.workers
                    )),
                    other => other,
                })?;
                let mut used = s.task_to_worker.clone();
                used.sort_unstable();
                used.dedup();
                out[Solver::HetDet.slot()] = Some(Outcome {
                    value: s.value,
                    workers: used.len(),
                });
            }
            Ok(out)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    /// Runs spread over the rayon pool; serial when built without the
    /// `parallel` feature.
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverStats {
    pub mean_utility: f64,
    pub utility_se: f64,
    pub mean_workers: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioStats {
    /// Mean over runs of `(randomized − deterministic) / deterministic`.
    pub mean: f64,
    pub se: f64,
    /// Runs with a positive deterministic value.
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub proficiency_dist: String,
    pub utility_dist: String,
    pub tasks: usize,
    pub workers: usize,
    pub runs: usize,
    /// Indexed like [`Solver::ALL`].
    pub solvers: [Option<SolverStats>; 4],
    pub ratio: Option<RatioStats>,
    pub seed: u64,
}

impl ReportRow {
    pub fn solver(&self, solver: Solver) -> Option<&SolverStats> {
        self.solvers[solver.slot()].as_ref()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

/// Column order of the CSV report. Stable; append new columns at the end.
pub const CSV_COLUMNS: [&str; 21] = [
    "proficiency_dist",
    "utility_dist",
    "tasks",
    "workers",
    "runs",
    "rand_utility",
    "rand_utility_se",
    "rand_workers",
    "det_utility",
    "det_utility_se",
    "det_workers",
    "het_rand_utility",
    "het_rand_utility_se",
    "het_rand_workers",
    "het_det_utility",
    "het_det_utility_se",
    "het_det_workers",
    "ratio_mean",
    "ratio_se",
    "ratio_runs",
    "seed",
];

fn csv_err(e: impl fmt::Display) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

impl ExperimentReport {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        for row in &self.rows {
            let mut rec = vec![
                row.proficiency_dist.clone(),
                row.utility_dist.clone(),
                row.tasks.to_string(),
                row.workers.to_string(),
                row.runs.to_string(),
            ];
            for stats in &row.solvers {
                match stats {
                    Some(s) => rec.extend([
                        s.mean_utility.to_string(),
                        s.utility_se.to_string(),
                        s.mean_workers.to_string(),
                    ]),
                    None => rec.extend([String::new(), String::new(), String::new()]),
                }
            }
            match &row.ratio {
                Some(r) => rec.extend([r.mean.to_string(), r.se.to_string(), r.runs.to_string()]),
                None => rec.extend([String::new(), String::new(), String::new()]),
            }
            rec.push(row.seed.to_string());
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(csv_err)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Parses a report previously written by [`ExperimentReport::write_csv`].
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers().map_err(csv_err)?.clone();
        if headers.iter().ne(CSV_COLUMNS.iter().copied()) {
            return Err(Error::InvalidInput(format!(
                "unexpected csv header {:?}",
                headers.iter().collect::<Vec<_>>()
            )));
        }
        let mut rows = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let at = |i: usize| format!("row {} column {}", line + 1, CSV_COLUMNS[i]);
            let int = |i: usize| -> Result<u64> {
                field(i)
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("{}: expected an integer", at(i))))
            };
            let float = |i: usize| -> Result<Option<f64>> {
                match field(i) {
                    "" => Ok(None),
                    s => s
                        .parse()
                        .map(Some)
                        .map_err(|_| Error::InvalidInput(format!("{}: expected a number", at(i)))),
                }
            };
            let mut solvers = [None; 4];
            for (k, slot) in solvers.iter_mut().enumerate() {
                let base = 5 + 3 * k;
                if let (Some(mean_utility), Some(utility_se), Some(mean_workers)) =
                    (float(base)?, float(base + 1)?, float(base + 2)?)
                {
                    *slot = Some(SolverStats {
                        mean_utility,
                        utility_se,
                        mean_workers,
                    });
                }
            }
            let ratio = match (float(17)?, float(18)?, field(19)) {
                (Some(mean), Some(se), runs) if !runs.is_empty() => Some(RatioStats {
                    mean,
                    se,
                    runs: int(19)? as usize,
                }),
                _ => None,
            };
            rows.push(ReportRow {
                proficiency_dist: field(0).to_string(),
                utility_dist: field(1).to_string(),
                tasks: int(2)? as usize,
                workers: int(3)? as usize,
                runs: int(4)? as usize,
                solvers,
                ratio,
                seed: int(20)?,
            });
        }
        Ok(ExperimentReport { rows })
    }
}

/// Runs the sweep, spreading runs over threads when available.
pub fn run_comparison(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_comparison_with(config, Execution::Parallel)
}

pub fn run_comparison_with(
    config: &ExperimentConfig,
    execution: Execution,
) -> Result<ExperimentReport> {
    config.validate()?;
    let points = config.points();
    let runs = config.runs();

    let samples: Vec<RunSample> = match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..runs)
            .into_par_iter()
            .map(|r| run_once(config, &points, r))
            .collect::<Result<_>>()?,
        _ => (0..runs)
            .map(|r| run_once(config, &points, r))
            .collect::<Result<_>>()?,
    };

    // The ratio pairs the strongest selected randomized solver with the
    // strongest selected deterministic one.
    let randomized = [Solver::HetRand, Solver::Rand]
        .into_iter()
        .find(|s| config.has(*s));
    let deterministic = [Solver::HetDet, Solver::Det]
        .into_iter()
        .find(|s| config.has(*s));

    let rows = points
        .iter()
        .enumerate()
        .map(|(pi, pt)| {
            let mut utility = [Accumulator::default(); 4];
            let mut workers = [Accumulator::default(); 4];
            let mut ratio = Accumulator::default();
            for sample in &samples {
                let point = &sample[pi];
                for (slot, outcome) in point.iter().enumerate() {
                    if let Some(o) = outcome {
                        utility[slot].push(o.value);
                        workers[slot].push(o.workers as f64);
                    }
                }
                if let (Some(r), Some(d)) = (randomized, deterministic) {
                    let (r, d) = (point[r.slot()].unwrap(), point[d.slot()].unwrap());
                    if d.value > 0.0 {
                        ratio.push((r.value - d.value) / d.value);
                    }
                }
            }
            let mut solvers = [None; 4];
            for s in Solver::ALL {
                if config.has(s) {
                    solvers[s.slot()] = Some(SolverStats {
                        mean_utility: utility[s.slot()].mean(),
                        utility_se: utility[s.slot()].std_error(),
                        mean_workers: workers[s.slot()].mean(),
                    });
                }
            }
            let ratio = (randomized.is_some() && deterministic.is_some() && ratio.count() > 0)
                .then(|| RatioStats {
                    mean: ratio.mean(),
                    se: ratio.std_error(),
                    runs: ratio.count(),
                });
            ReportRow {
                proficiency_dist: config.proficiency_dist.label(),
                utility_dist: pt.utility.to_string(),
                tasks: pt.tasks,
                workers: pt.workers,
                runs,
                solvers,
                ratio,
                seed: config.seed,
            }
        })
        .collect();
    Ok(ExperimentReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            seed: 11,
            runs: Some(5),
            worker_range: [2, 4],
            tasks: TaskCounts::Many(vec![3, 6]),
            proficiency_dist: ProficiencyDist::Uniform,
            utility_dists: default_utilities(),
            solvers: vec![Solver::Rand, Solver::Det],
            node_budget: None,
        }
    }

    #[test]
    fn uniform_samples_stay_in_range() {
        let mut rng = run_rng(3, 0);
        let p = sample_proficiencies(&ProficiencyDist::Uniform, 3, &mut rng).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.iter().all(|x| (0.5..=1.0).contains(x)));
    }

    #[test]
    fn power_law_leans_low() {
        let n = 100_000;
        let pl = sample_proficiencies(&ProficiencyDist::PowerLaw { k: 0.5 }, n, &mut run_rng(1, 0))
            .unwrap();
        let un = sample_proficiencies(&ProficiencyDist::Uniform, n, &mut run_rng(1, 1)).unwrap();
        assert!(pl.iter().all(|x| (0.5..=1.0).contains(x)));
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(mean(&pl) < mean(&un), "{} vs {}", mean(&pl), mean(&un));
        // analytic mean of x^(-1/2) on [0.5, 1]
        let exact = (2.0 / 3.0) * (1.0 - 0.5f64.powf(1.5)) / (2.0 * (1.0 - 0.5f64.sqrt()));
        assert!((mean(&pl) - exact).abs() < 3e-3);
    }

    #[test]
    fn sampler_parameter_errors() {
        let mut rng = run_rng(0, 0);
        assert!(matches!(
            sample_proficiencies(&ProficiencyDist::Uniform, 0, &mut rng),
            Err(Error::Parameter(_))
        ));
        assert!(sample_proficiencies(&ProficiencyDist::PowerLaw { k: 1.0 }, 3, &mut rng).is_err());
        assert!(sample_proficiencies(&ProficiencyDist::PowerLaw { k: 2.0 }, 3, &mut rng).is_ok());
    }

    #[test]
    fn config_validation() {
        let mut c = small_config();
        c.worker_range = [3, 2];
        assert!(c.validate().is_err());
        let mut c = small_config();
        c.tasks = TaskCounts::Many(vec![]);
        assert!(c.validate().is_err());
        let mut c = small_config();
        c.utility_dists = vec![UtilityDist::Uniform { max: 10.0 }];
        assert!(matches!(c.validate(), Err(Error::Mode(_))));
        c.solvers = vec![Solver::HetRand, Solver::HetDet];
        assert!(c.validate().is_ok());
        assert_eq!(
            ExperimentConfig {
                runs: None,
                ..c.clone()
            }
            .runs(),
            DEFAULT_RUNS_EXACT
        );
        let mut c = small_config();
        c.runs = Some(0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_shapes() {
        let c = ExperimentConfig::from_json(
            r#"{"seed": 1, "worker_range": [2, 5], "tasks": 100,
                "proficiency_dist": {"kind": "power_law", "k": 0.5}}"#,
        )
        .unwrap();
        assert_eq!(c.tasks.values(), vec![100]);
        assert_eq!(c.runs(), DEFAULT_RUNS);
        assert_eq!(c.solvers, vec![Solver::Rand, Solver::Det]);
        let c = ExperimentConfig::from_json(
            r#"{"seed": 1, "runs": 3, "worker_range": [2, 5], "tasks": [15],
                "utility_dists": [{"kind": "uniform", "max": 10}],
                "solvers": ["het_rand", "het_det"]}"#,
        )
        .unwrap();
        assert_eq!(c.utility_dists, vec![UtilityDist::Uniform { max: 10.0 }]);
        assert!(ExperimentConfig::from_json(r#"{"seed": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(
            r#"{"seed": 1, "worker_range": [1,2], "tasks": 3, "bogus": 0}"#
        )
        .is_err());
    }

    #[test]
    fn report_shape_and_dominance() {
        let report = run_comparison(&small_config()).unwrap();
        assert_eq!(report.rows.len(), 2 * 3);
        for row in &report.rows {
            let r = row.solver(Solver::Rand).unwrap();
            let d = row.solver(Solver::Det).unwrap();
            assert!(r.mean_utility >= d.mean_utility - 1e-12);
            assert!(row.ratio.unwrap().mean >= -1e-12);
            assert!(row.solver(Solver::HetDet).is_none());
        }
    }

    #[test]
    fn single_run_is_reproducible() {
        let mut c = small_config();
        c.runs = Some(1);
        let a = run_comparison(&c).unwrap().to_csv_string().unwrap();
        let b = run_comparison(&c).unwrap().to_csv_string().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let c = small_config();
        let a = run_comparison_with(&c, Execution::Sequential).unwrap();
        let b = run_comparison_with(&c, Execution::Parallel).unwrap();
        assert_eq!(a.to_csv_string().unwrap(), b.to_csv_string().unwrap());
    }

    #[test]
    fn csv_reads_back() {
        let mut c = small_config();
        c.solvers = vec![Solver::Rand, Solver::Det, Solver::HetRand, Solver::HetDet];
        let report = run_comparison(&c).unwrap();
        let text = report.to_csv_string().unwrap();
        let back = ExperimentReport::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, report);
        assert!(ExperimentReport::read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn node_budget_failure_names_the_point() {
        let c = ExperimentConfig {
            seed: 2,
            runs: Some(1),
            worker_range: [6, 6],
            tasks: TaskCounts::One(12),
            proficiency_dist: ProficiencyDist::Uniform,
            utility_dists: vec![UtilityDist::Uniform { max: 10.0 }],
            solvers: vec![Solver::HetRand, Solver::HetDet],
            node_budget: Some(5),
        };
        let err = run_comparison(&c).unwrap_err();
        assert!(err.is_resource_limit());
        let msg = err.to_string();
        assert!(
            msg.contains("tasks=12") && msg.contains("workers=6"),
            "{msg}"
        );
    }
}
