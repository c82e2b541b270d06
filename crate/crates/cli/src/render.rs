//! Turning solver, oracle and attack results into tables, JSON and CSV.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};
use taskalloc::experiments::{ExperimentReport, Solver};
use taskalloc::{
    best_response_deterministic, best_response_randomized, deterministic_contributions,
    randomized_contributions, DeterministicAssignment, Instance,
};

use crate::error::{CliError, CliResult};
use crate::input::{to_original, Allocation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// One worker's share of an allocation, in input order.
#[derive(Debug, Clone, Serialize)]
pub struct WorkerRow {
    pub worker: usize,
    pub proficiency: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tasks: Option<usize>,
    /// Expected utility the worker delivers if not attacked.
    pub contribution: f64,
    pub attacked: bool,
}

/// An allocation together with the attacker's best response to it. Worker
/// indices are 0-based positions in the instance file.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub solver: String,
    pub defender_value: f64,
    pub attacked_worker: usize,
    pub attacker_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task_to_worker: Option<Vec<usize>>,
    pub workers: Vec<WorkerRow>,
    /// Solver-specific extras such as search statistics.
    #[serde(flatten)]
    pub details: Map<String, Value>,
}

impl Summary {
    pub fn new(solver: &str, instance: &Instance, allocation: &Allocation) -> CliResult<Self> {
        let (response, contributions) = match allocation {
            Allocation::Policy(p) => (
                best_response_randomized(instance, p)?,
                randomized_contributions(instance, p)?,
            ),
            Allocation::Assignment(a) => (
                best_response_deterministic(instance, a)?,
                deterministic_contributions(instance, a)?,
            ),
        };
        let mut weights = None;
        let mut counts = None;
        let mut task_to_worker = None;
        match allocation {
            Allocation::Policy(p) => weights = Some(to_original(instance, p.weights())),
            Allocation::Assignment(a) => {
                counts = Some(to_original(instance, &a.counts(instance.num_workers())));
                if let DeterministicAssignment::TaskToWorker(map) = a {
                    task_to_worker =
                        Some(map.iter().map(|&w| instance.original_index(w)).collect());
                }
            }
        }
        let contributions = to_original(instance, &contributions);
        let attacked_worker = instance.original_index(response.target);
        let workers = (0..instance.num_workers())
            .map(|w| WorkerRow {
                worker: w,
                proficiency: instance.proficiency(instance.canonical_index(w).expect("in range")),
                weight: weights.as_ref().map(|x| x[w]),
                tasks: counts.as_ref().map(|x| x[w]),
                contribution: contributions[w],
                attacked: w == attacked_worker,
            })
            .collect();
        Ok(Summary {
            solver: solver.to_string(),
            defender_value: response.defender_value,
            attacked_worker,
            attacker_value: response.attacker_value,
            weights,
            counts,
            task_to_worker,
            workers,
            details: Map::new(),
        })
    }

    pub fn detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.details.insert(
            key.to_string(),
            serde_json::to_value(value).expect("plain data serializes"),
        );
        self
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Json => to_json(self),
            Format::Table => Ok(self.table()),
            Format::Csv => self.csv(),
        }
    }

    fn table(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| writeln!(out, "{k:<18}{v}").unwrap();
        line("solver", self.solver.clone());
        line("defender value", format!("{:.5}", self.defender_value));
        line(
            "attacked worker",
            format!(
                "{} (removes {:.5})",
                label(self.attacked_worker),
                self.attacker_value
            ),
        );
        if let Some(w) = &self.weights {
            line(
                "policy",
                format!("λ = ({})", join(w.iter().map(|x| format!("{x:.5}")))),
            );
        }
        if let Some(map) = &self.task_to_worker {
            line(
                "assignment",
                format!("({})", join(map.iter().map(|&w| label(w)))),
            );
        } else if let Some(c) = &self.counts {
            line(
                "counts",
                format!("({})", join(c.iter().map(|x| x.to_string()))),
            );
        }
        for (k, v) in &self.details {
            let shown = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) if n.is_f64() => format!("{:.5}", n.as_f64().unwrap_or_default()),
                other => other.to_string(),
            };
            line(&k.replace('_', " "), shown);
        }
        out.push('\n');
        let alloc = if self.weights.is_some() {
            "weight"
        } else {
            "tasks"
        };
        writeln!(
            out,
            "{:<8}{:>12}{:>10}{:>14}",
            "worker", "proficiency", alloc, "contribution"
        )
        .unwrap();
        for r in &self.workers {
            let share = match (r.weight, r.tasks) {
                (Some(w), _) => format!("{w:.5}"),
                (None, Some(t)) => t.to_string(),
                (None, None) => String::new(),
            };
            writeln!(
                out,
                "{:<8}{:>12.5}{:>10}{:>14.5}{}",
                label(r.worker),
                r.proficiency,
                share,
                r.contribution,
                if r.attacked { "  attacked" } else { "" }
            )
            .unwrap();
        }
        out
    }

    fn csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let opt = |x: Option<String>| x.unwrap_or_default();
        w.write_record([
            "worker",
            "proficiency",
            "weight",
            "tasks",
            "contribution",
            "attacked",
        ])
        .map_err(output_err)?;
        for r in &self.workers {
            w.write_record([
                r.worker.to_string(),
                r.proficiency.to_string(),
                opt(r.weight.map(|x| x.to_string())),
                opt(r.tasks.map(|x| x.to_string())),
                r.contribution.to_string(),
                r.attacked.to_string(),
            ])
            .map_err(output_err)?;
        }
        finish_csv(w)
    }
}

/// 1-based worker label used in tables.
pub fn label(worker: usize) -> String {
    format!("w{}", worker + 1)
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(", ")
}

fn output_err(e: impl std::fmt::Display) -> CliError {
    CliError::Output(e.to_string())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(output_err)?;
    String::from_utf8(bytes).map_err(output_err)
}

fn to_json(value: &impl Serialize) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(output_err)?;
    s.push('\n');
    Ok(s)
}

pub fn render_report(report: &ExperimentReport, format: Format) -> CliResult<String> {
    match format {
        Format::Csv => report.to_csv_string().map_err(output_err),
        Format::Json => to_json(&report_json(report)),
        Format::Table => Ok(report_table(report)),
    }
}

fn report_json(report: &ExperimentReport) -> Value {
    let rows = report
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            obj.insert(
                "proficiency_dist".into(),
                row.proficiency_dist.clone().into(),
            );
            obj.insert("utility_dist".into(), row.utility_dist.clone().into());
            obj.insert("tasks".into(), row.tasks.into());
            obj.insert("workers".into(), row.workers.into());
            obj.insert("runs".into(), row.runs.into());
            for s in Solver::ALL {
                if let Some(stats) = row.solver(s) {
                    obj.insert(
                        s.name().into(),
                        serde_json::to_value(stats).expect("serializes"),
                    );
                }
            }
            if let Some(r) = &row.ratio {
                obj.insert("ratio".into(), serde_json::to_value(r).expect("serializes"));
            }
            obj.insert("seed".into(), row.seed.into());
            Value::Object(obj)
        })
        .collect();
    Value::Array(rows)
}

fn report_table(report: &ExperimentReport) -> String {
    let solvers: Vec<Solver> = Solver::ALL
        .into_iter()
        .filter(|&s| report.rows.iter().any(|r| r.solver(s).is_some()))
        .collect();
    let mut out = String::new();
    write!(
        out,
        "{:<20}{:<16}{:>6}{:>6}",
        "proficiency", "utility", "m", "n"
    )
    .unwrap();
    for s in &solvers {
        write!(out, "{:>14}", format!("{}_utility", s.name())).unwrap();
    }
    writeln!(out, "{:>12}", "ratio").unwrap();
    for row in &report.rows {
        write!(
            out,
            "{:<20}{:<16}{:>6}{:>6}",
            row.proficiency_dist, row.utility_dist, row.tasks, row.workers
        )
        .unwrap();
        for &s in &solvers {
            let v = row.solver(s).map(|x| format!("{:.4}", x.mean_utility));
            write!(out, "{:>14}", v.unwrap_or_default()).unwrap();
        }
        let ratio = row.ratio.map(|r| format!("{:.4}%", 100.0 * r.mean));
        writeln!(out, "{:>12}", ratio.unwrap_or_default()).unwrap();
    }
    out
}
