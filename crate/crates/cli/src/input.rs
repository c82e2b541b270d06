//! Reading instances, assignments and configs from JSON files, and moving
//! worker indices between the caller's order and the solver's canonical
//! order.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use taskalloc::model::InstanceSpec;
use taskalloc::{DeterministicAssignment, Instance, RandomizedPolicy};

use crate::error::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

/// Parses JSON, reporting the line, column and field path of the first
/// problem.
pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        let message = inner.to_string();
        let message = match message.rfind(" at line ") {
            Some(cut) => message[..cut].to_string(),
            None => message,
        };
        CliError::Validation(format!(
            "{}:{}:{}: field `{field}`: {message}",
            path.display(),
            inner.line(),
            inner.column()
        ))
    })
}

pub fn load_instance(path: &Path) -> CliResult<Instance> {
    let spec: InstanceSpec = parse_json(path, &read_text(path)?)?;
    Instance::from_spec(spec).map_err(|e| CliError::from(e).in_file(path))
}

/// An allocation supplied by the user, workers in input order.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum UserAllocation {
    Counts(Vec<usize>),
    TaskToWorker(Vec<usize>),
    Weights(Vec<f64>),
}

/// A user allocation translated to canonical worker indices.
pub enum Allocation {
    Assignment(DeterministicAssignment),
    Policy(RandomizedPolicy),
}

fn check_len(what: &str, got: usize, want: usize, unit: &str) -> CliResult<()> {
    if got == want {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{what} has {got} entries but the instance has {want} {unit}"
        )))
    }
}

impl UserAllocation {
    pub fn to_canonical(&self, instance: &Instance) -> CliResult<Allocation> {
        let n = instance.num_workers();
        Ok(match self {
            UserAllocation::Counts(counts) => {
                check_len("counts", counts.len(), n, "workers")?;
                Allocation::Assignment(DeterministicAssignment::Counts(from_original(
                    instance, counts,
                )))
            }
            UserAllocation::TaskToWorker(map) => {
                check_len("task_to_worker", map.len(), instance.num_tasks(), "tasks")?;
                let map = map
                    .iter()
                    .enumerate()
                    .map(|(t, &w)| {
                        instance.canonical_index(w).ok_or_else(|| {
                            CliError::Validation(format!(
                                "task {t} assigned to worker {w}, but there are only {n} workers"
                            ))
                        })
                    })
                    .collect::<CliResult<_>>()?;
                Allocation::Assignment(DeterministicAssignment::TaskToWorker(map))
            }
            UserAllocation::Weights(weights) => {
                check_len("weights", weights.len(), n, "workers")?;
                Allocation::Policy(RandomizedPolicy::new(from_original(instance, weights))?)
            }
        })
    }
}

/// Reorders per-worker values given in input order into canonical order.
pub fn from_original<T: Copy>(instance: &Instance, values: &[T]) -> Vec<T> {
    (0..instance.num_workers())
        .map(|c| values[instance.original_index(c)])
        .collect()
}

/// Reorders per-worker values given in canonical order into input order.
pub fn to_original<T: Copy + Default>(instance: &Instance, values: &[T]) -> Vec<T> {
    let mut out = vec![T::default(); values.len()];
    for (c, &v) in values.iter().enumerate() {
        out[instance.original_index(c)] = v;
    }
    out
}
