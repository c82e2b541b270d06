//! Game definition, defender utility under attack, and the attacker's best
//! response.
//!
//! Workers are stored in canonical order: non-increasing proficiency, with
//! equal proficiencies kept in input order. Every worker index accepted or
//! returned by this crate is canonical unless a method name says otherwise;
//! [`Instance::original_index`] maps back to the caller's order. Task
//! indices are never permuted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Worker proficiencies and task utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    proficiencies: Vec<f64>,
    task_utilities: Vec<f64>,
    /// `order[canonical] = original`.
    order: Vec<usize>,
}

/// On-disk form of an [`Instance`], workers in the caller's order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub proficiencies: Vec<f64>,
    pub task_utilities: Vec<f64>,
}

impl Instance {
    pub fn new(proficiencies: Vec<f64>, task_utilities: Vec<f64>) -> Result<Self> {
        if proficiencies.is_empty() {
            return Err(Error::invalid("at least one worker is required"));
        }
        if task_utilities.is_empty() {
            return Err(Error::invalid("at least one task is required"));
        }
        for (w, &p) in proficiencies.iter().enumerate() {
            if !(0.5..=1.0).contains(&p) {
                return Err(Error::invalid(format!(
                    "proficiency of worker {w} is {p}, expected a value in [0.5, 1]"
                )));
            }
        }
        for (t, &u) in task_utilities.iter().enumerate() {
            if !u.is_finite() || u < 0.0 {
                return Err(Error::invalid(format!(
                    "utility of task {t} is {u}, expected a finite non-negative value"
                )));
            }
        }
        let mut order: Vec<usize> = (0..proficiencies.len()).collect();
        // stable: equal proficiencies keep input order
        order.sort_by(|&a, &b| proficiencies[b].total_cmp(&proficiencies[a]));
        let sorted = order.iter().map(|&i| proficiencies[i]).collect();
        Ok(Instance {
            proficiencies: sorted,
            task_utilities,
            order,
        })
    }

    /// Instance with `tasks` tasks of utility 1.
    pub fn homogeneous(proficiencies: Vec<f64>, tasks: usize) -> Result<Self> {
        Self::new(proficiencies, vec![1.0; tasks])
    }

    pub fn from_spec(spec: InstanceSpec) -> Result<Self> {
        Self::new(spec.proficiencies, spec.task_utilities)
    }

    pub fn to_spec(&self) -> InstanceSpec {
        InstanceSpec {
            proficiencies: self.original_proficiencies(),
            task_utilities: self.task_utilities.clone(),
        }
    }

    pub fn num_workers(&self) -> usize {
        self.proficiencies.len()
    }

    pub fn num_tasks(&self) -> usize {
        self.task_utilities.len()
    }

    /// Proficiencies in canonical (non-increasing) order.
    pub fn proficiencies(&self) -> &[f64] {
        &self.proficiencies
    }

    pub fn proficiency(&self, worker: usize) -> f64 {
        self.proficiencies[worker]
    }

    pub fn task_utilities(&self) -> &[f64] {
        &self.task_utilities
    }

    pub fn original_proficiencies(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.num_workers()];
        for (canonical, &orig) in self.order.iter().enumerate() {
            out[orig] = self.proficiencies[canonical];
        }
        out
    }

    pub fn original_index(&self, canonical: usize) -> usize {
        self.order[canonical]
    }

    pub fn canonical_index(&self, original: usize) -> Option<usize> {
        self.order.iter().position(|&o| o == original)
    }

    /// True when every task carries the same utility.
    pub fn is_homogeneous(&self) -> bool {
        let first = self.task_utilities[0];
        self.task_utilities.iter().all(|&u| u == first)
    }

    /// The common task utility of a homogeneous instance.
    pub fn unit_utility(&self) -> Option<f64> {
        self.is_homogeneous().then(|| self.task_utilities[0])
    }

    /// Total utility mass `U`; `m * u` for homogeneous instances.
    pub fn total_utility(&self) -> f64 {
        match self.unit_utility() {
            Some(u) => self.num_tasks() as f64 * u,
            None => self.task_utilities.iter().sum(),
        }
    }

    fn check_worker(&self, worker: usize) -> Result<()> {
        if worker >= self.num_workers() {
            return Err(Error::invalid(format!(
                "worker index {worker} out of range for {} workers",
                self.num_workers()
            )));
        }
        Ok(())
    }
}

/// A deterministic assignment with one worker per task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeterministicAssignment {
    /// Number of tasks held by each worker. Only meaningful for
    /// homogeneous instances; the total may fall short of the task count.
    Counts(Vec<usize>),
    /// `task_to_worker[t]` is the worker holding task `t`.
    TaskToWorker(Vec<usize>),
}

impl DeterministicAssignment {
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let n = instance.num_workers();
        let m = instance.num_tasks();
        match self {
            DeterministicAssignment::Counts(counts) => {
                if counts.len() != n {
                    return Err(Error::invalid(format!(
                        "counts has {} entries for {n} workers",
                        counts.len()
                    )));
                }
                let total: usize = counts.iter().sum();
                if total > m {
                    return Err(Error::invalid(format!(
                        "counts assign {total} tasks but the instance has {m}"
                    )));
                }
                if !instance.is_homogeneous() {
                    return Err(Error::Mode(
                        "count-form assignments need homogeneous task utilities; \
                         use a task-to-worker map"
                            .into(),
                    ));
                }
            }
            DeterministicAssignment::TaskToWorker(map) => {
                if map.len() != m {
                    return Err(Error::invalid(format!(
                        "task_to_worker has {} entries for {m} tasks",
                        map.len()
                    )));
                }
                if let Some((t, &w)) = map.iter().enumerate().find(|(_, &w)| w >= n) {
                    return Err(Error::invalid(format!(
                        "task {t} assigned to worker {w}, but there are only {n} workers"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Tasks held by each worker.
    pub fn counts(&self, num_workers: usize) -> Vec<usize> {
        match self {
            DeterministicAssignment::Counts(c) => c.clone(),
            DeterministicAssignment::TaskToWorker(map) => {
                let mut c = vec![0; num_workers];
                for &w in map {
                    c[w] += 1;
                }
                c
            }
        }
    }

    /// Expected utility each worker delivers if left alone. Assumes the
    /// assignment has been validated.
    pub(crate) fn contributions(&self, instance: &Instance) -> Vec<f64> {
        let p = instance.proficiencies();
        match self {
            DeterministicAssignment::Counts(counts) => {
                let u = instance.task_utilities()[0];
                counts
                    .iter()
                    .zip(p)
                    .map(|(&s, &pw)| u * s as f64 * pw)
                    .collect()
            }
            DeterministicAssignment::TaskToWorker(map) => {
                let mut mass = vec![0.0; p.len()];
                for (&w, &u) in map.iter().zip(instance.task_utilities()) {
                    mass[w] += u;
                }
                mass.iter().zip(p).map(|(&m, &pw)| m * pw).collect()
            }
        }
    }
}

/// Probability distribution over unit assignments: with probability
/// `weights[w]` every task goes to worker `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizedPolicy {
    weights: Vec<f64>,
}

impl RandomizedPolicy {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("policy has no weights"));
        }
        if let Some((w, &x)) = weights
            .iter()
            .enumerate()
            .find(|(_, &x)| !x.is_finite() || x < 0.0)
        {
            return Err(Error::invalid(format!("weight of worker {w} is {x}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::invalid(format!(
                "policy weights sum to {sum}, not 1"
            )));
        }
        Ok(RandomizedPolicy { weights })
    }

    /// All mass on one worker.
    pub fn pure(num_workers: usize, worker: usize) -> Self {
        let mut weights = vec![0.0; num_workers];
        weights[worker] = 1.0;
        RandomizedPolicy { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Workers with positive weight, in canonical order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&w| self.weights[w] > 0.0)
            .collect()
    }

    fn validate(&self, instance: &Instance) -> Result<()> {
        if self.weights.len() != instance.num_workers() {
            return Err(Error::invalid(format!(
                "policy has {} weights for {} workers",
                self.weights.len(),
                instance.num_workers()
            )));
        }
        Ok(())
    }

    pub(crate) fn contributions(&self, instance: &Instance) -> Vec<f64> {
        let total = instance.total_utility();
        self.weights
            .iter()
            .zip(instance.proficiencies())
            .map(|(&l, &p)| total * (l * p))
            .collect()
    }
}

/// The attacker's choice and its consequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackResponse {
    pub target: usize,
    /// Expected utility removed by the attack.
    pub attacker_value: f64,
    /// Expected utility the defender keeps.
    pub defender_value: f64,
}

/// Lowest index among the maximizers.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn sum_except(values: &[f64], skip: usize) -> f64 {
    values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(_, &v)| v)
        .sum()
}

/// Expected utility retained when `target` is attacked. Unassigned tasks
/// contribute nothing.
pub fn evaluate_deterministic(
    instance: &Instance,
    assignment: &DeterministicAssignment,
    target: usize,
) -> Result<f64> {
    assignment.validate(instance)?;
    instance.check_worker(target)?;
    Ok(sum_except(&assignment.contributions(instance), target))
}

/// Expected utility each worker delivers under `assignment` if left alone.
pub fn deterministic_contributions(
    instance: &Instance,
    assignment: &DeterministicAssignment,
) -> Result<Vec<f64>> {
    assignment.validate(instance)?;
    Ok(assignment.contributions(instance))
}

/// Expected utility each worker delivers under `policy` if left alone.
pub fn randomized_contributions(
    instance: &Instance,
    policy: &RandomizedPolicy,
) -> Result<Vec<f64>> {
    policy.validate(instance)?;
    Ok(policy.contributions(instance))
}

/// The attacker removes the worker contributing the most; ties go to the
/// lowest canonical index.
pub fn best_response_deterministic(
    instance: &Instance,
    assignment: &DeterministicAssignment,
) -> Result<AttackResponse> {
    assignment.validate(instance)?;
    Ok(respond(&assignment.contributions(instance)))
}

/// Expected utility retained against a fixed target when the attacker only
/// knows the policy.
pub fn evaluate_randomized(
    instance: &Instance,
    policy: &RandomizedPolicy,
    target: usize,
) -> Result<f64> {
    policy.validate(instance)?;
    instance.check_worker(target)?;
    Ok(sum_except(&policy.contributions(instance), target))
}

/// The attacker targets `argmax_w λ_w p_w`, lowest index on ties.
pub fn best_response_randomized(
    instance: &Instance,
    policy: &RandomizedPolicy,
) -> Result<AttackResponse> {
    policy.validate(instance)?;
    Ok(respond(&policy.contributions(instance)))
}

fn respond(contributions: &[f64]) -> AttackResponse {
    let target = argmax(contributions);
    AttackResponse {
        target,
        attacker_value: contributions[target],
        defender_value: sum_except(contributions, target),
    }
}
