//! Brute-force searches that certify the solvers on small instances.
//!
//! None of these share code with the solvers beyond the evaluation and
//! best-response functions in [`crate::model`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    best_response_deterministic, DeterministicAssignment, Instance, RandomizedPolicy,
};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Largest worker count accepted by [`oracle_randomized_subsets`].
pub const MAX_SUBSET_WORKERS: usize = 20;
/// Largest worker count accepted by [`oracle_randomized_grid`].
pub const MAX_GRID_WORKERS: usize = 4;
/// Lattice points [`oracle_randomized_grid`] is willing to visit.
pub const MAX_GRID_POINTS: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Assignment(DeterministicAssignment),
    Policy(RandomizedPolicy),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Method {
    /// Every count vector summing to `m`.
    CountCompositions { space: u64 },
    /// Every task-to-worker map.
    TaskMaps { space: u64 },
    /// Balanced policy on every non-empty worker subset.
    Subsets { space: u64 },
    /// Lattice points of the weight simplex at spacing `step`.
    SimplexGrid { step: f64, space: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    pub witness: Witness,
    pub method: Method,
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Exact max-min over all one-worker-per-task assignments.
///
/// Homogeneous instances enumerate count vectors (`C(m+n−1, n−1)` of them);
/// otherwise every one of the `n^m` task maps is scored. Either way the
/// space must not exceed `max_space`.
pub fn oracle_deterministic(instance: &Instance, max_space: u64) -> Result<OracleResult> {
    let n = instance.num_workers();
    let m = instance.num_tasks();
    if instance.is_homogeneous() {
        let space = binomial((m + n - 1) as u64, (n - 1) as u64);
        if space > max_space {
            return Err(Error::ResourceLimit(format!(
                "{space} count vectors exceed the cap of {max_space}"
            )));
        }
        let (value, counts) = best_composition(instance);
        Ok(OracleResult {
            value,
            witness: Witness::Assignment(DeterministicAssignment::Counts(counts)),
            method: Method::CountCompositions { space },
        })
    } else {
        let space = (n as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
        if space > max_space {
            return Err(Error::ResourceLimit(format!(
                "{n}^{m} task maps exceed the cap of {max_space}"
            )));
        }
        let (value, map) = best_task_map(instance);
        Ok(OracleResult {
            value,
            witness: Witness::Assignment(DeterministicAssignment::TaskToWorker(map)),
            method: Method::TaskMaps { space },
        })
    }
}

fn defender_value(instance: &Instance, assignment: &DeterministicAssignment) -> f64 {
    best_response_deterministic(instance, assignment)
        .expect("enumerated assignments are valid")
        .defender_value
}

/// Keeps the first maximizer in enumeration order.
fn best_composition(instance: &Instance) -> (f64, Vec<usize>) {
    fn rec(
        instance: &Instance,
        worker: usize,
        left: usize,
        counts: &mut Vec<usize>,
        best: &mut Option<(f64, Vec<usize>)>,
    ) {
        if worker + 1 == counts.len() {
            counts[worker] = left;
            let value = defender_value(instance, &DeterministicAssignment::Counts(counts.clone()));
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                *best = Some((value, counts.clone()));
            }
            return;
        }
        for c in (0..=left).rev() {
            counts[worker] = c;
            rec(instance, worker + 1, left - c, counts, best);
        }
    }
    let mut counts = vec![0; instance.num_workers()];
    let mut best = None;
    rec(instance, 0, instance.num_tasks(), &mut counts, &mut best);
    best.expect("at least one composition")
}

/// Maps in lexicographic order with the first task fixed to `first`.
fn best_map_with_first(instance: &Instance, first: usize) -> (f64, Vec<usize>) {
    let n = instance.num_workers();
    let m = instance.num_tasks();
    let mut map = vec![0; m];
    map[0] = first;
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let value = defender_value(
            instance,
            &DeterministicAssignment::TaskToWorker(map.clone()),
        );
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, map.clone()));
        }
        // odometer over positions 1..m, last position fastest
        let mut pos = m;
        loop {
            if pos == 1 {
                return best.expect("visited at least one map");
            }
            pos -= 1;
            map[pos] += 1;
            if map[pos] < n {
                break;
            }
            map[pos] = 0;
        }
    }
}

fn best_task_map(instance: &Instance) -> (f64, Vec<usize>) {
    let n = instance.num_workers();
    #[cfg(feature = "parallel")]
    let per_first: Vec<(f64, Vec<usize>)> = (0..n)
        .into_par_iter()
        .map(|w| best_map_with_first(instance, w))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let per_first: Vec<(f64, Vec<usize>)> =
        (0..n).map(|w| best_map_with_first(instance, w)).collect();
    // ordered reduction: earliest first coordinate wins ties
    per_first
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("n ≥ 1")
}

/// Balanced-policy value per unit utility and weights for the worker
/// subset `mask` over sorted proficiencies.
fn balanced_on_subset(p: &[f64], mask: u32) -> (f64, Vec<f64>) {
    let members: Vec<usize> = (0..p.len()).filter(|&w| mask & (1 << w) != 0).collect();
    let v: f64 = members.iter().map(|&w| 1.0 / p[w]).sum();
    let mut weights = vec![0.0; p.len()];
    for &w in &members {
        weights[w] = 1.0 / (p[w] * v);
    }
    ((members.len() - 1) as f64 / v, weights)
}

fn best_subset(p: &[f64]) -> (f64, Vec<f64>) {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1u32 << p.len()) {
        let (value, weights) = balanced_on_subset(p, mask);
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, weights));
        }
    }
    best.expect("n ≥ 1")
}

/// Best balanced policy over every non-empty subset of workers.
pub fn oracle_randomized_subsets(instance: &Instance) -> Result<OracleResult> {
    let n = instance.num_workers();
    if n > MAX_SUBSET_WORKERS {
        return Err(Error::ResourceLimit(format!(
            "{n} workers exceed the subset oracle limit of {MAX_SUBSET_WORKERS}"
        )));
    }
    let (per_unit, weights) = best_subset(instance.proficiencies());
    Ok(OracleResult {
        value: instance.total_utility() * per_unit,
        witness: Witness::Policy(RandomizedPolicy::new(weights)?),
        method: Method::Subsets {
            space: (1u64 << n) - 1,
        },
    })
}

/// Worst-case gap between [`oracle_randomized_grid`] at `step` and the true
/// randomized optimum.
pub fn grid_slack(instance: &Instance, step: f64) -> f64 {
    instance.total_utility() * instance.proficiency(0) * step * instance.num_workers() as f64
}

/// Max over the lattice `{k / N : Σ k = N}` (`N = 1/step`) of the defender
/// value after the attacker's best response.
pub fn oracle_randomized_grid(instance: &Instance, step: f64) -> Result<OracleResult> {
    let n = instance.num_workers();
    if !(1e-4..=1.0).contains(&step) {
        return Err(Error::Parameter(format!(
            "grid step {step} outside [1e-4, 1]"
        )));
    }
    let divisions = (1.0 / step).round();
    if ((divisions * step) - 1.0).abs() > 1e-9 {
        return Err(Error::Parameter(format!(
            "grid step {step} does not divide 1 into a whole number of cells"
        )));
    }
    let divisions = divisions as u64;
    if n > MAX_GRID_WORKERS {
        return Err(Error::ResourceLimit(format!(
            "{n} workers exceed the grid oracle limit of {MAX_GRID_WORKERS}"
        )));
    }
    let space = binomial(divisions + n as u64 - 1, n as u64 - 1);
    if space > MAX_GRID_POINTS {
        return Err(Error::ResourceLimit(format!(
            "{space} grid points exceed the cap of {MAX_GRID_POINTS}"
        )));
    }

    let p = instance.proficiencies();
    let mut ticks = vec![0u64; n];
    let mut best_value = f64::NEG_INFINITY;
    let mut best_ticks = ticks.clone();
    grid_walk(p, 0, divisions, &mut ticks, &mut |ticks| {
        let mut total = 0.0;
        let mut top = 0.0f64;
        for (&k, &pw) in ticks.iter().zip(p) {
            let c = k as f64 * pw;
            total += c;
            top = top.max(c);
        }
        let value = (total - top) / divisions as f64;
        if value > best_value {
            best_value = value;
            best_ticks.copy_from_slice(ticks);
        }
    });
    let weights = best_ticks
        .iter()
        .map(|&k| k as f64 / divisions as f64)
        .collect::<Vec<_>>();
    // lattice weights can miss Σ = 1 by an ulp; renormalize for the witness
    let sum: f64 = weights.iter().sum();
    let weights = weights.into_iter().map(|w| w / sum).collect();
    Ok(OracleResult {
        value: instance.total_utility() * best_value,
        witness: Witness::Policy(RandomizedPolicy::new(weights)?),
        method: Method::SimplexGrid { step, space },
    })
}

fn grid_walk(
    p: &[f64],
    worker: usize,
    left: u64,
    ticks: &mut Vec<u64>,
    visit: &mut impl FnMut(&[u64]),
) {
    if worker + 1 == p.len() {
        ticks[worker] = left;
        visit(ticks);
        return;
    }
    for k in 0..=left {
        ticks[worker] = k;
        grid_walk(p, worker + 1, left - k, ticks, visit);
    }
}
