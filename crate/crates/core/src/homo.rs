//! Optimal policies when every task carries the same utility.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    best_response_deterministic, DeterministicAssignment, Instance, RandomizedPolicy,
};

/// Optimal policy against an attacker who only observes the policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomizedSolution {
    pub policy: RandomizedPolicy,
    /// Size of the support; the support is always the `k_star` most
    /// proficient workers.
    pub k_star: usize,
    /// Defender's expected utility after the attacker's best response.
    pub value: f64,
}

/// Optimal count vector against an attacker who observes the assignment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterministicSolution {
    pub counts: Vec<usize>,
    /// Defender utility after the attacker's best response.
    pub value: f64,
    /// Worker the construction expects to be attacked.
    pub intended_target: usize,
}

impl DeterministicSolution {
    pub fn assignment(&self) -> DeterministicAssignment {
        DeterministicAssignment::Counts(self.counts.clone())
    }
}

fn require_homogeneous(instance: &Instance) -> Result<f64> {
    instance.unit_utility().ok_or_else(|| {
        Error::Mode(
            "task utilities differ; use the heterogeneous solvers (solve-het-det / \
             solve_het_randomized) for this instance"
                .into(),
        )
    })
}

/// Balanced policy over the best prefix of the proficiency ranking.
///
/// For a support of the `k` most proficient workers the attacker is made
/// indifferent by `λ_i = 1 / (p_i v_k)` with `v_k = Σ_{j≤k} 1/p_j`, which
/// retains `(k − 1) / v_k` per unit of utility. Only proficiencies matter,
/// so the same policy is optimal for any utility vector once one worker
/// holds each task.
pub(crate) fn balanced_prefix_policy(instance: &Instance) -> RandomizedSolution {
    let (k_star, weights, per_unit) = balanced_prefix(instance.proficiencies());
    RandomizedSolution {
        policy: RandomizedPolicy::new(weights)
            .expect("balanced weights sum to one by construction"),
        k_star,
        value: instance.total_utility() * per_unit,
    }
}

/// `(k*, weights, value per unit utility)` for proficiencies sorted in
/// non-increasing order.
fn balanced_prefix(p: &[f64]) -> (usize, Vec<f64>, f64) {
    let n = p.len();
    let mut best_per_unit = 0.0;
    let mut k_star = 1;
    let mut v_star = 1.0 / p[0];
    let mut v = 1.0 / p[0];
    for (k, &pk) in (2..=n).zip(&p[1..]) {
        v += 1.0 / pk;
        let per_unit = (k - 1) as f64 / v;
        if per_unit > best_per_unit {
            best_per_unit = per_unit;
            k_star = k;
            v_star = v;
        }
    }
    let mut weights = vec![0.0; n];
    for (w, &pw) in weights.iter_mut().zip(p).take(k_star) {
        *w = 1.0 / (pw * v_star);
    }
    (k_star, weights, best_per_unit)
}

/// Optimal randomized policy for a homogeneous instance, in linear time.
pub fn solve_randomized(instance: &Instance) -> Result<RandomizedSolution> {
    require_homogeneous(instance)?;
    Ok(balanced_prefix_policy(instance))
}

/// Largest `c` with `p_j c ≤ p_i s_i`, tolerant to rounding in the ratio.
fn cap(p_i: f64, s_i: usize, p_j: f64) -> usize {
    let budget = p_i * s_i as f64;
    let mut c = (budget / p_j).floor() as usize;
    if (c + 1) as f64 * p_j <= budget * (1.0 + 1e-12) {
        c += 1;
    } else if c > 0 && c as f64 * p_j > budget * (1.0 + 1e-12) {
        c -= 1;
    }
    c
}

/// Optimal deterministic counts for a homogeneous instance in `O(n² m)`.
///
/// Each worker `i` is tried as the attacker's target holding `s_i` tasks.
/// The remaining budget is then poured into the other workers in
/// proficiency order, each capped so it never out-contributes `i`.
pub fn solve_deterministic(instance: &Instance) -> Result<DeterministicSolution> {
    require_homogeneous(instance)?;
    let p = instance.proficiencies();
    let n = p.len();
    let m = instance.num_tasks();
    if n == 1 {
        return Ok(DeterministicSolution {
            counts: vec![m],
            value: 0.0,
            intended_target: 0,
        });
    }

    let mut best: Option<(f64, Vec<usize>, usize)> = None;
    let mut counts = vec![0usize; n];
    for i in 0..n {
        for s_i in 1..=m {
            counts.iter_mut().for_each(|c| *c = 0);
            counts[i] = s_i;
            let mut util = 0.0;
            let mut budget = m - s_i;
            for j in (0..n).filter(|&j| j != i) {
                if budget == 0 {
                    break;
                }
                let s_j = cap(p[i], s_i, p[j]).min(budget);
                counts[j] = s_j;
                util += s_j as f64 * p[j];
                budget -= s_j;
            }
            if best.as_ref().is_none_or(|(b, _, _)| util > *b) {
                best = Some((util, counts.clone(), i));
            }
        }
    }
    let (_, counts, intended_target) = best.expect("m ≥ 1 yields at least one candidate");
    let mut solution = DeterministicSolution {
        counts,
        value: 0.0,
        intended_target,
    };
    // report the value the attacker actually leaves, not the fill estimate
    solution.value = best_response_deterministic(instance, &solution.assignment())?.defender_value;
    Ok(solution)
}
