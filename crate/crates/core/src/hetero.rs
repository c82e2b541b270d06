//! Heterogeneous task utilities, one worker per task.
//!
//! The randomized case reduces to the homogeneous balanced-prefix policy
//! scaled by the total utility mass. The deterministic case is strongly
//! NP-hard; [`solve_het_deterministic`] solves the integer program
//!
//! ```text
//! max   Σ_w Σ_t s_wt u_t p_w − γ
//! s.t.  Σ_w s_wt = 1                 for every task t
//!       γ ≥ Σ_t s_wt u_t p_w         for every worker w
//!       s_wt ∈ {0, 1}
//! ```
//!
//! exactly by depth-first branch-and-bound, which is practical for desk-scale
//! instances only.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homo::{balanced_prefix_policy, RandomizedSolution};
use crate::model::{best_response_deterministic, DeterministicAssignment, Instance};

const PRUNE_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BnbConfig {
    /// Search nodes allowed before giving up with [`Error::NodeBudget`].
    pub node_budget: u64,
}

impl Default for BnbConfig {
    fn default() -> Self {
        BnbConfig {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HetDeterministicSolution {
    /// `task_to_worker[t]` is the canonical index of the worker holding `t`.
    pub task_to_worker: Vec<usize>,
    /// Total expected utility minus `gamma`.
    pub value: f64,
    /// Contribution of the attacked (largest-contributing) worker.
    pub gamma: f64,
    /// Search nodes expanded.
    pub nodes: u64,
}

impl HetDeterministicSolution {
    pub fn assignment(&self) -> DeterministicAssignment {
        DeterministicAssignment::TaskToWorker(self.task_to_worker.clone())
    }
}

/// Optimal randomized policy with one worker per task: the homogeneous
/// policy, with value scaled by `U = Σ_t u_t`.
pub fn solve_het_randomized(instance: &Instance) -> RandomizedSolution {
    balanced_prefix_policy(instance)
}

/// Exact optimum of the one-worker-per-task deterministic problem with the
/// default node budget.
pub fn solve_het_deterministic(instance: &Instance) -> Result<HetDeterministicSolution> {
    solve_het_deterministic_with(instance, &BnbConfig::default())
}

/// Exact optimum of the one-worker-per-task deterministic problem.
///
/// Among optimal maps the lexicographically smallest `task_to_worker` is
/// returned. When the node budget runs out the error carries the best
/// assignment seen so far.
pub fn solve_het_deterministic_with(
    instance: &Instance,
    config: &BnbConfig,
) -> Result<HetDeterministicSolution> {
    let mut search = Search::new(instance, config.node_budget);
    search.descend(0, 0.0);

    let nodes = search.nodes;
    let incumbent = search
        .best_map
        .take()
        .map(|map| finish(instance, map, nodes))
        .transpose()?;
    if search.exhausted {
        return Err(Error::NodeBudget {
            budget: config.node_budget,
            incumbent: incumbent.map(Box::new),
        });
    }
    Ok(incumbent.expect("a complete search reaches at least one leaf"))
}

fn finish(instance: &Instance, map: Vec<usize>, nodes: u64) -> Result<HetDeterministicSolution> {
    let assignment = DeterministicAssignment::TaskToWorker(map);
    let response = best_response_deterministic(instance, &assignment)?;
    let DeterministicAssignment::TaskToWorker(task_to_worker) = assignment else {
        unreachable!("constructed as a task map above")
    };
    Ok(HetDeterministicSolution {
        task_to_worker,
        value: response.defender_value,
        gamma: response.attacker_value,
        nodes,
    })
}

struct Search<'a> {
    proficiencies: &'a [f64],
    /// Task indices by decreasing utility.
    task_order: Vec<usize>,
    /// Utilities in branching order.
    utilities: Vec<f64>,
    /// `remaining[d]` = utility mass of tasks at depth `d..`.
    remaining: Vec<f64>,
    /// Expected contribution of each worker so far.
    loads: Vec<f64>,
    /// Worker chosen at each depth.
    chosen: Vec<usize>,
    /// Per-depth child buffers.
    scratch: Vec<Vec<(f64, usize)>>,
    best_value: f64,
    best_map: Option<Vec<usize>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a> Search<'a> {
    fn new(instance: &'a Instance, budget: u64) -> Self {
        let u = instance.task_utilities();
        let m = u.len();
        let mut task_order: Vec<usize> = (0..m).collect();
        task_order.sort_by(|&a, &b| u[b].total_cmp(&u[a]));
        let utilities: Vec<f64> = task_order.iter().map(|&t| u[t]).collect();
        let mut remaining = vec![0.0; m + 1];
        for d in (0..m).rev() {
            remaining[d] = remaining[d + 1] + utilities[d];
        }
        Search {
            proficiencies: instance.proficiencies(),
            task_order,
            utilities,
            remaining,
            loads: vec![0.0; instance.num_workers()],
            chosen: vec![0; m],
            scratch: vec![Vec::new(); m],
            best_value: f64::NEG_INFINITY,
            best_map: None,
            nodes: 0,
            budget,
            exhausted: false,
        }
    }

    /// Admissible bound on the final value from the current partial
    /// assignment: the optimum when the remaining utility mass may be split
    /// fractionally across workers.
    ///
    /// For a cap `γ` on the final maximum load, the best split pours mass
    /// into workers in proficiency order up to `γ`, which gives
    /// `f(γ) = total + G(γ) − γ` with `G` concave. `f` is piecewise linear,
    /// so its maximum sits either at a cap `γ_q` where the top `q` workers
    /// exactly absorb the remaining mass (then `f = total + (q−1)γ_q −
    /// Σ_{w≤q} load_w`) or at the lowest admissible cap. The lowest cap is
    /// the current maximum load, raised to the cheapest placement of the
    /// next task, which must land whole on some worker.
    fn bound(&self, depth: usize, total: f64, max_load: f64) -> f64 {
        let rest = self.remaining[depth];
        if rest == 0.0 {
            return total - max_load;
        }
        let p = self.proficiencies;
        let next = self.utilities[depth];
        let floor = self
            .loads
            .iter()
            .zip(p)
            .map(|(&l, &pw)| l + pw * next)
            .fold(f64::INFINITY, f64::min)
            .max(max_load);

        let mut best = f64::NEG_INFINITY;
        let mut inv = 0.0;
        let mut weighted = 0.0;
        let mut loads = 0.0;
        let mut floor_inside = false;
        for (q, (&l, &pw)) in self.loads.iter().zip(p).enumerate() {
            inv += 1.0 / pw;
            weighted += l / pw;
            loads += l;
            let cap = (rest + weighted) / inv;
            if cap >= floor {
                best = best.max(total + q as f64 * cap - loads);
            } else {
                floor_inside = true;
            }
        }
        if floor_inside {
            if let Some(gain) = self.fill(floor, rest) {
                best = best.max(total + gain - floor);
            }
        }
        // slack for rounding in the candidate caps
        best + 1e-9 * (1.0 + best.abs())
    }

    /// Expected utility from pouring `mass` into workers in proficiency
    /// order without any load exceeding `cap`; `None` if it does not fit.
    fn fill(&self, cap: f64, mass: f64) -> Option<f64> {
        let mut left = mass;
        let mut gain = 0.0;
        for (&load, &p) in self.loads.iter().zip(self.proficiencies) {
            let take = ((cap - load) / p).max(0.0).min(left);
            gain += take * p;
            left -= take;
            if left <= 0.0 {
                return Some(gain);
            }
        }
        (left <= 1e-12 * mass).then_some(gain)
    }

    /// Expands the node at `depth`; the caller has already checked its
    /// bound against the incumbent.
    fn descend(&mut self, depth: usize, total: f64) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if depth == self.chosen.len() {
            let max_load = self.loads.iter().copied().fold(0.0, f64::max);
            self.offer(total - max_load);
            return;
        }

        let u = self.utilities[depth];
        let parent_max = self.loads.iter().copied().fold(0.0, f64::max);
        let mut children = std::mem::take(&mut self.scratch[depth]);
        children.clear();
        for w in 0..self.loads.len() {
            let old = self.loads[w];
            let gain = u * self.proficiencies[w];
            self.loads[w] = old + gain;
            let max_load = parent_max.max(old + gain);
            let bound = self.bound(depth + 1, total + gain, max_load);
            self.loads[w] = old;
            if bound >= self.best_value - PRUNE_TOLERANCE {
                children.push((bound, w));
            }
        }
        // most promising child first
        children.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(Ordering::Equal)
                .then(a.1.cmp(&b.1))
        });
        for &(bound, w) in &children {
            if bound < self.best_value - PRUNE_TOLERANCE {
                continue;
            }
            let old = self.loads[w];
            let gain = u * self.proficiencies[w];
            self.loads[w] = old + gain;
            self.chosen[depth] = w;
            self.descend(depth + 1, total + gain);
            self.loads[w] = old;
            if self.exhausted {
                break;
            }
        }
        self.scratch[depth] = children;
    }

    fn offer(&mut self, value: f64) {
        if value < self.best_value - PRUNE_TOLERANCE {
            return;
        }
        let mut map = vec![0; self.chosen.len()];
        for (&task, &w) in self.task_order.iter().zip(&self.chosen) {
            map[task] = w;
        }
        let better = value > self.best_value + PRUNE_TOLERANCE;
        let tie_but_smaller = self.best_map.as_ref().is_none_or(|b| map < *b);
        if better || tie_but_smaller {
            self.best_value = self.best_value.max(value);
            self.best_map = Some(map);
        }
    }
}
