//! Task allocation against an adversary who disables exactly one worker.
//!
//! A defender assigns tasks to workers of known proficiency. After the
//! assignment is committed an attacker removes one worker, and the defender
//! keeps the expected utility of the tasks held by the remaining workers.
//! The crate computes the defender's optimal commitment for two attacker
//! models:
//!
//! * the attacker sees only the (possibly randomized) policy: see
//!   [`homo::solve_randomized`] and [`hetero::solve_het_randomized`];
//! * the attacker sees the realized assignment: see
//!   [`homo::solve_deterministic`] and [`hetero::solve_het_deterministic`].
//!
//! Every solver is cross-checked by the brute-force searches in [`oracles`],
//! and [`experiments`] runs the seeded randomized-vs-deterministic
//! comparison sweeps.

pub mod error;
pub mod experiments;
pub mod hetero;
pub mod homo;
pub mod model;
pub mod oracles;
mod stats;

pub use error::{Error, Result};
pub use hetero::{
    solve_het_deterministic, solve_het_randomized, BnbConfig, HetDeterministicSolution,
};
pub use homo::{solve_deterministic, solve_randomized, DeterministicSolution, RandomizedSolution};
pub use model::{
    best_response_deterministic, best_response_randomized, deterministic_contributions,
    evaluate_deterministic, evaluate_randomized, randomized_contributions, AttackResponse,
    DeterministicAssignment, Instance, RandomizedPolicy,
};

/// Absolute tolerance used when comparing utilities and probabilities
/// against bounds.
pub const TOLERANCE: f64 = 1e-9;
