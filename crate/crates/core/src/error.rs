use thiserror::Error;

use crate::hetero::HetDeterministicSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A solver was handed an instance outside the utility class it handles.
    #[error("mode error: {0}")]
    Mode(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// Branch-and-bound ran out of node budget. Carries the best assignment
    /// found before the search stopped, if any leaf was reached.
    #[error("node budget of {budget} exhausted{}", incumbent_note(.incumbent))]
    NodeBudget {
        budget: u64,
        incumbent: Option<Box<HetDeterministicSolution>>,
    },
}

fn incumbent_note(incumbent: &Option<Box<HetDeterministicSolution>>) -> String {
    match incumbent {
        Some(sol) => format!(" (best incumbent value {})", sol.value),
        None => String::new(),
    }
}

impl Error {
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit(_) | Error::NodeBudget { .. })
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
