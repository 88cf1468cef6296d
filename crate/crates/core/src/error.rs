//! Error type shared across the library.

use crate::planner::Task;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An intercept is only guaranteed to exist when the pursuer is strictly
    /// faster than the target.
    #[error("CNA speed {cna_speed} must exceed agent speed {agent_speed}")]
    SpeedRatio { cna_speed: f64, agent_speed: f64 },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("aiding step {step} is outside the valid range [{min}, {max}]")]
    AidStepOutOfRange { step: usize, min: usize, max: usize },

    #[error("surfacing at step {start} ends at {end}, past the horizon {horizon}")]
    SurfacingPastHorizon {
        start: usize,
        end: usize,
        horizon: usize,
    },

    /// The closed-form time-to-aid divides by the agent process variance.
    #[error("agent process variance must be positive for the time-to-aid formula")]
    ZeroProcessVariance,

    #[error("scenario has no agents")]
    NoAgents,

    #[error("agent {agent_id} is aided more than once in the schedule")]
    RepeatedAiding { agent_id: usize },

    #[error("duplicate task {task:?} in sequence")]
    DuplicateTask { task: Task },

    #[error("task {task:?} does not exist in a scenario with {agent_count} agents")]
    UnknownTask { task: Task, agent_count: usize },

    /// A task sequence that cannot be completed within the mission time.
    /// `overrun` is the amount (in time units) by which the violating task
    /// would exceed the limit.
    #[error(
        "sequence infeasible at task index {task_index} ({task:?}): overruns the mission time by {overrun} TU"
    )]
    Infeasible {
        task_index: usize,
        task: Task,
        overrun: f64,
    },

    #[error(
        "exhaustive enumeration would evaluate {required} sequences, above the budget of {budget}"
    )]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
