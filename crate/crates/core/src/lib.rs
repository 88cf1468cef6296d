//! Path planning for a cooperative navigation aid (CNA) vehicle.
//!
//! A single fast vehicle with a low-drift navigation system (the CNA) must
//! sequentially intercept a set of slower constant-velocity agents and hand
//! each one a single absolute-position fix. Every agent's position variance
//! grows linearly between fixes; the CNA's own variance grows too, unless it
//! pauses to surface for a GPS reset. The planning objective is the
//! time-averaged position variance across all agents over a fixed horizon.
//!
//! The library is organized around that pipeline:
//!
//! - [`kinematics`] — constant-bearing intercept geometry and straight-line
//!   track generation.
//! - [`uncertainty`] — scalar variance recursions, the single-aid cost
//!   `J_i(Z)`, the closed-form optimal time-to-aid, cost bounds, and a full
//!   2x2 matrix Kalman filter used as an independent cross-check.
//! - [`simulator`] — executes a task sequence into a CNA path, aiding events,
//!   variance traces, and the mission cost.
//! - [`planner`] — the greedy heuristic scheduler and the exhaustive
//!   (optimal / worst-case) enumeration baseline.
//! - [`montecarlo`] — seeded, reproducible randomized experiments comparing
//!   the planners across agent-spawn strategies.

pub mod error;
pub mod kinematics;
pub mod montecarlo;
pub mod planner;
pub mod simulator;
pub mod uncertainty;

pub use error::{Error, Result};
pub use kinematics::{AgentSpec, CnaSpec, InterceptSolution, Vec2};
pub use planner::{PlanResult, RewardWeights, Task, TaskSequence};
pub use simulator::{MissionResult, Scenario};
pub use uncertainty::{NoiseParams, VarianceTrace};
