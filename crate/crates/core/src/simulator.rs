//! Executes a task sequence into a CNA path, aiding events, variance traces
//! and the mission cost.
//!
//! Tasks are processed in order. An agent task solves the intercept from the
//! CNA's current position against the agent's current nominal position,
//! advances the CNA along the intercept heading, and lands it exactly on the
//! agent at the discretized arrival step (the final motion step is shortened;
//! the speed bound is an inequality). A surfacing task holds the CNA in place
//! for the surfacing duration and resets its variance. After the last task
//! the CNA holds position through the end of the horizon.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kinematics::{discretize_arrival, solve_intercept, AgentSpec, CnaSpec, Vec2};
use crate::planner::{Task, TaskSequence};
use crate::uncertainty::{
    agent_variance_trace, cna_variance_at, cna_variance_trace, max_cost, posterior_variance,
    NoiseParams, VarianceTrace,
};

/// A complete planning problem: the agents, the aid vehicle, the noise model
/// and the mission limits.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub agents: Vec<AgentSpec>,
    pub cna: CnaSpec,
    pub noise: NoiseParams,
    /// Number of discrete steps in the mission; traces span `0..=horizon`.
    pub horizon: usize,
    /// Mission time limit in TU; equals `horizon * noise.dt`.
    pub time_limit: f64,
    /// Maximum task-sequence length, at most `agents.len() + 1`.
    pub max_tasks: usize,
}

impl Scenario {
    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agent_by_id(&self, id: usize) -> Option<&AgentSpec> {
        self.agents.iter().find(|a| a.id == id)
    }

    pub fn validate(&self) -> Result<()> {
        if self.agents.is_empty() {
            return Err(Error::NoAgents);
        }
        self.noise.validate()?;
        if !self.cna.start.is_finite() || !self.cna.speed.is_finite() {
            return Err(Error::NonFinite {
                context: "CNA spec",
            });
        }
        let n = self.agents.len();
        let mut ids: Vec<usize> = self.agents.iter().map(|a| a.id).collect();
        ids.sort_unstable();
        if ids != (1..=n).collect::<Vec<_>>() {
            return Err(Error::InvalidScenario(format!(
                "agent ids must be exactly 1..={n}, got {ids:?}"
            )));
        }
        for agent in &self.agents {
            if !agent.start.is_finite()
                || !agent.heading.is_finite()
                || !agent.speed.is_finite()
                || !agent.initial_variance.is_finite()
            {
                return Err(Error::NonFinite {
                    context: "agent spec",
                });
            }
            if agent.speed <= 0.0 {
                return Err(Error::InvalidScenario(format!(
                    "agent {} speed must be positive, got {}",
                    agent.id, agent.speed
                )));
            }
            if agent.initial_variance < 0.0 {
                return Err(Error::InvalidScenario(format!(
                    "agent {} initial variance must be non-negative, got {}",
                    agent.id, agent.initial_variance
                )));
            }
            if self.cna.speed <= agent.speed {
                return Err(Error::SpeedRatio {
                    cna_speed: self.cna.speed,
                    agent_speed: agent.speed,
                });
            }
        }
        if self.max_tasks > n + 1 {
            return Err(Error::InvalidScenario(format!(
                "max task count {} exceeds N+1 = {}",
                self.max_tasks,
                n + 1
            )));
        }
        let expected = self.horizon as f64 * self.noise.dt;
        if (expected - self.time_limit).abs() > 1e-9 * expected.abs().max(1.0) {
            return Err(Error::InvalidScenario(format!(
                "horizon * dt = {expected} must equal the time limit {}",
                self.time_limit
            )));
        }
        Ok(())
    }
}

/// One motion segment of the CNA path.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Leg {
    /// Full-speed travel along a fixed heading, landing exactly on `arrival`
    /// at `end_step`.
    Transit {
        start_step: usize,
        end_step: usize,
        from: Vec2,
        heading: f64,
        arrival: Vec2,
    },
    /// Stationary surfacing window.
    Hold {
        start_step: usize,
        end_step: usize,
        position: Vec2,
    },
}

/// Realized schedule of a task sequence: who gets aided when, where the CNA
/// goes, and when the mission's last task completes.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Timeline {
    /// `(agent id, aiding step)` in task order.
    pub aidings: Vec<(usize, usize)>,
    pub surfacing_start: Option<usize>,
    pub end_step: usize,
    pub end_pos: Vec2,
    pub legs: Vec<Leg>,
}

/// Resolve a task sequence into a timeline, checking time feasibility.
pub(crate) fn execute_sequence(scenario: &Scenario, sequence: &TaskSequence) -> Result<Timeline> {
    let dt = scenario.noise.dt;
    let mut pos = scenario.cna.start;
    let mut step = 0usize;
    let mut legs = Vec::with_capacity(sequence.len());
    let mut aidings = Vec::new();
    let mut surfacing_start = None;

    for (task_index, &task) in sequence.tasks().iter().enumerate() {
        match task {
            Task::Aid(id) => {
                let agent = scenario.agent_by_id(id).ok_or(Error::UnknownTask {
                    task,
                    agent_count: scenario.agent_count(),
                })?;
                let sol = solve_intercept(
                    pos,
                    scenario.cna.speed,
                    agent.position_at(step, dt),
                    agent.heading,
                    agent.speed,
                )?;
                let arrival_step = discretize_arrival(sol.tau, step, dt);
                if arrival_step > scenario.horizon {
                    return Err(Error::Infeasible {
                        task_index,
                        task,
                        overrun: arrival_step as f64 * dt - scenario.time_limit,
                    });
                }
                let arrival = agent.position_at(arrival_step, dt);
                legs.push(Leg::Transit {
                    start_step: step,
                    end_step: arrival_step,
                    from: pos,
                    heading: sol.heading,
                    arrival,
                });
                aidings.push((id, arrival_step));
                pos = arrival;
                step = arrival_step;
            }
            Task::Surface => {
                let end = step + scenario.noise.surface_steps;
                if end > scenario.horizon {
                    return Err(Error::Infeasible {
                        task_index,
                        task,
                        overrun: end as f64 * dt - scenario.time_limit,
                    });
                }
                legs.push(Leg::Hold {
                    start_step: step,
                    end_step: end,
                    position: pos,
                });
                surfacing_start = Some(step);
                step = end;
            }
        }
    }

    Ok(Timeline {
        aidings,
        surfacing_start,
        end_step: step,
        end_pos: pos,
        legs,
    })
}

/// Closed-form mission cost of a timeline: the mean over agents of the
/// single-aid cost (or the no-aid maximum for agents never reached).
/// Returns `(J', per-agent costs in scenario order)`.
pub(crate) fn closed_form_cost(scenario: &Scenario, timeline: &Timeline) -> (f64, Vec<f64>) {
    let noise = &scenario.noise;
    let per_agent: Vec<f64> = scenario
        .agents
        .iter()
        .map(|agent| {
            match timeline.aidings.iter().find(|(id, _)| *id == agent.id) {
                Some(&(_, z)) => {
                    let nu_cna = cna_variance_at(timeline.surfacing_start, noise, z);
                    crate::uncertainty::agent_cost_at(
                        agent.initial_variance,
                        z,
                        nu_cna,
                        noise,
                        scenario.horizon,
                    )
                }
                None => max_cost(agent.initial_variance, noise, scenario.horizon),
            }
        })
        .collect();
    let cost = per_agent.iter().sum::<f64>() / per_agent.len() as f64;
    (cost, per_agent)
}

/// Everything a mission run produces: the CNA path, the variance traces, the
/// aiding schedule and the cost.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionResult {
    /// CNA positions, one per step `0..=horizon`.
    pub cna_path: Vec<Vec2>,
    /// Agent variance traces in scenario order.
    pub agent_traces: Vec<VarianceTrace>,
    pub cna_trace: VarianceTrace,
    /// Agent id -> aiding step.
    pub aiding_steps: BTreeMap<usize, usize>,
    pub surfacing_step: Option<usize>,
    /// Step at which the final task completed.
    pub completion_step: usize,
    /// Per-agent time-averaged variance, scenario order.
    pub per_agent_costs: Vec<f64>,
    /// Mission cost J': mean scalar variance across agents and steps.
    pub cost: f64,
    /// Trace-form cost J = 2 J' (the covariance-trace average).
    pub cost_j: f64,
}

/// Run a task sequence to completion and assemble the full mission record.
pub fn run_mission(scenario: &Scenario, sequence: &TaskSequence) -> Result<MissionResult> {
    scenario.validate()?;
    let timeline = execute_sequence(scenario, sequence)?;
    Ok(materialize(scenario, &timeline))
}

/// Build the full mission record from a resolved timeline.
pub(crate) fn materialize(scenario: &Scenario, timeline: &Timeline) -> MissionResult {
    let noise = &scenario.noise;
    let horizon = scenario.horizon;

    let cna_path = build_path(scenario, timeline);
    let cna_trace = cna_variance_trace(timeline.surfacing_start, noise, horizon)
        .expect("surfacing feasibility checked during execution");

    let agent_traces: Vec<VarianceTrace> = scenario
        .agents
        .iter()
        .map(|agent| {
            let aiding = timeline
                .aidings
                .iter()
                .find(|(id, _)| *id == agent.id)
                .map(|&(_, z)| {
                    let nu_cna = cna_variance_at(timeline.surfacing_start, noise, z);
                    let prior = agent.initial_variance + z as f64 * noise.agent_process_var;
                    (z, posterior_variance(prior, noise.measurement_var, nu_cna))
                });
            agent_variance_trace(agent.initial_variance, aiding, noise, horizon)
                .expect("aiding step bounded by the horizon")
        })
        .collect();

    let per_agent_costs: Vec<f64> = agent_traces.iter().map(VarianceTrace::mean).collect();
    let cost = per_agent_costs.iter().sum::<f64>() / per_agent_costs.len() as f64;

    MissionResult {
        cna_path,
        agent_traces,
        cna_trace,
        aiding_steps: timeline.aidings.iter().copied().collect(),
        surfacing_step: timeline.surfacing_start,
        completion_step: timeline.end_step,
        per_agent_costs,
        cost,
        cost_j: 2.0 * cost,
    }
}

/// Time-averaged variance recomputed from the assembled traces.
pub fn mission_cost(result: &MissionResult) -> f64 {
    result
        .agent_traces
        .iter()
        .map(VarianceTrace::mean)
        .sum::<f64>()
        / result.agent_traces.len() as f64
}

fn build_path(scenario: &Scenario, timeline: &Timeline) -> Vec<Vec2> {
    let dt = scenario.noise.dt;
    let speed = scenario.cna.speed;
    let mut path = Vec::with_capacity(scenario.horizon + 1);
    path.push(scenario.cna.start);

    for leg in &timeline.legs {
        match *leg {
            Leg::Transit {
                start_step,
                end_step,
                from,
                heading,
                arrival,
            } => {
                // Full-speed steps along the intercept heading; the last step
                // lands exactly on the agent.
                let dir = Vec2::from_angle(heading);
                for j in start_step + 1..end_step {
                    path.push(from + dir * (speed * dt * (j - start_step) as f64));
                }
                if end_step > start_step {
                    path.push(arrival);
                }
            }
            Leg::Hold {
                start_step,
                end_step,
                position,
            } => {
                for _ in start_step + 1..=end_step {
                    path.push(position);
                }
            }
        }
    }

    while path.len() <= scenario.horizon {
        path.push(timeline.end_pos);
    }
    path
}
