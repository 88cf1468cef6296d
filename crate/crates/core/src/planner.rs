//! Task-sequence planners for the CNA.
//!
//! Two planners share one evaluation model. The greedy planner builds a
//! sequence one agent at a time, scoring each candidate with a three-term
//! reward (relative cost reduction, sub-optimality of the aiding time, and
//! normalized transit time), then decides where a surfacing task pays off in
//! a post-pass. The exhaustive planner enumerates every feasible sequence of
//! unique tasks up to the length cap, pruning any prefix that runs out of
//! mission time, and reports both the cheapest and the most expensive
//! feasible sequence.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kinematics::{discretize_arrival, solve_intercept, Vec2};
use crate::simulator::{
    closed_form_cost, execute_sequence, materialize, MissionResult, Scenario,
};
use crate::uncertainty::{cna_variance_at, max_cost, min_cost_remaining};

/// Default cap on the number of sequences the exhaustive planner may
/// enumerate in one call.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 2_000_000;

/// One mission task: either surface for a GPS fix or aid a specific agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    Surface,
    Aid(usize),
}

impl Task {
    /// Wire encoding: 0 surfaces, a positive id aids that agent.
    pub fn id(self) -> usize {
        match self {
            Task::Surface => 0,
            Task::Aid(id) => id,
        }
    }

    pub fn from_id(id: usize) -> Task {
        if id == 0 {
            Task::Surface
        } else {
            Task::Aid(id)
        }
    }

    pub fn is_aid(self) -> bool {
        matches!(self, Task::Aid(_))
    }
}

/// An ordered, duplicate-free list of tasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSequence {
    tasks: Vec<Task>,
}

impl TaskSequence {
    pub fn empty() -> Self {
        TaskSequence { tasks: Vec::new() }
    }

    pub fn new(tasks: Vec<Task>) -> Result<Self> {
        for (i, task) in tasks.iter().enumerate() {
            if tasks[..i].contains(task) {
                return Err(Error::DuplicateTask { task: *task });
            }
        }
        Ok(TaskSequence { tasks })
    }

    pub fn from_ids(ids: &[usize]) -> Result<Self> {
        Self::new(ids.iter().map(|&id| Task::from_id(id)).collect())
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn ids(&self) -> Vec<usize> {
        self.tasks.iter().map(|t| t.id()).collect()
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    /// Number of agent-aiding tasks in the sequence.
    pub fn aid_count(&self) -> usize {
        self.tasks.iter().filter(|t| t.is_aid()).count()
    }
}

/// Weights of the greedy reward terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardWeights {
    /// Weight on the relative cost reduction.
    pub alpha: f64,
    /// Weight on the sub-optimality-of-timing penalty.
    pub beta: f64,
    /// Weight on the normalized transit time penalty.
    pub gamma: f64,
}

impl RewardWeights {
    pub const G1: RewardWeights = RewardWeights {
        alpha: 1.0,
        beta: 0.0,
        gamma: 0.0,
    };
    pub const G2: RewardWeights = RewardWeights {
        alpha: 0.0,
        beta: 1.0,
        gamma: 0.0,
    };
    pub const G3: RewardWeights = RewardWeights {
        alpha: 0.0,
        beta: 0.0,
        gamma: 1.0,
    };
    pub const G4: RewardWeights = RewardWeights {
        alpha: 1.0,
        beta: 0.5,
        gamma: 0.5,
    };

    pub fn preset(name: &str) -> Option<RewardWeights> {
        match name {
            "G1" | "g1" => Some(Self::G1),
            "G2" | "g2" => Some(Self::G2),
            "G3" | "g3" => Some(Self::G3),
            "G4" | "g4" => Some(Self::G4),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.beta, self.gamma];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig(
                "reward weights must be finite and non-negative".into(),
            ));
        }
        if all.iter().all(|w| *w == 0.0) {
            return Err(Error::InvalidConfig(
                "at least one reward weight must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A planned sequence with its realized schedule and cost.
///
/// `cost` is the planner's objective: the closed-form mission cost J'. The
/// embedded [`MissionResult`] re-derives the same number from the full
/// variance traces; the two agree to floating-point association error.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub sequence: TaskSequence,
    /// Mission cost J' (mean scalar variance).
    pub cost: f64,
    /// Trace-form cost J = 2 J'.
    pub cost_j: f64,
    /// Per-agent costs in scenario order.
    pub per_agent_costs: Vec<f64>,
    /// Agent id -> aiding step.
    pub aiding_steps: BTreeMap<usize, usize>,
    pub surfacing_step: Option<usize>,
    /// Time at which the last task completes, in TU.
    pub completion_time: f64,
    pub mission: MissionResult,
}

fn plan_from_sequence(scenario: &Scenario, sequence: TaskSequence) -> Result<PlanResult> {
    let timeline = execute_sequence(scenario, &sequence)?;
    let (cost, per_agent_costs) = closed_form_cost(scenario, &timeline);
    let mission = materialize(scenario, &timeline);
    Ok(PlanResult {
        sequence,
        cost,
        cost_j: 2.0 * cost,
        per_agent_costs,
        aiding_steps: timeline.aidings.iter().copied().collect(),
        surfacing_step: timeline.surfacing_start,
        completion_time: timeline.end_step as f64 * scenario.noise.dt,
        mission,
    })
}

/// Deterministically evaluate a given sequence against a scenario.
///
/// Every intercept is re-solved from the CNA's post-task position and time,
/// so insertions or replacements elsewhere in the sequence are fully
/// reflected. An over-time sequence comes back as [`Error::Infeasible`] with
/// the violating task index.
pub fn evaluate_sequence(scenario: &Scenario, sequence: &TaskSequence) -> Result<PlanResult> {
    scenario.validate()?;
    plan_from_sequence(scenario, sequence.clone())
}

/// CNA state threaded through candidate evaluation.
#[derive(Debug, Clone, Copy)]
struct CnaState {
    pos: Vec2,
    step: usize,
    surfacing_start: Option<usize>,
}

/// Outcome of aiding one agent next, from a given CNA state.
#[derive(Debug, Clone, Copy)]
struct AidOutcome {
    arrival_step: usize,
    arrival_pos: Vec2,
    tau: f64,
    /// Closed-form J_i if the agent is aided at `arrival_step`.
    cost: f64,
}

fn try_aid(scenario: &Scenario, state: &CnaState, agent_idx: usize) -> Option<AidOutcome> {
    let agent = &scenario.agents[agent_idx];
    let dt = scenario.noise.dt;
    let sol = solve_intercept(
        state.pos,
        scenario.cna.speed,
        agent.position_at(state.step, dt),
        agent.heading,
        agent.speed,
    )
    .ok()?;
    let arrival_step = discretize_arrival(sol.tau, state.step, dt);
    if arrival_step > scenario.horizon {
        return None;
    }
    let nu_cna = cna_variance_at(state.surfacing_start, &scenario.noise, arrival_step);
    let cost = crate::uncertainty::agent_cost_at(
        agent.initial_variance,
        arrival_step,
        nu_cna,
        &scenario.noise,
        scenario.horizon,
    );
    Some(AidOutcome {
        arrival_step,
        arrival_pos: agent.position_at(arrival_step, dt),
        tau: sol.tau,
        cost,
    })
}

/// Greedy sequential scheduler.
///
/// Repeatedly scores every unvisited, still-reachable agent with the reward
/// `alpha * d_max - beta * d_opt - gamma * tau / T_max` and commits the
/// argmax (ties to the lowest agent id), where `d_max` is the relative cost
/// reduction against the never-aided cost and `d_opt` the relative excess of
/// the candidate cost over the best still-achievable cost. Agents that can
/// no longer be reached within the horizon drop out of the candidate set.
/// Afterwards a surfacing task is placed by trying every insertion position
/// (when the length cap leaves room for all agents plus one task) or every
/// single-task replacement (when it does not), keeping the no-surfacing
/// sequence when nothing beats it on fully simulated cost.
pub fn greedy_plan(
    scenario: &Scenario,
    weights: &RewardWeights,
    max_tasks: usize,
) -> Result<PlanResult> {
    scenario.validate()?;
    weights.validate()?;
    let n = scenario.agent_count();
    if max_tasks > n + 1 {
        return Err(Error::InvalidConfig(format!(
            "max task count {max_tasks} exceeds N+1 = {}",
            n + 1
        )));
    }

    let jmax: Vec<f64> = scenario
        .agents
        .iter()
        .map(|a| max_cost(a.initial_variance, &scenario.noise, scenario.horizon))
        .collect();

    // Candidate agent indices ordered by id so reward ties resolve to the
    // lowest id.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| scenario.agents[i].id);

    let mut candidates = order;
    let mut chosen: Vec<Task> = Vec::new();
    let mut state = CnaState {
        pos: scenario.cna.start,
        step: 0,
        surfacing_start: None,
    };

    while chosen.len() < max_tasks.min(n) && !candidates.is_empty() {
        let mut reachable: Vec<(usize, AidOutcome)> = Vec::with_capacity(candidates.len());
        let mut best: Option<(f64, usize)> = None; // (reward, index into reachable)

        for &agent_idx in &candidates {
            let Some(outcome) = try_aid(scenario, &state, agent_idx) else {
                continue; // unreachable within the horizon; drops out of C
            };
            let agent = &scenario.agents[agent_idx];
            let d_max = if jmax[agent_idx] > 0.0 {
                (jmax[agent_idx] - outcome.cost) / jmax[agent_idx]
            } else {
                0.0
            };
            let best_remaining = min_cost_remaining(
                agent.initial_variance,
                state.step,
                &scenario.noise,
                scenario.horizon,
            );
            let d_opt = if outcome.cost > 0.0 {
                (outcome.cost - best_remaining) / outcome.cost
            } else {
                0.0
            };
            let transit = if scenario.time_limit > 0.0 {
                outcome.tau / scenario.time_limit
            } else {
                0.0
            };
            let reward = weights.alpha * d_max - weights.beta * d_opt - weights.gamma * transit;

            reachable.push((agent_idx, outcome));
            let slot = reachable.len() - 1;
            if best.is_none_or(|(r, _)| reward > r) {
                best = Some((reward, slot));
            }
        }

        let Some((_, slot)) = best else {
            break; // nothing reachable any more
        };
        let (agent_idx, outcome) = reachable[slot];
        chosen.push(Task::Aid(scenario.agents[agent_idx].id));
        state.pos = outcome.arrival_pos;
        state.step = outcome.arrival_step;
        candidates = reachable
            .iter()
            .map(|&(idx, _)| idx)
            .filter(|&idx| idx != agent_idx)
            .collect();
    }

    // Surfacing post-pass: insertion when the cap leaves a free slot,
    // otherwise single-task replacement; the no-surfacing sequence always
    // competes.
    let mut variants: Vec<Vec<Task>> = vec![chosen.clone()];
    if max_tasks == n + 1 {
        for pos in 0..=chosen.len() {
            let mut v = chosen.clone();
            v.insert(pos, Task::Surface);
            variants.push(v);
        }
    } else {
        for pos in 0..chosen.len() {
            let mut v = chosen.clone();
            v[pos] = Task::Surface;
            variants.push(v);
        }
    }

    let mut winner: Option<(f64, Vec<Task>)> = None;
    for tasks in variants {
        let seq = TaskSequence { tasks };
        let Ok(timeline) = execute_sequence(scenario, &seq) else {
            continue; // the modification pushed some task past the horizon
        };
        let (cost, _) = closed_form_cost(scenario, &timeline);
        if winner.as_ref().is_none_or(|(best, _)| cost < *best) {
            winner = Some((cost, seq.tasks));
        }
    }
    let (_, tasks) = winner.expect("the greedy-built sequence is feasible by construction");

    plan_from_sequence(scenario, TaskSequence { tasks })
}

/// Number of ordered, duplicate-free selections of length `0..=max_len` from
/// an alphabet of `alphabet` tasks. Saturates on overflow.
fn enumeration_size(alphabet: usize, max_len: usize) -> u128 {
    let mut total: u128 = 0;
    let mut perms: u128 = 1;
    for len in 0..=max_len.min(alphabet) {
        if len > 0 {
            perms = perms.saturating_mul((alphabet - len + 1) as u128);
        }
        total = total.saturating_add(perms);
    }
    total
}

/// A candidate sequence with its cost. Min/max folds over candidates use a
/// total order (cost, then lexicographic task ids), so the reduction is
/// associative and independent of evaluation order.
#[derive(Debug, Clone, PartialEq)]
struct Candidate {
    cost: f64,
    ids: Vec<usize>,
}

impl Candidate {
    fn beats_as_min(&self, other: &Candidate) -> bool {
        self.cost < other.cost || (self.cost == other.cost && self.ids < other.ids)
    }

    fn beats_as_max(&self, other: &Candidate) -> bool {
        self.cost > other.cost || (self.cost == other.cost && self.ids < other.ids)
    }
}

/// Running cheapest/most-expensive candidates of one search branch.
struct Extremes {
    best: Candidate,
    worst: Candidate,
}

impl Extremes {
    fn seeded(candidate: Candidate) -> Self {
        Extremes {
            best: candidate.clone(),
            worst: candidate,
        }
    }

    fn offer(&mut self, candidate: &Candidate) {
        if candidate.beats_as_min(&self.best) {
            self.best = candidate.clone();
        }
        if candidate.beats_as_max(&self.worst) {
            self.worst = candidate.clone();
        }
    }

    fn merge(&mut self, other: Extremes) {
        if other.best.beats_as_min(&self.best) {
            self.best = other.best;
        }
        if other.worst.beats_as_max(&self.worst) {
            self.worst = other.worst;
        }
    }
}

struct SearchContext<'a> {
    scenario: &'a Scenario,
    /// Per-agent never-aided costs, indexed like `scenario.agents`.
    jmax: Vec<f64>,
}

impl SearchContext<'_> {
    /// Apply one task to the CNA state; `None` when it cannot finish within
    /// the horizon. Returns the new state and the change to the cost
    /// numerator (sum of per-agent costs).
    fn extend(&self, state: &CnaState, task_id: usize) -> Option<(CnaState, f64)> {
        if task_id == 0 {
            let end = state.step + self.scenario.noise.surface_steps;
            if end > self.scenario.horizon {
                return None;
            }
            Some((
                CnaState {
                    pos: state.pos,
                    step: end,
                    surfacing_start: Some(state.step),
                },
                0.0,
            ))
        } else {
            let agent_idx = self
                .scenario
                .agents
                .iter()
                .position(|a| a.id == task_id)
                .expect("task ids drawn from the agent set");
            let outcome = try_aid(self.scenario, state, agent_idx)?;
            Some((
                CnaState {
                    pos: outcome.arrival_pos,
                    step: outcome.arrival_step,
                    surfacing_start: state.surfacing_start,
                },
                outcome.cost - self.jmax[agent_idx],
            ))
        }
    }

    /// Depth-first sweep of all extensions of the current prefix, folding
    /// every feasible descendant into the running extremes. `path` holds the
    /// prefix ids and is restored before returning.
    fn search(
        &self,
        state: &CnaState,
        used: u64,
        cost_sum: f64,
        path: &mut Vec<usize>,
        remaining_depth: usize,
        extremes: &mut Extremes,
    ) {
        if remaining_depth == 0 {
            return;
        }
        let n = self.scenario.agent_count();
        for task_id in 0..=n {
            if used & (1 << task_id) != 0 {
                continue;
            }
            // Mission time only accumulates, so an over-time prefix stays
            // over-time under any extension: prune the whole subtree.
            let Some((next_state, delta)) = self.extend(state, task_id) else {
                continue;
            };
            let next_sum = cost_sum + delta;
            path.push(task_id);
            extremes.offer(&Candidate {
                cost: next_sum / n as f64,
                ids: path.clone(),
            });
            self.search(
                &next_state,
                used | (1 << task_id),
                next_sum,
                path,
                remaining_depth - 1,
                extremes,
            );
            path.pop();
        }
    }
}

/// Exhaustively enumerate the feasible sequence set and return the
/// cheapest and the most expensive plan.
///
/// Every ordered, duplicate-free selection of tasks of length up to
/// `max_tasks` is considered, including the empty sequence. The enumeration
/// refuses to start if the unpruned sequence count exceeds `budget`
/// (defaulting to [`DEFAULT_ENUMERATION_BUDGET`]).
pub fn exhaustive_plan(
    scenario: &Scenario,
    max_tasks: usize,
    budget: Option<u64>,
) -> Result<(PlanResult, PlanResult)> {
    scenario.validate()?;
    let n = scenario.agent_count();
    let depth = max_tasks.min(n + 1);
    let required = enumeration_size(n + 1, depth);
    let budget = budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded {
            required,
            budget: budget as u128,
        });
    }

    let jmax: Vec<f64> = scenario
        .agents
        .iter()
        .map(|a| max_cost(a.initial_variance, &scenario.noise, scenario.horizon))
        .collect();
    let base_sum: f64 = jmax.iter().sum();
    let ctx = SearchContext { scenario, jmax };
    let root = CnaState {
        pos: scenario.cna.start,
        step: 0,
        surfacing_start: None,
    };
    let empty = Candidate {
        cost: base_sum / n as f64,
        ids: Vec::new(),
    };

    // Independent first-task branches run in parallel; the reduction uses
    // the candidates' total order, so worker count and scheduling cannot
    // change the result.
    let branches: Vec<Extremes> = if depth == 0 {
        Vec::new()
    } else {
        (0..=n)
            .into_par_iter()
            .filter_map(|task_id| {
                let (state, delta) = ctx.extend(&root, task_id)?;
                let mut extremes = Extremes::seeded(Candidate {
                    cost: (base_sum + delta) / n as f64,
                    ids: vec![task_id],
                });
                let mut path = vec![task_id];
                ctx.search(
                    &state,
                    1 << task_id,
                    base_sum + delta,
                    &mut path,
                    depth - 1,
                    &mut extremes,
                );
                Some(extremes)
            })
            .collect()
    };

    let mut overall = Extremes::seeded(empty);
    for branch in branches {
        overall.merge(branch);
    }

    let best_plan = plan_from_sequence(scenario, TaskSequence::from_ids(&overall.best.ids)?)?;
    let worst_plan = plan_from_sequence(scenario, TaskSequence::from_ids(&overall.worst.ids)?)?;
    Ok((best_plan, worst_plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{AgentSpec, CnaSpec};
    use crate::uncertainty::NoiseParams;
    use approx::assert_relative_eq;

    fn agent(id: usize, x: f64, y: f64, heading: f64, nu0: f64) -> AgentSpec {
        AgentSpec {
            id,
            start: Vec2::new(x, y),
            heading,
            speed: 0.5,
            initial_variance: nu0,
        }
    }

    fn scenario(agents: Vec<AgentSpec>, horizon: usize) -> Scenario {
        let max_tasks = agents.len() + 1;
        Scenario {
            agents,
            cna: CnaSpec {
                start: Vec2::ZERO,
                speed: 1.0,
            },
            noise: NoiseParams::default(),
            horizon,
            time_limit: horizon as f64,
            max_tasks,
        }
    }

    fn four_agent_scenario() -> Scenario {
        scenario(
            vec![
                agent(1, -350.0, 420.0, -0.9, 2610.0),
                agent(2, 180.0, -140.0, 2.4, 1747.0),
                agent(3, -430.0, -380.0, 0.7, 837.0),
                agent(4, 480.0, -120.0, 2.9, 557.0),
            ],
            2000,
        )
    }

    #[test]
    fn task_encoding_round_trip() {
        assert_eq!(Task::from_id(0), Task::Surface);
        assert_eq!(Task::from_id(3), Task::Aid(3));
        assert_eq!(Task::Surface.id(), 0);
        assert_eq!(Task::Aid(7).id(), 7);
        assert!(Task::Surface < Task::Aid(1));
    }

    #[test]
    fn sequence_rejects_duplicates() {
        assert!(TaskSequence::from_ids(&[1, 2, 1]).is_err());
        assert!(TaskSequence::from_ids(&[0, 0]).is_err());
        assert!(TaskSequence::from_ids(&[2, 0, 1, 3, 4]).is_ok());
    }

    #[test]
    fn weight_presets() {
        assert_eq!(RewardWeights::preset("G4").unwrap(), RewardWeights::G4);
        assert_eq!(RewardWeights::G4.alpha, 1.0);
        assert_eq!(RewardWeights::G4.beta, 0.5);
        assert_eq!(RewardWeights::G4.gamma, 0.5);
        assert!(RewardWeights::preset("G5").is_none());
        assert!(RewardWeights {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0
        }
        .validate()
        .is_err());
    }

    #[test]
    fn transit_only_weights_pick_nearest_agent_first() {
        let sc = four_agent_scenario();
        let plan = greedy_plan(&sc, &RewardWeights::G3, sc.max_tasks).unwrap();
        // Agent 2 is nearest in time from the origin; with the reward
        // reduced to the transit term it must be selected first.
        let nearest = sc
            .agents
            .iter()
            .min_by(|a, b| {
                let ta = solve_intercept(Vec2::ZERO, 1.0, a.start, a.heading, a.speed)
                    .unwrap()
                    .tau;
                let tb = solve_intercept(Vec2::ZERO, 1.0, b.start, b.heading, b.speed)
                    .unwrap()
                    .tau;
                ta.total_cmp(&tb)
            })
            .unwrap()
            .id;
        let first_aid = plan
            .sequence
            .tasks()
            .iter()
            .find(|t| t.is_aid())
            .copied()
            .unwrap();
        assert_eq!(first_aid, Task::Aid(nearest));
    }

    #[test]
    fn reward_decomposition_single_terms() {
        let sc = four_agent_scenario();
        // For each single-term preset, the first selected agent must equal
        // the argmax of that term alone over the initial candidate set.
        type Row = (usize, f64, f64, f64); // id, d_max, d_opt, transit
        let state_step = 0usize;
        let mut per_agent: Vec<Row> = Vec::new();
        for a in &sc.agents {
            let sol = solve_intercept(Vec2::ZERO, 1.0, a.start, a.heading, a.speed).unwrap();
            let z = discretize_arrival(sol.tau, state_step, 1.0);
            let nu_cna = cna_variance_at(None, &sc.noise, z);
            let j = crate::uncertainty::agent_cost(a.initial_variance, z, nu_cna, &sc.noise, 2000)
                .unwrap();
            let jmax = max_cost(a.initial_variance, &sc.noise, 2000);
            let jik = min_cost_remaining(a.initial_variance, state_step, &sc.noise, 2000);
            per_agent.push((
                a.id,
                (jmax - j) / jmax,
                (j - jik) / j,
                sol.tau / sc.time_limit,
            ));
        }
        let argmax_by = |f: &dyn Fn(&Row) -> f64| {
            per_agent
                .iter()
                .max_by(|a, b| f(a).total_cmp(&f(b)).then(b.0.cmp(&a.0)))
                .unwrap()
                .0
        };
        let cases: [(RewardWeights, usize); 3] = [
            (RewardWeights::G1, argmax_by(&|r| r.1)),
            (RewardWeights::G2, argmax_by(&|r| -r.2)),
            (RewardWeights::G3, argmax_by(&|r| -r.3)),
        ];
        for (weights, expected_first) in cases {
            let plan = greedy_plan(&sc, &weights, sc.max_tasks).unwrap();
            let first_aid = plan
                .sequence
                .tasks()
                .iter()
                .find(|t| t.is_aid())
                .copied()
                .unwrap();
            assert_eq!(first_aid, Task::Aid(expected_first), "weights {weights:?}");
        }
    }

    #[test]
    fn single_agent_single_slot() {
        let sc = scenario(vec![agent(1, 200.0, 50.0, 2.0, 800.0)], 2000);
        let plan = greedy_plan(&sc, &RewardWeights::G4, 1).unwrap();
        // With one slot the post-pass may only swap the single aid for a
        // surfacing, which cannot lower the cost.
        assert_eq!(plan.sequence.ids(), vec![1]);
        assert!(plan.aiding_steps.contains_key(&1));
    }

    #[test]
    fn greedy_empty_when_nothing_reachable() {
        let sc = scenario(vec![agent(1, 5000.0, 0.0, 0.0, 100.0)], 100);
        let plan = greedy_plan(&sc, &RewardWeights::G4, 2).unwrap();
        assert!(plan.sequence.is_empty());
        assert_relative_eq!(plan.cost, max_cost(100.0, &sc.noise, 100));
        assert_relative_eq!(plan.cost_j, 2.0 * plan.cost);
    }

    #[test]
    fn enumeration_size_counts_ordered_subsets() {
        // Alphabet {0,1,2}, lengths 0..=3: 1 + 3 + 6 + 6.
        assert_eq!(enumeration_size(3, 3), 16);
        assert_eq!(enumeration_size(3, 1), 4);
        assert_eq!(enumeration_size(13, 13), 16_926_797_486);
    }

    #[test]
    fn exhaustive_enumerates_and_brackets_greedy() {
        let sc = four_agent_scenario();
        let (best, worst) = exhaustive_plan(&sc, sc.max_tasks, None).unwrap();
        assert!(best.cost <= worst.cost);
        for weights in [
            RewardWeights::G1,
            RewardWeights::G2,
            RewardWeights::G3,
            RewardWeights::G4,
        ] {
            let plan = greedy_plan(&sc, &weights, sc.max_tasks).unwrap();
            assert!(best.cost <= plan.cost, "greedy beat exhaustive best");
            assert!(plan.cost <= worst.cost, "greedy above exhaustive worst");
        }
    }

    #[test]
    fn exhaustive_budget_error_carries_required_count() {
        let sc = four_agent_scenario();
        let err = exhaustive_plan(&sc, sc.max_tasks, Some(10)).unwrap_err();
        match err {
            Error::BudgetExceeded { required, budget } => {
                // Alphabet of 5 tasks, depth 5: sum of permutations.
                assert_eq!(required, enumeration_size(5, 5));
                assert_eq!(budget, 10);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn exhaustive_degenerate_horizon_keeps_empty_sequence() {
        let mut sc = scenario(vec![agent(1, 100.0, 0.0, 0.0, 50.0)], 0);
        sc.time_limit = 0.0;
        let (best, worst) = exhaustive_plan(&sc, sc.max_tasks, None).unwrap();
        assert!(best.sequence.is_empty());
        assert!(worst.sequence.is_empty());
        assert_relative_eq!(best.cost, 50.0);
        assert_relative_eq!(worst.cost, 50.0);
    }

    #[test]
    fn exhaustive_matches_unpruned_reference() {
        // Small scenario, reference enumeration without pruning: generate
        // every ordered subset, evaluate through the public path, and track
        // the same tie-breaks.
        let sc = scenario(
            vec![
                agent(1, 220.0, -100.0, 1.8, 900.0),
                agent(2, -150.0, 330.0, -0.3, 1500.0),
                agent(3, 90.0, 520.0, 2.2, 300.0),
            ],
            1400,
        );
        let (best, worst) = exhaustive_plan(&sc, sc.max_tasks, None).unwrap();

        type Key = (f64, Vec<usize>);
        fn better_ref(cur: &Option<Key>, cand: &Key, min: bool) -> bool {
            match cur {
                None => true,
                Some((c, ids)) => {
                    if min {
                        cand.0 < *c || (cand.0 == *c && cand.1 < *ids)
                    } else {
                        cand.0 > *c || (cand.0 == *c && cand.1 < *ids)
                    }
                }
            }
        }

        let mut ref_best: Option<Key> = None;
        let mut ref_worst: Option<Key> = None;
        let ids: Vec<usize> = (0..=3).collect();
        let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
        while let Some(prefix) = stack.pop() {
            let seq = TaskSequence::from_ids(&prefix).unwrap();
            if let Ok(plan) = evaluate_sequence(&sc, &seq) {
                let key = (plan.cost, prefix.clone());
                if better_ref(&ref_best, &key, true) {
                    ref_best = Some(key.clone());
                }
                if better_ref(&ref_worst, &key, false) {
                    ref_worst = Some(key);
                }
            }
            if prefix.len() < sc.max_tasks {
                for &id in &ids {
                    if !prefix.contains(&id) {
                        let mut next = prefix.clone();
                        next.push(id);
                        stack.push(next);
                    }
                }
            }
        }

        let (rb_cost, rb_ids) = ref_best.unwrap();
        let (rw_cost, rw_ids) = ref_worst.unwrap();
        assert_eq!(best.sequence.ids(), rb_ids);
        assert_eq!(worst.sequence.ids(), rw_ids);
        assert_relative_eq!(best.cost, rb_cost, max_relative = 1e-12);
        assert_relative_eq!(worst.cost, rw_cost, max_relative = 1e-12);
    }

    #[test]
    fn determinism_across_repeated_runs() {
        let sc = four_agent_scenario();
        let a = greedy_plan(&sc, &RewardWeights::G4, sc.max_tasks).unwrap();
        let b = greedy_plan(&sc, &RewardWeights::G4, sc.max_tasks).unwrap();
        assert_eq!(a.sequence, b.sequence);
        assert_eq!(a.cost.to_bits(), b.cost.to_bits());

        let (e1_best, e1_worst) = exhaustive_plan(&sc, sc.max_tasks, None).unwrap();
        let (e2_best, e2_worst) = exhaustive_plan(&sc, sc.max_tasks, None).unwrap();
        assert_eq!(e1_best.sequence, e2_best.sequence);
        assert_eq!(e1_best.cost.to_bits(), e2_best.cost.to_bits());
        assert_eq!(e1_worst.sequence, e2_worst.sequence);
    }

    #[test]
    fn evaluate_sequence_examples() {
        let sc = four_agent_scenario();
        let empty = evaluate_sequence(&sc, &TaskSequence::empty()).unwrap();
        let no_aid: f64 = sc
            .agents
            .iter()
            .map(|a| max_cost(a.initial_variance, &sc.noise, sc.horizon))
            .sum::<f64>()
            / 4.0;
        assert_relative_eq!(empty.cost, no_aid, max_relative = 1e-12);

        let surfacing_only =
            evaluate_sequence(&sc, &TaskSequence::from_ids(&[0]).unwrap()).unwrap();
        assert_eq!(surfacing_only.cost, empty.cost);
        assert_eq!(surfacing_only.surfacing_step, Some(0));

        let unknown = evaluate_sequence(&sc, &TaskSequence::from_ids(&[9]).unwrap());
        assert!(matches!(unknown, Err(Error::UnknownTask { .. })));
    }

    #[test]
    fn plan_cost_matches_mission_reevaluation() {
        let sc = four_agent_scenario();
        let plan = greedy_plan(&sc, &RewardWeights::G4, sc.max_tasks).unwrap();
        assert_relative_eq!(plan.cost, plan.mission.cost, max_relative = 1e-9);
        let again = evaluate_sequence(&sc, &plan.sequence).unwrap();
        assert_relative_eq!(plan.cost, again.cost, max_relative = 1e-12);
    }
}
