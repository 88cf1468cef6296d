//! Plot-ready delimiter-separated exports: per-timestep traces, the event
//! table, and the plan summary. Every file starts with a '#'-prefixed
//! metadata block; numbers carry 13 significant digits.

use cna_core::planner::PlanResult;
use cna_core::simulator::Scenario;

fn fmt_f(v: f64) -> String {
    format!("{v:.12e}")
}

fn meta(kind: &str) -> String {
    format!(
        "# cna {kind}\n# version: {}\n",
        env!("CARGO_PKG_VERSION")
    )
}

/// One row per timestep: the CNA position and variance followed by each
/// agent's nominal position and variance.
pub fn trace_csv(scenario: &Scenario, plan: &PlanResult) -> String {
    let mission = &plan.mission;
    let mut out = meta("trace export");
    out.push_str("k,cna_x,cna_y,nu_c");
    for agent in &scenario.agents {
        let id = agent.id;
        out.push_str(&format!(",agent{id}_x,agent{id}_y,agent{id}_nu"));
    }
    out.push('\n');

    for k in 0..=scenario.horizon {
        let pos = mission.cna_path[k];
        out.push_str(&format!(
            "{k},{},{},{}",
            fmt_f(pos.x),
            fmt_f(pos.y),
            fmt_f(mission.cna_trace[k])
        ));
        for (idx, agent) in scenario.agents.iter().enumerate() {
            let p = agent.position_at(k, scenario.noise.dt);
            out.push_str(&format!(
                ",{},{},{}",
                fmt_f(p.x),
                fmt_f(p.y),
                fmt_f(mission.agent_traces[idx][k])
            ));
        }
        out.push('\n');
    }
    out
}

/// Aiding steps and the surfacing window, one event per row.
pub fn events_csv(scenario: &Scenario, plan: &PlanResult) -> String {
    let mut out = meta("event table");
    out.push_str("event,task_id,step_start,step_end\n");
    for task in plan.sequence.tasks() {
        match task {
            cna_core::planner::Task::Aid(id) => {
                let step = plan.aiding_steps[id];
                out.push_str(&format!("aiding,{id},{step},{step}\n"));
            }
            cna_core::planner::Task::Surface => {
                let start = plan
                    .surfacing_step
                    .expect("surfacing task implies a surfacing step");
                out.push_str(&format!(
                    "surfacing,0,{start},{}\n",
                    start + scenario.noise.surface_steps
                ));
            }
        }
    }
    out
}

fn fmt_sequence(ids: &[usize]) -> String {
    ids.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

/// Plan summary: headline key/value rows plus a per-task table. For the
/// exhaustive planner the worst-case baseline is reported alongside.
pub fn plan_csv(
    scenario: &Scenario,
    planner_label: &str,
    plan: &PlanResult,
    worst: Option<&PlanResult>,
) -> String {
    let mut out = meta("plan summary");
    out.push_str("key,value\n");
    out.push_str(&format!("planner,{planner_label}\n"));
    out.push_str(&format!("sequence,{}\n", fmt_sequence(&plan.sequence.ids())));
    out.push_str(&format!("cost,{}\n", fmt_f(plan.cost)));
    out.push_str(&format!("cost_j,{}\n", fmt_f(plan.cost_j)));
    out.push_str(&format!("completion_time,{}\n", fmt_f(plan.completion_time)));
    out.push_str(&format!(
        "surfacing_step,{}\n",
        plan.surfacing_step
            .map_or_else(|| "none".to_string(), |s| s.to_string())
    ));
    out.push_str(&format!("lower_bound_upper_bound,{}\n", {
        let (lo, hi) =
            cna_core::uncertainty::cost_bounds(&scenario.agents, &scenario.noise, scenario.horizon)
                .expect("scenario validated before export");
        format!("{};{}", fmt_f(lo), fmt_f(hi))
    }));
    if let Some(worst) = worst {
        out.push_str(&format!("worst_cost,{}\n", fmt_f(worst.cost)));
        out.push_str(&format!(
            "worst_sequence,{}\n",
            fmt_sequence(&worst.sequence.ids())
        ));
    }

    out.push('\n');
    out.push_str("task_index,task_id,kind,completion_step\n");
    for (idx, task) in plan.sequence.tasks().iter().enumerate() {
        match task {
            cna_core::planner::Task::Aid(id) => {
                out.push_str(&format!("{idx},{id},aiding,{}\n", plan.aiding_steps[id]));
            }
            cna_core::planner::Task::Surface => {
                let start = plan.surfacing_step.expect("surfacing step recorded");
                out.push_str(&format!(
                    "{idx},0,surfacing,{}\n",
                    start + scenario.noise.surface_steps
                ));
            }
        }
    }

    out.push('\n');
    out.push_str("agent_id,aid_step,agent_cost\n");
    for (idx, agent) in scenario.agents.iter().enumerate() {
        let step = plan
            .aiding_steps
            .get(&agent.id)
            .map_or_else(|| "none".to_string(), |z| z.to_string());
        out.push_str(&format!(
            "{},{step},{}\n",
            agent.id,
            fmt_f(plan.per_agent_costs[idx])
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cna_core::kinematics::{AgentSpec, CnaSpec, Vec2};
    use cna_core::planner::{evaluate_sequence, TaskSequence};
    use cna_core::uncertainty::NoiseParams;

    fn example() -> (Scenario, PlanResult) {
        let scenario = Scenario {
            agents: vec![
                AgentSpec {
                    id: 1,
                    start: Vec2::new(120.0, 40.0),
                    heading: 2.0,
                    speed: 0.5,
                    initial_variance: 900.0,
                },
                AgentSpec {
                    id: 2,
                    start: Vec2::new(-200.0, 260.0),
                    heading: -0.7,
                    speed: 0.5,
                    initial_variance: 400.0,
                },
            ],
            cna: CnaSpec {
                start: Vec2::ZERO,
                speed: 1.0,
            },
            noise: NoiseParams::default(),
            horizon: 1500,
            time_limit: 1500.0,
            max_tasks: 3,
        };
        let plan = evaluate_sequence(
            &scenario,
            &TaskSequence::from_ids(&[1, 0, 2]).unwrap(),
        )
        .unwrap();
        (scenario, plan)
    }

    #[test]
    fn trace_has_one_row_per_step_plus_header() {
        let (scenario, plan) = example();
        let text = trace_csv(&scenario, &plan);
        let data_rows = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("k,"))
            .count();
        assert_eq!(data_rows, scenario.horizon + 1);
        assert!(text.contains("agent2_nu"));
    }

    #[test]
    fn events_cover_every_task() {
        let (scenario, plan) = example();
        let text = events_csv(&scenario, &plan);
        assert_eq!(text.matches("aiding,").count(), 2);
        assert_eq!(text.matches("surfacing,").count(), 1);
    }

    #[test]
    fn plan_summary_contains_headline_fields() {
        let (scenario, plan) = example();
        let text = plan_csv(&scenario, "greedy:G4", &plan, None);
        for key in ["planner,", "sequence,1-0-2", "cost,", "cost_j,", "surfacing_step,"] {
            assert!(text.contains(key), "missing {key} in:\n{text}");
        }
    }
}
