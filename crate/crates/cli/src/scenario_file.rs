//! Scenario file format: a TOML document with a `[params]` section carrying
//! the model constants (missing entries fall back to the built-in defaults
//! with a logged notice), a `[cna]` section, an `[[agents]]` list, and
//! optional top-level `horizon` and `d` keys. Unknown fields are rejected.

use cna_core::kinematics::{AgentSpec, CnaSpec, Vec2};
use cna_core::montecarlo::GenParams;
use cna_core::simulator::Scenario;
use cna_core::uncertainty::NoiseParams;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    /// Number of discrete steps; derived from `t_max / dt` when omitted.
    horizon: Option<usize>,
    /// Maximum task-sequence length D; defaults to N+1.
    d: Option<usize>,
    #[serde(default)]
    params: ParamsSection,
    cna: CnaSection,
    agents: Vec<AgentSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsSection {
    dt: Option<f64>,
    t_max: Option<f64>,
    v_c: Option<f64>,
    v_a: Option<f64>,
    nu_w: Option<f64>,
    nu_c: Option<f64>,
    nu_y: Option<f64>,
    nu_g: Option<f64>,
    m: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CnaSection {
    start: [f64; 2],
    speed: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentSection {
    id: usize,
    start: [f64; 2],
    heading_deg: Option<f64>,
    heading_rad: Option<f64>,
    speed: Option<f64>,
    nu0: f64,
}

/// A parsed scenario plus the notices produced while filling defaults.
#[derive(Debug)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub notices: Vec<String>,
}

/// The built-in parameter defaults (the reference simulation constants).
pub fn default_params() -> GenParams {
    GenParams::default()
}

pub fn parse_scenario(text: &str) -> Result<LoadedScenario, CliError> {
    let doc: ScenarioDoc =
        toml::from_str(text).map_err(|e| CliError::input(format!("scenario file: {e}")))?;
    let defaults = default_params();
    let mut notices = Vec::new();
    let mut fill = |name: &str, value: Option<f64>, default: f64| -> f64 {
        value.unwrap_or_else(|| {
            notices.push(format!("params.{name} missing, using default {default}"));
            default
        })
    };

    let dt = fill("dt", doc.params.dt, defaults.noise.dt);
    let t_max = fill("t_max", doc.params.t_max, defaults.horizon as f64);
    let v_c = fill("v_c", doc.params.v_c, defaults.cna_speed);
    let v_a = fill("v_a", doc.params.v_a, defaults.agent_speed);
    let nu_w = fill("nu_w", doc.params.nu_w, defaults.noise.agent_process_var);
    let nu_c = fill("nu_c", doc.params.nu_c, defaults.noise.cna_process_var);
    let nu_y = fill("nu_y", doc.params.nu_y, defaults.noise.measurement_var);
    let nu_g = fill("nu_g", doc.params.nu_g, defaults.noise.gps_var);
    let surface_steps = doc.params.m.unwrap_or_else(|| {
        notices.push(format!(
            "params.m missing, using default {}",
            defaults.noise.surface_steps
        ));
        defaults.noise.surface_steps
    });

    if !dt.is_finite() || dt <= 0.0 {
        return Err(CliError::input(format!("params.dt must be positive, got {dt}")));
    }
    let horizon = doc.horizon.unwrap_or_else(|| {
        let derived = (t_max / dt).round() as usize;
        notices.push(format!("horizon missing, derived {derived} from t_max / dt"));
        derived
    });
    let max_tasks = doc.d.unwrap_or_else(|| {
        let derived = doc.agents.len() + 1;
        notices.push(format!("d missing, using N+1 = {derived}"));
        derived
    });

    let mut agents = Vec::with_capacity(doc.agents.len());
    for (idx, agent) in doc.agents.iter().enumerate() {
        let heading = match (agent.heading_deg, agent.heading_rad) {
            (Some(deg), None) => deg.to_radians(),
            (None, Some(rad)) => rad,
            _ => {
                return Err(CliError::input(format!(
                    "agents[{idx}]: exactly one of heading_deg or heading_rad must be set"
                )))
            }
        };
        agents.push(AgentSpec {
            id: agent.id,
            start: Vec2::new(agent.start[0], agent.start[1]),
            heading,
            speed: agent.speed.unwrap_or(v_a),
            initial_variance: agent.nu0,
        });
    }

    let scenario = Scenario {
        agents,
        cna: CnaSpec {
            start: Vec2::new(doc.cna.start[0], doc.cna.start[1]),
            speed: doc.cna.speed.unwrap_or(v_c),
        },
        noise: NoiseParams {
            agent_process_var: nu_w,
            cna_process_var: nu_c,
            measurement_var: nu_y,
            gps_var: nu_g,
            surface_steps,
            dt,
        },
        horizon,
        time_limit: t_max,
        max_tasks,
    };
    scenario
        .validate()
        .map_err(|e| CliError::input(format!("scenario file: {e}")))?;
    Ok(LoadedScenario { scenario, notices })
}

fn toml_f64(v: f64) -> String {
    // `{:?}` keeps the shortest round-trip form and always marks floats
    // ("1.0", not "1"), which TOML requires.
    format!("{v:?}")
}

/// Render a scenario as a fully explicit TOML document that parses back to
/// the identical in-memory scenario.
pub fn scenario_to_toml(scenario: &Scenario) -> String {
    let mut out = String::new();
    out.push_str(&format!("horizon = {}\n", scenario.horizon));
    out.push_str(&format!("d = {}\n\n", scenario.max_tasks));

    out.push_str("[params]\n");
    out.push_str(&format!("dt = {}\n", toml_f64(scenario.noise.dt)));
    out.push_str(&format!("t_max = {}\n", toml_f64(scenario.time_limit)));
    out.push_str(&format!("v_c = {}\n", toml_f64(scenario.cna.speed)));
    let v_a_default = scenario.agents.first().map_or(0.5, |a| a.speed);
    out.push_str(&format!("v_a = {}\n", toml_f64(v_a_default)));
    out.push_str(&format!("nu_w = {}\n", toml_f64(scenario.noise.agent_process_var)));
    out.push_str(&format!("nu_c = {}\n", toml_f64(scenario.noise.cna_process_var)));
    out.push_str(&format!("nu_y = {}\n", toml_f64(scenario.noise.measurement_var)));
    out.push_str(&format!("nu_g = {}\n", toml_f64(scenario.noise.gps_var)));
    out.push_str(&format!("m = {}\n\n", scenario.noise.surface_steps));

    out.push_str("[cna]\n");
    out.push_str(&format!(
        "start = [{}, {}]\n",
        toml_f64(scenario.cna.start.x),
        toml_f64(scenario.cna.start.y)
    ));
    out.push_str(&format!("speed = {}\n", toml_f64(scenario.cna.speed)));

    for agent in &scenario.agents {
        out.push_str("\n[[agents]]\n");
        out.push_str(&format!("id = {}\n", agent.id));
        out.push_str(&format!(
            "start = [{}, {}]\n",
            toml_f64(agent.start.x),
            toml_f64(agent.start.y)
        ));
        out.push_str(&format!("heading_rad = {}\n", toml_f64(agent.heading)));
        out.push_str(&format!("speed = {}\n", toml_f64(agent.speed)));
        out.push_str(&format!("nu0 = {}\n", toml_f64(agent.initial_variance)));
    }
    out
}
