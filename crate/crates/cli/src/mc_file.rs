//! Monte Carlo configuration file: a TOML document mapped onto
//! [`McConfig`]. Only `seed` is mandatory; everything else defaults to the
//! reference experiment protocol.

use cna_core::montecarlo::{GenParams, McConfig, PlannerKind, SpawnStrategy};
use cna_core::planner::RewardWeights;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct McDoc {
    seed: u64,
    trials_per_n: Option<usize>,
    n_min: Option<usize>,
    n_max: Option<usize>,
    box_side: Option<f64>,
    /// Circle-formation radius; defaults to a quarter of the box side.
    circle_radius: Option<f64>,
    nu0_max: Option<f64>,
    horizon: Option<usize>,
    /// Any subset of "interior", "boundary", "circle".
    strategies: Option<Vec<String>>,
    /// Entries: "G1".."G4", "greedy:a,b,c", or "exhaustive".
    planners: Option<Vec<String>>,
    exhaustive_n_cap: Option<usize>,
    budget: Option<u64>,
}

/// Parse `--weights`-style custom greedy weights: three comma-separated
/// numbers.
pub fn parse_weights(text: &str) -> Result<RewardWeights, CliError> {
    if let Some(preset) = RewardWeights::preset(text) {
        return Ok(preset);
    }
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::input(format!(
            "weights must be G1..G4 or three comma-separated numbers, got {text:?}"
        )));
    }
    let parse = |s: &str| -> Result<f64, CliError> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::input(format!("invalid weight component {s:?}")))
    };
    let weights = RewardWeights {
        alpha: parse(parts[0])?,
        beta: parse(parts[1])?,
        gamma: parse(parts[2])?,
    };
    weights
        .validate()
        .map_err(|e| CliError::input(e.to_string()))?;
    Ok(weights)
}

fn parse_planner(text: &str) -> Result<PlannerKind, CliError> {
    if text == "exhaustive" {
        return Ok(PlannerKind::Exhaustive);
    }
    if let Some(kind) = PlannerKind::greedy_preset(text) {
        return Ok(kind);
    }
    if let Some(spec) = text.strip_prefix("greedy:") {
        let weights = parse_weights(spec)?;
        return Ok(PlannerKind::Greedy {
            label: format!("greedy({spec})"),
            weights,
        });
    }
    Err(CliError::input(format!(
        "unknown planner {text:?}; expected G1..G4, greedy:a,b,c or exhaustive"
    )))
}

pub fn parse_mc_config(text: &str) -> Result<McConfig, CliError> {
    let doc: McDoc =
        toml::from_str(text).map_err(|e| CliError::input(format!("mc config: {e}")))?;
    let defaults = McConfig::default();
    let box_side = doc.box_side.unwrap_or(defaults.gen.box_side);

    let strategies = match &doc.strategies {
        None => SpawnStrategy::ALL.to_vec(),
        Some(names) => {
            let mut out = Vec::new();
            for name in names {
                let strategy = SpawnStrategy::parse(name).ok_or_else(|| {
                    CliError::input(format!(
                        "unknown strategy {name:?}; expected interior, boundary or circle"
                    ))
                })?;
                out.push(strategy);
            }
            out
        }
    };
    let planners = match &doc.planners {
        None => PlannerKind::default_set(),
        Some(names) => names
            .iter()
            .map(|n| parse_planner(n))
            .collect::<Result<Vec<_>, _>>()?,
    };

    let config = McConfig {
        seed: doc.seed,
        trials_per_n: doc.trials_per_n.unwrap_or(defaults.trials_per_n),
        n_min: doc.n_min.unwrap_or(defaults.n_min),
        n_max: doc.n_max.unwrap_or(defaults.n_max),
        gen: GenParams {
            box_side,
            circle_radius: doc.circle_radius.unwrap_or(box_side / 4.0),
            nu0_max: doc.nu0_max.unwrap_or(defaults.gen.nu0_max),
            horizon: doc.horizon.unwrap_or(defaults.gen.horizon),
            ..defaults.gen
        },
        strategies,
        planners,
        exhaustive_n_cap: doc.exhaustive_n_cap.unwrap_or(defaults.exhaustive_n_cap),
        enumeration_budget: doc.budget.unwrap_or(defaults.enumeration_budget),
    };
    config
        .validate()
        .map_err(|e| CliError::input(format!("mc config: {e}")))?;
    Ok(config)
}
