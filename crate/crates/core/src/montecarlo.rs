//! Seeded, reproducible Monte Carlo comparison of the planners.
//!
//! Scenarios are randomized with one of three agent-spawn strategies (box
//! interior, box boundary with inward headings, or a circular formation
//! centered on the boundary), each trial runs every configured planner on
//! the identical scenario, and the results aggregate into per-(N, planner)
//! mean costs alongside the analytic cost bounds.
//!
//! Reproducibility contract: every trial derives its own ChaCha12 stream
//! from `(seed, N, trial index)` via a SplitMix64 expansion, so the report's
//! cost tables are a pure function of the configuration, independent of
//! worker count or scheduling. Wall-clock planning times are inherently not
//! reproducible and are kept in a separate table excluded from that
//! guarantee.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kinematics::{AgentSpec, CnaSpec, Vec2};
use crate::planner::{
    exhaustive_plan, greedy_plan, RewardWeights, DEFAULT_ENUMERATION_BUDGET,
};
use crate::simulator::Scenario;
use crate::uncertainty::{cost_bounds, NoiseParams};

/// Identifier of the RNG scheme written into report headers.
pub const RNG_ID: &str = "chacha12/splitmix64(seed,n,trial)";

/// Agent-spawn strategies for randomized scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SpawnStrategy {
    /// Uniform positions in the box, uniform headings.
    Interior,
    /// Uniform positions on the box boundary, headings toward the center
    /// perturbed by up to +/-30 degrees.
    Boundary,
    /// Evenly spaced circular formation centered on the box boundary, all
    /// agents sharing the heading from the formation center to the box
    /// center.
    Circle,
}

impl SpawnStrategy {
    pub const ALL: [SpawnStrategy; 3] = [
        SpawnStrategy::Interior,
        SpawnStrategy::Boundary,
        SpawnStrategy::Circle,
    ];

    pub fn parse(name: &str) -> Option<SpawnStrategy> {
        match name {
            "interior" => Some(SpawnStrategy::Interior),
            "boundary" => Some(SpawnStrategy::Boundary),
            "circle" => Some(SpawnStrategy::Circle),
            _ => None,
        }
    }
}

impl fmt::Display for SpawnStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SpawnStrategy::Interior => "interior",
            SpawnStrategy::Boundary => "boundary",
            SpawnStrategy::Circle => "circle",
        };
        f.write_str(name)
    }
}

/// A planner entry in a Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub enum PlannerKind {
    Greedy {
        label: String,
        weights: RewardWeights,
    },
    /// Runs the exhaustive enumeration; reports both the optimal and the
    /// worst-case sequence.
    Exhaustive,
}

impl PlannerKind {
    pub fn greedy_preset(name: &str) -> Option<PlannerKind> {
        RewardWeights::preset(name).map(|weights| PlannerKind::Greedy {
            label: name.to_uppercase(),
            weights,
        })
    }

    /// The four single/mixed-term greedy presets plus the exhaustive
    /// baseline.
    pub fn default_set() -> Vec<PlannerKind> {
        let mut set: Vec<PlannerKind> = ["G1", "G2", "G3", "G4"]
            .iter()
            .filter_map(|name| Self::greedy_preset(name))
            .collect();
        set.push(PlannerKind::Exhaustive);
        set
    }
}

/// Scenario-generation knobs shared by all strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    /// Box side length L.
    pub box_side: f64,
    /// Circle-formation radius (strategy 3 only).
    pub circle_radius: f64,
    /// Initial agent variances are drawn uniformly from `(0, nu0_max]`.
    pub nu0_max: f64,
    pub noise: NoiseParams,
    pub cna_speed: f64,
    pub agent_speed: f64,
    pub horizon: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            box_side: 1000.0,
            circle_radius: 250.0,
            nu0_max: 3000.0,
            noise: NoiseParams::default(),
            cna_speed: 1.0,
            agent_speed: 0.5,
            horizon: 2000,
        }
    }
}

/// Uniform point on the perimeter of the box `[-L/2, L/2]^2`.
fn boundary_point(box_side: f64, rng: &mut impl Rng) -> Vec2 {
    let half = box_side / 2.0;
    let u: f64 = rng.random_range(0.0..4.0 * box_side);
    let (side, along) = ((u / box_side) as usize, u % box_side);
    match side {
        0 => Vec2::new(-half + along, -half),
        1 => Vec2::new(half, -half + along),
        2 => Vec2::new(half - along, half),
        _ => Vec2::new(-half, half - along),
    }
}

fn nu0_sample(nu0_max: f64, rng: &mut impl Rng) -> f64 {
    // Uniform over (0, nu0_max]: the open lower end comes from flipping the
    // half-open unit sample.
    nu0_max * (1.0 - rng.random::<f64>())
}

/// Generate one randomized scenario. The CNA starts at the origin; mission
/// limits and the noise model come from `gen`.
pub fn generate_scenario(
    strategy: SpawnStrategy,
    n: usize,
    gen: &GenParams,
    rng: &mut impl Rng,
) -> Scenario {
    assert!(n >= 1, "scenario needs at least one agent");
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut agents = Vec::with_capacity(n);

    match strategy {
        SpawnStrategy::Interior => {
            let half = gen.box_side / 2.0;
            for id in 1..=n {
                let start = Vec2::new(
                    rng.random_range(-half..=half),
                    rng.random_range(-half..=half),
                );
                let heading = rng.random_range(0.0..two_pi);
                let nu0 = nu0_sample(gen.nu0_max, rng);
                agents.push(AgentSpec {
                    id,
                    start,
                    heading,
                    speed: gen.agent_speed,
                    initial_variance: nu0,
                });
            }
        }
        SpawnStrategy::Boundary => {
            let max_perturb = 30.0_f64.to_radians();
            for id in 1..=n {
                let start = boundary_point(gen.box_side, rng);
                let inward = (-start.y).atan2(-start.x);
                let heading = inward + rng.random_range(-max_perturb..=max_perturb);
                let nu0 = nu0_sample(gen.nu0_max, rng);
                agents.push(AgentSpec {
                    id,
                    start,
                    heading,
                    speed: gen.agent_speed,
                    initial_variance: nu0,
                });
            }
        }
        SpawnStrategy::Circle => {
            let center = boundary_point(gen.box_side, rng);
            let heading = (-center.y).atan2(-center.x);
            for id in 1..=n {
                let angle = two_pi * (id - 1) as f64 / n as f64;
                let start = center + Vec2::from_angle(angle) * gen.circle_radius;
                let nu0 = nu0_sample(gen.nu0_max, rng);
                agents.push(AgentSpec {
                    id,
                    start,
                    heading,
                    speed: gen.agent_speed,
                    initial_variance: nu0,
                });
            }
        }
    }

    Scenario {
        agents,
        cna: CnaSpec {
            start: Vec2::ZERO,
            speed: gen.cna_speed,
        },
        noise: gen.noise,
        horizon: gen.horizon,
        time_limit: gen.horizon as f64 * gen.noise.dt,
        max_tasks: n + 1,
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A self-seeding RNG stream for one trial, independent of every other
/// trial's stream.
pub fn trial_rng(seed: u64, n: usize, trial: usize) -> ChaCha12Rng {
    let mut state = splitmix64(
        seed ^ splitmix64((n as u64).wrapping_add(splitmix64(trial as u64 ^ 0x6A09_E667_F3BC_C909))),
    );
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        chunk.copy_from_slice(&splitmix64(state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

/// Monte Carlo experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub seed: u64,
    pub trials_per_n: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub gen: GenParams,
    /// Enabled spawn strategies; trials split evenly across them with the
    /// remainder going to the earliest in enum order.
    pub strategies: Vec<SpawnStrategy>,
    pub planners: Vec<PlannerKind>,
    /// Exhaustive runs only for `n <= exhaustive_n_cap`.
    pub exhaustive_n_cap: usize,
    pub enumeration_budget: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            seed: 1,
            trials_per_n: 100,
            n_min: 3,
            n_max: 14,
            gen: GenParams::default(),
            strategies: SpawnStrategy::ALL.to_vec(),
            planners: PlannerKind::default_set(),
            exhaustive_n_cap: 7,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials_per_n == 0 {
            return Err(Error::InvalidConfig("trials_per_n must be positive".into()));
        }
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= n_min <= n_max, got {}..{}",
                self.n_min, self.n_max
            )));
        }
        if self.strategies.is_empty() {
            return Err(Error::InvalidConfig("no spawn strategies enabled".into()));
        }
        if self.planners.is_empty() {
            return Err(Error::InvalidConfig("no planners configured".into()));
        }
        let extents = [
            ("box_side", self.gen.box_side),
            ("circle_radius", self.gen.circle_radius),
            ("nu0_max", self.gen.nu0_max),
        ];
        for (name, value) in extents {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        self.gen.noise.validate()?;
        for planner in &self.planners {
            if let PlannerKind::Greedy { weights, .. } = planner {
                weights.validate()?;
            }
        }
        Ok(())
    }

    /// Strategy of each trial index: even blocks per enabled strategy, the
    /// remainder filling the earliest strategies.
    pub fn strategy_assignments(&self) -> Vec<SpawnStrategy> {
        let mut enabled = self.strategies.clone();
        enabled.sort();
        enabled.dedup();
        let k = enabled.len();
        let base = self.trials_per_n / k;
        let remainder = self.trials_per_n % k;
        let mut out = Vec::with_capacity(self.trials_per_n);
        for (i, strategy) in enabled.iter().enumerate() {
            let count = base + usize::from(i < remainder);
            out.extend(std::iter::repeat_n(*strategy, count));
        }
        out
    }
}

/// Result of one planner on one trial.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    Plan {
        cost: f64,
        cost_j: f64,
        completion_time: f64,
        /// Number of agent-aiding tasks in the returned sequence.
        aid_count: usize,
        /// Task ids in order.
        sequence: Vec<usize>,
    },
    Skipped {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub n: usize,
    pub trial: usize,
    pub strategy: SpawnStrategy,
    /// Planner label; the exhaustive baseline contributes
    /// `exhaustive-best` and `exhaustive-worst` rows.
    pub planner: String,
    pub outcome: TrialOutcome,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub n: usize,
    pub trial: usize,
    pub planner: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRecord {
    pub n: usize,
    pub planner: String,
    pub trials_used: usize,
    pub mean_cost: f64,
    pub mean_lower_bound: f64,
    pub mean_upper_bound: f64,
}

/// Full experiment output. The cost tables are deterministic for a given
/// configuration; the timing table is not.
#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub seed: u64,
    pub trials: Vec<TrialRecord>,
    pub aggregates: Vec<AggregateRecord>,
    pub timings: Vec<TimingRecord>,
    /// Deterministic pass/fail notes for the directional weight-mix check.
    pub soft_checks: Vec<String>,
}

fn fmt_f(v: f64) -> String {
    format!("{v:.12e}")
}

fn fmt_sequence(ids: &[usize]) -> String {
    ids.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

impl McReport {
    fn header(&self, table: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("# cna monte carlo report: {table}\n"));
        out.push_str(&format!("# version: {}\n", env!("CARGO_PKG_VERSION")));
        out.push_str(&format!("# seed: {}\n", self.seed));
        out.push_str(&format!("# rng: {RNG_ID}\n"));
        out
    }

    /// Per-trial cost table; deterministic for a given configuration.
    pub fn trials_csv(&self) -> String {
        let mut out = self.header("trials");
        out.push_str(
            "n,trial,strategy,planner,status,cost,cost_j,completion_time,aid_count,sequence,lower_bound,upper_bound,skip_reason\n",
        );
        for row in &self.trials {
            let (status, cost, cost_j, time, aids, seq, reason) = match &row.outcome {
                TrialOutcome::Plan {
                    cost,
                    cost_j,
                    completion_time,
                    aid_count,
                    sequence,
                } => (
                    "ok",
                    fmt_f(*cost),
                    fmt_f(*cost_j),
                    fmt_f(*completion_time),
                    aid_count.to_string(),
                    fmt_sequence(sequence),
                    String::new(),
                ),
                TrialOutcome::Skipped { reason } => (
                    "skipped",
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    reason.clone(),
                ),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                row.n,
                row.trial,
                row.strategy,
                row.planner,
                status,
                cost,
                cost_j,
                time,
                aids,
                seq,
                fmt_f(row.lower_bound),
                fmt_f(row.upper_bound),
                reason,
            ));
        }
        out
    }

    /// Per-(N, planner) aggregate table; deterministic for a given
    /// configuration.
    pub fn aggregates_csv(&self) -> String {
        let mut out = self.header("aggregates");
        out.push_str("n,planner,trials_used,mean_cost,mean_lower_bound,mean_upper_bound\n");
        for row in &self.aggregates {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.n,
                row.planner,
                row.trials_used,
                fmt_f(row.mean_cost),
                fmt_f(row.mean_lower_bound),
                fmt_f(row.mean_upper_bound),
            ));
        }
        for line in &self.soft_checks {
            out.push_str(&format!("# {line}\n"));
        }
        out
    }

    /// Wall-clock planning times; excluded from the determinism guarantee.
    pub fn timings_csv(&self) -> String {
        let mut out = self.header("timings (not reproducible across runs)");
        out.push_str("kind,n,trial,planner,seconds\n");
        for row in &self.timings {
            out.push_str(&format!(
                "trial,{},{},{},{}\n",
                row.n,
                row.trial,
                row.planner,
                fmt_f(row.seconds)
            ));
        }
        // Mean planning time per (n, planner) in deterministic key order.
        let mut keys: Vec<(usize, String)> = self
            .timings
            .iter()
            .map(|t| (t.n, t.planner.clone()))
            .collect();
        keys.sort();
        keys.dedup();
        for (n, planner) in keys {
            let times: Vec<f64> = self
                .timings
                .iter()
                .filter(|t| t.n == n && t.planner == planner)
                .map(|t| t.seconds)
                .collect();
            let mean = times.iter().sum::<f64>() / times.len() as f64;
            out.push_str(&format!("mean,{n},,{planner},{}\n", fmt_f(mean)));
        }
        out
    }

    /// Mean planning time in seconds for one planner label at one N, if any
    /// timings were recorded.
    pub fn mean_planning_time(&self, n: usize, planner: &str) -> Option<f64> {
        let times: Vec<f64> = self
            .timings
            .iter()
            .filter(|t| t.n == n && t.planner == planner)
            .map(|t| t.seconds)
            .collect();
        (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64)
    }
}

fn run_trial(
    config: &McConfig,
    n: usize,
    trial: usize,
    strategy: SpawnStrategy,
) -> Result<(Vec<TrialRecord>, Vec<TimingRecord>)> {
    let mut rng = trial_rng(config.seed, n, trial);
    let scenario = generate_scenario(strategy, n, &config.gen, &mut rng);
    let (lower_bound, upper_bound) =
        cost_bounds(&scenario.agents, &scenario.noise, scenario.horizon)?;

    let mut rows = Vec::new();
    let mut timings = Vec::new();
    let record = |planner: String, outcome: TrialOutcome| TrialRecord {
        n,
        trial,
        strategy,
        planner,
        outcome,
        lower_bound,
        upper_bound,
    };
    let plan_outcome = |plan: &crate::planner::PlanResult| TrialOutcome::Plan {
        cost: plan.cost,
        cost_j: plan.cost_j,
        completion_time: plan.completion_time,
        aid_count: plan.sequence.aid_count(),
        sequence: plan.sequence.ids(),
    };

    for planner in &config.planners {
        match planner {
            PlannerKind::Greedy { label, weights } => {
                let started = Instant::now();
                let plan = greedy_plan(&scenario, weights, scenario.max_tasks)?;
                let seconds = started.elapsed().as_secs_f64();
                rows.push(record(label.clone(), plan_outcome(&plan)));
                timings.push(TimingRecord {
                    n,
                    trial,
                    planner: label.clone(),
                    seconds,
                });
            }
            PlannerKind::Exhaustive => {
                if n > config.exhaustive_n_cap {
                    let reason = format!("n {} above exhaustive cap {}", n, config.exhaustive_n_cap);
                    for label in ["exhaustive-best", "exhaustive-worst"] {
                        rows.push(record(
                            label.to_string(),
                            TrialOutcome::Skipped {
                                reason: reason.clone(),
                            },
                        ));
                    }
                    continue;
                }
                let started = Instant::now();
                match exhaustive_plan(&scenario, scenario.max_tasks, Some(config.enumeration_budget))
                {
                    Ok((best, worst)) => {
                        let seconds = started.elapsed().as_secs_f64();
                        rows.push(record("exhaustive-best".to_string(), plan_outcome(&best)));
                        rows.push(record("exhaustive-worst".to_string(), plan_outcome(&worst)));
                        timings.push(TimingRecord {
                            n,
                            trial,
                            planner: "exhaustive".to_string(),
                            seconds,
                        });
                    }
                    Err(err @ Error::BudgetExceeded { .. }) => {
                        let reason = err.to_string();
                        for label in ["exhaustive-best", "exhaustive-worst"] {
                            rows.push(record(
                                label.to_string(),
                                TrialOutcome::Skipped {
                                    reason: reason.clone(),
                                },
                            ));
                        }
                    }
                    Err(other) => return Err(other),
                }
            }
        }
    }
    Ok((rows, timings))
}

/// Run the full experiment: every N, every trial, every planner.
///
/// Trials execute in parallel; each derives its own RNG stream, and results
/// are collected in (N, trial) order, so the report's cost tables do not
/// depend on the worker count.
pub fn run_experiment(config: &McConfig) -> Result<McReport> {
    config.validate()?;
    let assignments = config.strategy_assignments();

    let mut trials = Vec::new();
    let mut timings = Vec::new();
    for n in config.n_min..=config.n_max {
        let per_n: Vec<(Vec<TrialRecord>, Vec<TimingRecord>)> = (0..config.trials_per_n)
            .into_par_iter()
            .map(|trial| run_trial(config, n, trial, assignments[trial]))
            .collect::<Result<_>>()?;
        for (rows, times) in per_n {
            trials.extend(rows);
            timings.extend(times);
        }
    }

    let aggregates = aggregate(&trials);
    let soft_checks = directional_checks(&aggregates, &trials);
    Ok(McReport {
        seed: config.seed,
        trials,
        aggregates,
        timings,
        soft_checks,
    })
}

fn aggregate(trials: &[TrialRecord]) -> Vec<AggregateRecord> {
    let mut keys: Vec<(usize, String)> = trials
        .iter()
        .map(|t| (t.n, t.planner.clone()))
        .collect();
    keys.sort();
    keys.dedup();

    keys.into_iter()
        .filter_map(|(n, planner)| {
            let rows: Vec<&TrialRecord> = trials
                .iter()
                .filter(|t| t.n == n && t.planner == planner)
                .collect();
            let mut costs = Vec::new();
            let mut lowers = Vec::new();
            let mut uppers = Vec::new();
            for row in rows {
                if let TrialOutcome::Plan { cost, .. } = &row.outcome {
                    costs.push(*cost);
                    lowers.push(row.lower_bound);
                    uppers.push(row.upper_bound);
                }
            }
            (!costs.is_empty()).then(|| AggregateRecord {
                n,
                planner,
                trials_used: costs.len(),
                mean_cost: costs.iter().sum::<f64>() / costs.len() as f64,
                mean_lower_bound: lowers.iter().sum::<f64>() / lowers.len() as f64,
                mean_upper_bound: uppers.iter().sum::<f64>() / uppers.len() as f64,
            })
        })
        .collect()
}

/// Directional weight-mix notes: does the mixed preset beat each single-term
/// preset on mean cost (2% relative slack)? Purely informational.
fn directional_checks(aggregates: &[AggregateRecord], trials: &[TrialRecord]) -> Vec<String> {
    let mut out = Vec::new();
    let mean_of = |label: &str| -> Option<f64> {
        let costs: Vec<f64> = trials
            .iter()
            .filter(|t| t.planner == label)
            .filter_map(|t| match &t.outcome {
                TrialOutcome::Plan { cost, .. } => Some(*cost),
                TrialOutcome::Skipped { .. } => None,
            })
            .collect();
        (!costs.is_empty()).then(|| costs.iter().sum::<f64>() / costs.len() as f64)
    };
    if let Some(g4) = mean_of("G4") {
        for other in ["G1", "G2", "G3"] {
            if let Some(reference) = mean_of(other) {
                let pass = g4 <= reference * 1.02;
                out.push(format!(
                    "soft_check overall G4<=1.02*{other}: {} (G4 {} vs {other} {})",
                    if pass { "pass" } else { "fail" },
                    fmt_f(g4),
                    fmt_f(reference)
                ));
            }
        }
    }
    // Per-N notes when both sides aggregated.
    for agg in aggregates {
        if agg.planner == "G4" {
            for other in ["G1", "G2", "G3"] {
                if let Some(reference) = aggregates
                    .iter()
                    .find(|a| a.n == agg.n && a.planner == other)
                {
                    let pass = agg.mean_cost <= reference.mean_cost * 1.02;
                    out.push(format!(
                        "soft_check n={} G4<=1.02*{other}: {}",
                        agg.n,
                        if pass { "pass" } else { "fail" }
                    ));
                }
            }
        }
    }
    out
}
