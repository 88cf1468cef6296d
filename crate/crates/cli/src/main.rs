//! `cna` — plan aiding missions for a cooperative navigation aid vehicle.
//!
//! Subcommands:
//! - `plan`  run the greedy or exhaustive planner on a scenario file and
//!   export the plan summary, per-timestep traces and the event table;
//! - `mc`    run a seeded Monte Carlo experiment comparing planners;
//! - `zstar` evaluate the closed-form optimal time-to-aid for one agent;
//! - `print-defaults` dump the built-in parameter defaults.
//!
//! Exit codes: 0 success, 1 usage/input error, 2 the planner could not
//! schedule any agent within the mission time. The `CNA_WORKERS` environment
//! variable caps the worker thread count.

mod export;
mod mc_file;
mod scenario_file;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cna_core::montecarlo::run_experiment;
use cna_core::planner::{exhaustive_plan, greedy_plan, PlanResult};
use cna_core::uncertainty::{agent_cost, max_cost, optimal_aid_step, optimal_aid_time, NoiseParams};

/// Input or usage failure; maps to exit code 1.
#[derive(Debug)]
pub struct CliError(String);

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError(message.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<cna_core::Error> for CliError {
    fn from(e: cna_core::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "cna",
    version,
    about = "Path planning for a cooperative navigation aid vehicle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum PlannerArg {
    Greedy,
    Exhaustive,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a task sequence for a scenario file and export the results
    Plan {
        /// Scenario description (TOML)
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = PlannerArg::Greedy)]
        planner: PlannerArg,
        /// Greedy reward weights: G1..G4 or "alpha,beta,gamma"
        #[arg(long, default_value = "G4")]
        weights: String,
        /// Output directory for plan.csv, trace.csv, events.csv
        #[arg(long)]
        out: PathBuf,
        /// Cap on the exhaustive enumeration size
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Run a Monte Carlo experiment from a config file
    Mc {
        /// Experiment configuration (TOML)
        config: PathBuf,
        /// Output directory for trials.csv, aggregates.csv, timings.csv
        #[arg(long)]
        out: PathBuf,
    },
    /// Closed-form optimal time-to-aid for a single agent
    Zstar {
        /// Initial agent variance
        #[arg(long)]
        nu0: f64,
        /// CNA variance at the aiding step
        #[arg(long)]
        nucna: f64,
        /// Mission horizon in steps
        #[arg(long = "T", default_value_t = 2000)]
        horizon: usize,
        /// Agent process variance per step
        #[arg(long, default_value_t = 1.0)]
        nuw: f64,
        /// Constant measurement variance
        #[arg(long, default_value_t = 10.0)]
        nuy: f64,
    },
    /// Print the built-in default parameters
    PrintDefaults,
}

fn init_workers() {
    if let Ok(value) = std::env::var("CNA_WORKERS") {
        match value.parse::<usize>() {
            Ok(workers) if workers > 0 => {
                // Ignore the error if a pool already exists.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build_global();
            }
            _ => eprintln!("note: ignoring invalid CNA_WORKERS value {value:?}"),
        }
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn cmd_plan(
    scenario_path: &Path,
    planner: PlannerArg,
    weights_arg: &str,
    out: &Path,
    budget: Option<u64>,
) -> Result<u8, CliError> {
    let text = fs::read_to_string(scenario_path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", scenario_path.display())))?;
    let loaded = scenario_file::parse_scenario(&text)?;
    for notice in &loaded.notices {
        eprintln!("note: {notice}");
    }
    for warning in loaded.scenario.noise.warnings() {
        eprintln!("warning: {warning}");
    }
    let scenario = &loaded.scenario;

    let (label, plan, worst): (String, PlanResult, Option<PlanResult>) = match planner {
        PlannerArg::Greedy => {
            let weights = mc_file::parse_weights(weights_arg)?;
            let plan = greedy_plan(scenario, &weights, scenario.max_tasks)?;
            (format!("greedy:{weights_arg}"), plan, None)
        }
        PlannerArg::Exhaustive => {
            let (best, worst) = exhaustive_plan(scenario, scenario.max_tasks, budget)?;
            ("exhaustive".to_string(), best, Some(worst))
        }
    };

    fs::create_dir_all(out)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", out.display())))?;
    write_file(out, "plan.csv", &export::plan_csv(scenario, &label, &plan, worst.as_ref()))?;
    write_file(out, "trace.csv", &export::trace_csv(scenario, &plan))?;
    write_file(out, "events.csv", &export::events_csv(scenario, &plan))?;
    write_file(
        out,
        "scenario_resolved.toml",
        &scenario_file::scenario_to_toml(scenario),
    )?;

    println!(
        "plan: sequence [{}] cost {:.6} (J {:.6}), outputs in {}",
        plan.sequence
            .ids()
            .iter()
            .map(|id| id.to_string())
            .collect::<Vec<_>>()
            .join(", "),
        plan.cost,
        plan.cost_j,
        out.display()
    );

    if plan.sequence.aid_count() == 0 {
        eprintln!("no agent can be aided within the mission time; wrote the no-aid plan");
        return Ok(2);
    }
    Ok(0)
}

fn cmd_mc(config_path: &Path, out: &Path) -> Result<u8, CliError> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", config_path.display())))?;
    let config = mc_file::parse_mc_config(&text)?;
    let report = run_experiment(&config)?;

    fs::create_dir_all(out)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", out.display())))?;
    write_file(out, "trials.csv", &report.trials_csv())?;
    write_file(out, "aggregates.csv", &report.aggregates_csv())?;
    write_file(out, "timings.csv", &report.timings_csv())?;
    println!(
        "mc: {} trial rows, {} aggregates, outputs in {}",
        report.trials.len(),
        report.aggregates.len(),
        out.display()
    );
    Ok(0)
}

fn cmd_zstar(nu0: f64, nucna: f64, horizon: usize, nuw: f64, nuy: f64) -> Result<u8, CliError> {
    let params = NoiseParams {
        agent_process_var: nuw,
        measurement_var: nuy,
        ..NoiseParams::default()
    };
    let continuous = optimal_aid_time(nu0, nucna, &params, horizon)?;
    let step = optimal_aid_step(nu0, nucna, &params, horizon)?;
    let cost_at_step = agent_cost(nu0, step, nucna, &params, horizon)?;
    println!("zstar_continuous,{continuous:.12e}");
    println!("zstar_step,{step}");
    println!("cost_at_step,{cost_at_step:.12e}");
    println!("cost_max,{:.12e}", max_cost(nu0, &params, horizon));
    Ok(0)
}

fn cmd_print_defaults() -> Result<u8, CliError> {
    let defaults = scenario_file::default_params();
    println!("# built-in default parameters");
    println!("key,value");
    println!("m,{}", defaults.noise.surface_steps);
    println!("t_max,{:?}", defaults.horizon as f64);
    println!("dt,{:?}", defaults.noise.dt);
    println!("v_c,{:?}", defaults.cna_speed);
    println!("v_a,{:?}", defaults.agent_speed);
    println!("nu_w,{:?}", defaults.noise.agent_process_var);
    println!("nu_c,{:?}", defaults.noise.cna_process_var);
    println!("nu_y,{:?}", defaults.noise.measurement_var);
    println!("nu_g,{:?}", defaults.noise.gps_var);
    println!("box_side,{:?}", defaults.box_side);
    println!("circle_radius,{:?}", defaults.circle_radius);
    println!("nu0_max,{:?}", defaults.nu0_max);
    println!("horizon,{}", defaults.horizon);
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Plan {
            scenario,
            planner,
            weights,
            out,
            budget,
        } => cmd_plan(&scenario, planner, &weights, &out, budget),
        Command::Mc { config, out } => cmd_mc(&config, &out),
        Command::Zstar {
            nu0,
            nucna,
            horizon,
            nuw,
            nuy,
        } => cmd_zstar(nu0, nucna, horizon, nuw, nuy),
        Command::PrintDefaults => cmd_print_defaults(),
    }
}

fn main() -> ExitCode {
    init_workers();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
