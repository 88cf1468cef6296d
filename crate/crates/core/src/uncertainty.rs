//! Scalar navigation-variance recursions and the single-aid cost function.
//!
//! Every system matrix in the underlying model (state transition, input and
//! measurement maps) is the 2x2 identity and all covariances start as scalar
//! multiples of it, so each covariance stays `nu * I` forever and the Kalman
//! filter collapses to scalar recursions on `nu`:
//!
//! - an agent's variance grows by `nu_w` per step, drops once when it
//!   receives its single aiding measurement, and grows again afterwards;
//! - the CNA's variance grows by `nu_c` per step and resets to `nu_G` when a
//!   surfacing window completes;
//! - the aiding measurement noise is `nu_y` plus the CNA's own variance at
//!   the aiding step.
//!
//! The per-agent mission cost `J_i(Z)` (time-averaged variance as a function
//! of the aiding step `Z`) then has a closed form, as does its continuous
//! minimizer, the optimal time-to-aid. [`matrix_kf_oracle`] keeps the full
//! 2x2 matrix filter around as an independent route to the same numbers.

use crate::error::{Error, Result};

/// Noise model and timing constants shared by every vehicle in a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Agent process variance added per step (LU^2).
    pub agent_process_var: f64,
    /// CNA process variance added per step (LU^2); expected to be well below
    /// `agent_process_var`.
    pub cna_process_var: f64,
    /// Constant part of the aiding measurement variance (LU^2).
    pub measurement_var: f64,
    /// CNA variance right after a completed GPS fix (LU^2); also its initial
    /// variance.
    pub gps_var: f64,
    /// Number of steps a surfacing takes.
    pub surface_steps: usize,
    /// Timestep in TU.
    pub dt: f64,
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("agent_process_var", self.agent_process_var),
            ("cna_process_var", self.cna_process_var),
            ("measurement_var", self.measurement_var),
            ("gps_var", self.gps_var),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidScenario(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidScenario(format!(
                "dt must be positive and finite, got {}",
                self.dt
            )));
        }
        Ok(())
    }

    /// Soft checks that do not invalidate a scenario.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.cna_process_var > self.agent_process_var {
            out.push(format!(
                "CNA process variance ({}) exceeds agent process variance ({}); \
                 the model expects the CNA to drift less than the agents",
                self.cna_process_var, self.agent_process_var
            ));
        }
        out
    }
}

impl Default for NoiseParams {
    /// The reference parameter set used throughout the numerical studies.
    fn default() -> Self {
        NoiseParams {
            agent_process_var: 1.0,
            cna_process_var: 0.1,
            measurement_var: 10.0,
            gps_var: 10.0,
            surface_steps: 60,
            dt: 1.0,
        }
    }
}

/// A per-step variance history, one entry per step `0..=horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceTrace {
    values: Vec<f64>,
}

impl VarianceTrace {
    fn new(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| *v >= 0.0 && v.is_finite()));
        VarianceTrace { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time-averaged variance over the whole trace.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

impl std::ops::Index<usize> for VarianceTrace {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.values[k]
    }
}

/// Posterior variance after a single scalar Kalman update.
///
/// The measurement variance is `nu_y + nu_cna`: a constant sensor floor plus
/// the aid vehicle's own position uncertainty. Computed as the product form
/// `prior * r / (prior + r)`, which equals `(1 - gain) * prior` with
/// `gain = prior / (prior + r)` but avoids the cancellation of `1 - gain`
/// when the prior dwarfs the measurement variance. When every term is zero
/// the 0/0 gain resolves to a zero posterior.
pub fn posterior_variance(nu_prior: f64, nu_y: f64, nu_cna: f64) -> f64 {
    let measurement = nu_y + nu_cna;
    let innovation = nu_prior + measurement;
    if innovation == 0.0 {
        return 0.0;
    }
    nu_prior * measurement / innovation
}

/// Agent variance trace over `0..=horizon`, optionally with one aiding event
/// `(step, posterior)` where `posterior` is the variance right after the
/// measurement at `step`.
pub fn agent_variance_trace(
    nu0: f64,
    aiding: Option<(usize, f64)>,
    params: &NoiseParams,
    horizon: usize,
) -> Result<VarianceTrace> {
    if let Some((step, post)) = aiding {
        if step > horizon {
            return Err(Error::AidStepOutOfRange {
                step,
                min: 0,
                max: horizon,
            });
        }
        if post < 0.0 {
            return Err(Error::InvalidScenario(format!(
                "posterior variance must be non-negative, got {post}"
            )));
        }
    }
    let nu_w = params.agent_process_var;
    let values = (0..=horizon)
        .map(|k| match aiding {
            Some((step, post)) if k >= step => post + (k - step) as f64 * nu_w,
            _ => nu0 + k as f64 * nu_w,
        })
        .collect();
    Ok(VarianceTrace::new(values))
}

/// CNA variance at step `k`, given an optional surfacing that started at
/// `surfacing_start` and completed `surface_steps` later.
pub fn cna_variance_at(surfacing_start: Option<usize>, params: &NoiseParams, k: usize) -> f64 {
    match surfacing_start {
        Some(start) if k >= start + params.surface_steps => {
            params.gps_var + (k - start - params.surface_steps) as f64 * params.cna_process_var
        }
        _ => params.gps_var + k as f64 * params.cna_process_var,
    }
}

/// CNA variance trace over `0..=horizon` with at most one surfacing.
pub fn cna_variance_trace(
    surfacing_start: Option<usize>,
    params: &NoiseParams,
    horizon: usize,
) -> Result<VarianceTrace> {
    if let Some(start) = surfacing_start {
        let end = start + params.surface_steps;
        if end > horizon {
            return Err(Error::SurfacingPastHorizon {
                start,
                end,
                horizon,
            });
        }
    }
    let values = (0..=horizon)
        .map(|k| cna_variance_at(surfacing_start, params, k))
        .collect();
    Ok(VarianceTrace::new(values))
}

/// Closed-form `J_i(Z)` without the `1 <= Z` restriction; `Z = 0` means the
/// agent is aided before it moves. Shared by the public entry points.
pub(crate) fn agent_cost_at(
    nu0: f64,
    aid_step: usize,
    nu_cna_at_aid: f64,
    params: &NoiseParams,
    horizon: usize,
) -> f64 {
    debug_assert!(aid_step <= horizon);
    let nu_w = params.agent_process_var;
    let z = aid_step as f64;
    let t = horizon as f64;
    let prior = nu0 + z * nu_w;
    let post = posterior_variance(prior, params.measurement_var, nu_cna_at_aid);
    nu_w * t / 2.0
        + (z * nu0 + (post - z * nu_w) * (t + 1.0) - post * z + nu_w * z * z) / (t + 1.0)
}

/// Time-averaged variance of one agent aided once at step `aid_step`, with
/// the CNA carrying variance `nu_cna_at_aid` at that step.
pub fn agent_cost(
    nu0: f64,
    aid_step: usize,
    nu_cna_at_aid: f64,
    params: &NoiseParams,
    horizon: usize,
) -> Result<f64> {
    if aid_step < 1 || aid_step > horizon {
        return Err(Error::AidStepOutOfRange {
            step: aid_step,
            min: 1,
            max: horizon,
        });
    }
    Ok(agent_cost_at(nu0, aid_step, nu_cna_at_aid, params, horizon))
}

/// Continuous minimizer of `J_i(Z)` for a fixed CNA variance.
///
/// Derived by zeroing the derivative of the closed-form cost; requires a
/// strictly positive agent process variance (the expression divides by it).
pub fn optimal_aid_time(
    nu0: f64,
    nu_cna: f64,
    params: &NoiseParams,
    horizon: usize,
) -> Result<f64> {
    let nu_w = params.agent_process_var;
    if nu_w <= 0.0 {
        return Err(Error::ZeroProcessVariance);
    }
    let t = horizon as f64;
    let meas = params.measurement_var + nu_cna;
    let base = t * nu_w + nu0 + nu_w;
    let root = ((base + meas) * (base + 9.0 * meas)).sqrt();
    Ok((root + (t + 1.0) * nu_w - 3.0 * nu0 - 3.0 * meas) / (4.0 * nu_w))
}

/// Integer argmin of `J_i(Z)` over `{1, ..., horizon}`.
///
/// Rounds the continuous minimizer by comparing the cost at its floor and
/// ceiling, ties toward the smaller step. With zero process variance the
/// cost is non-decreasing in `Z` and the argmin is the first step.
pub fn optimal_aid_step(
    nu0: f64,
    nu_cna: f64,
    params: &NoiseParams,
    horizon: usize,
) -> Result<usize> {
    if horizon == 0 {
        return Err(Error::AidStepOutOfRange {
            step: 1,
            min: 1,
            max: 0,
        });
    }
    if params.agent_process_var <= 0.0 {
        return Ok(1);
    }
    let continuous = optimal_aid_time(nu0, nu_cna, params, horizon)?;
    let clamped = continuous.clamp(1.0, horizon as f64);
    let lo = clamped.floor() as usize;
    let hi = clamped.ceil() as usize;
    if lo == hi {
        return Ok(lo);
    }
    let cost_lo = agent_cost(nu0, lo, nu_cna, params, horizon)?;
    let cost_hi = agent_cost(nu0, hi, nu_cna, params, horizon)?;
    Ok(if cost_lo <= cost_hi { lo } else { hi })
}

/// Cost of an agent that is never aided: the average of a linearly growing
/// trace, `nu0 + nu_w * horizon / 2`.
pub fn max_cost(nu0: f64, params: &NoiseParams, horizon: usize) -> f64 {
    nu0 + params.agent_process_var * horizon as f64 / 2.0
}

/// Best cost still achievable for an agent not yet aided by step `k`,
/// assuming the most favorable CNA variance (`gps_var`) at the measurement.
///
/// Constant (the global single-aid minimum) while the optimal time-to-aid is
/// still ahead; afterwards the cost of aiding immediately, which only grows.
pub fn min_cost_remaining(nu0: f64, k: usize, params: &NoiseParams, horizon: usize) -> f64 {
    assert!(k <= horizon, "step {k} past horizon {horizon}");
    if horizon == 0 {
        return nu0;
    }
    let best_step =
        optimal_aid_step(nu0, params.gps_var, params, horizon).expect("horizon checked above");
    if k <= best_step {
        agent_cost_at(nu0, best_step, params.gps_var, params, horizon)
    } else {
        agent_cost_at(nu0, k, params.gps_var, params, horizon)
    }
}

/// Averaged lower/upper cost bounds across a set of agents: the mean of the
/// per-agent single-aid minima and of the never-aided maxima.
pub fn cost_bounds(
    agents: &[crate::kinematics::AgentSpec],
    params: &NoiseParams,
    horizon: usize,
) -> Result<(f64, f64)> {
    if agents.is_empty() {
        return Err(Error::NoAgents);
    }
    let n = agents.len() as f64;
    let mut lower = 0.0;
    let mut upper = 0.0;
    for agent in agents {
        let nu0 = agent.initial_variance;
        upper += max_cost(nu0, params, horizon);
        lower += if horizon == 0 {
            nu0
        } else {
            let best_step = optimal_aid_step(nu0, params.gps_var, params, horizon)?;
            agent_cost_at(nu0, best_step, params.gps_var, params, horizon)
        };
    }
    Ok((lower / n, upper / n))
}

/// A 2x2 covariance matrix, used by the matrix-filter oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovMatrix2 {
    m: [[f64; 2]; 2],
}

impl CovMatrix2 {
    pub fn scaled_identity(v: f64) -> Self {
        CovMatrix2 {
            m: [[v, 0.0], [0.0, v]],
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.m[row][col]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Half the trace: the scalar variance a `nu * I` covariance carries.
    pub fn half_trace(&self) -> f64 {
        self.trace() / 2.0
    }

    fn add(&self, other: &CovMatrix2) -> CovMatrix2 {
        let (a, b) = (&self.m, &other.m);
        CovMatrix2 {
            m: [
                [a[0][0] + b[0][0], a[0][1] + b[0][1]],
                [a[1][0] + b[1][0], a[1][1] + b[1][1]],
            ],
        }
    }

    fn mul(&self, other: &CovMatrix2) -> CovMatrix2 {
        let (a, b) = (&self.m, &other.m);
        CovMatrix2 {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }

    fn inverse(&self) -> CovMatrix2 {
        let det = self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0];
        assert!(det != 0.0, "singular innovation covariance");
        CovMatrix2 {
            m: [
                [self.m[1][1] / det, -self.m[0][1] / det],
                [-self.m[1][0] / det, self.m[0][0] / det],
            ],
        }
    }

    fn sub_from_identity(&self) -> CovMatrix2 {
        CovMatrix2 {
            m: [
                [1.0 - self.m[0][0], -self.m[0][1]],
                [-self.m[1][0], 1.0 - self.m[1][1]],
            ],
        }
    }
}

/// Full 2x2 matrix Kalman covariance propagation for one agent, as an
/// independent cross-check of the scalar recursions.
///
/// `schedule` lists this agent's aiding events as `(step, cna_variance)`
/// pairs; the single-measurement model allows at most one. All system
/// matrices are identities, the process noise is `nu_w * I` and the
/// measurement noise at an aiding step is `(nu_y + nu_cna) * I`. Returns the
/// posterior covariance at every step `0..=horizon`; its half-trace must
/// match the scalar trace entry at every step.
pub fn matrix_kf_oracle(
    nu0: f64,
    schedule: &[(usize, f64)],
    params: &NoiseParams,
    horizon: usize,
) -> Result<Vec<CovMatrix2>> {
    if schedule.len() > 1 {
        return Err(Error::RepeatedAiding { agent_id: 0 });
    }
    if let Some(&(step, _)) = schedule.first() {
        if step > horizon {
            return Err(Error::AidStepOutOfRange {
                step,
                min: 0,
                max: horizon,
            });
        }
    }

    let transition = CovMatrix2::scaled_identity(1.0);
    let process = CovMatrix2::scaled_identity(params.agent_process_var);
    let mut posterior = CovMatrix2::scaled_identity(nu0);
    let mut out = Vec::with_capacity(horizon + 1);

    let update = |predicted: &CovMatrix2, nu_cna: f64| -> CovMatrix2 {
        // H = I, so S = R + P and K = P S^-1.
        let noise = CovMatrix2::scaled_identity(params.measurement_var + nu_cna);
        let innovation = noise.add(predicted);
        if innovation.trace() == 0.0 {
            // All variances zero: the 0/0 gain resolves to no correction on
            // an already exact estimate.
            return *predicted;
        }
        let gain = predicted.mul(&innovation.inverse());
        gain.sub_from_identity().mul(predicted)
    };

    if let Some(&(0, nu_cna)) = schedule.first() {
        posterior = update(&posterior, nu_cna);
    }
    out.push(posterior);

    for k in 1..=horizon {
        let predicted = transition
            .mul(&posterior)
            .mul(&transition) // F P F^T with F symmetric
            .add(&process);
        posterior = match schedule.first() {
            Some(&(step, nu_cna)) if step == k => update(&predicted, nu_cna),
            _ => predicted,
        };
        out.push(posterior);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> NoiseParams {
        NoiseParams::default()
    }

    #[test]
    fn posterior_variance_examples() {
        // nu_prior = 1060 against measurement variance 20.
        assert_relative_eq!(
            posterior_variance(1060.0, 10.0, 10.0),
            19.62962962962963,
            max_relative = 1e-12
        );
        assert_eq!(posterior_variance(50.0, 0.0, 0.0), 0.0);
        assert_eq!(posterior_variance(0.0, 7.0, 3.0), 0.0);
        assert_eq!(posterior_variance(0.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn posterior_dominance() {
        for (prior, ny, nc) in [(1060.0, 10.0, 10.0), (5.0, 1.0, 0.5), (1e6, 1e-3, 0.0)] {
            let post = posterior_variance(prior, ny, nc);
            assert!(post < prior);
            assert!(post < ny + nc);
        }
    }

    #[test]
    fn agent_trace_linear_growth() {
        let p = params();
        let trace = agent_variance_trace(100.0, None, &p, 3).unwrap();
        assert_eq!(trace.values(), &[100.0, 101.0, 102.0, 103.0]);

        let frozen = NoiseParams {
            agent_process_var: 0.0,
            ..p
        };
        let trace = agent_variance_trace(100.0, None, &frozen, 5).unwrap();
        assert!(trace.values().iter().all(|v| *v == 100.0));
    }

    #[test]
    fn agent_trace_with_aiding_drop() {
        let p = params();
        // Aided at step 2: prior 102, measurement variance 20.
        let post = posterior_variance(100.0 + 2.0, 10.0, 10.0);
        assert_relative_eq!(post, 2040.0 / 122.0, max_relative = 1e-12);
        let trace = agent_variance_trace(100.0, Some((2, post)), &p, 3).unwrap();
        assert_relative_eq!(trace[0], 100.0);
        assert_relative_eq!(trace[1], 101.0);
        assert_relative_eq!(trace[2], 16.721311475409838, max_relative = 1e-9);
        assert_relative_eq!(trace[3], 17.721311475409838, max_relative = 1e-9);
    }

    #[test]
    fn agent_trace_rejects_late_aiding() {
        let err = agent_variance_trace(1.0, Some((4, 0.5)), &params(), 3).unwrap_err();
        assert!(matches!(err, Error::AidStepOutOfRange { .. }));
    }

    #[test]
    fn cna_trace_examples() {
        let p = params();
        let trace = cna_variance_trace(None, &p, 3).unwrap();
        assert_eq!(trace.values(), &[10.0, 10.1, 10.2, 10.3]);

        let small = NoiseParams {
            surface_steps: 2,
            ..p
        };
        let trace = cna_variance_trace(Some(0), &small, 4).unwrap();
        let expect = [10.0, 10.1, 10.0, 10.1, 10.2];
        for (a, b) in trace.values().iter().zip(expect) {
            assert_relative_eq!(*a, b, max_relative = 1e-12);
        }

        let still = NoiseParams {
            cna_process_var: 0.0,
            ..p
        };
        let trace = cna_variance_trace(None, &still, 10).unwrap();
        assert!(trace.values().iter().all(|v| *v == 10.0));

        let err = cna_variance_trace(Some(50), &p, 100).unwrap_err();
        assert!(matches!(err, Error::SurfacingPastHorizon { .. }));
    }

    /// Brute-force trace average, the independent route to `J_i(Z)`.
    fn cost_by_summation(
        nu0: f64,
        aid_step: usize,
        nu_cna: f64,
        p: &NoiseParams,
        horizon: usize,
    ) -> f64 {
        let prior = nu0 + aid_step as f64 * p.agent_process_var;
        let post = posterior_variance(prior, p.measurement_var, nu_cna);
        let trace = agent_variance_trace(nu0, Some((aid_step, post)), p, horizon).unwrap();
        trace.mean()
    }

    #[test]
    fn closed_form_cost_matches_summation() {
        let p = params();
        for (nu0, z, nuc, t) in [
            (100.0, 960, 10.0, 2000),
            (2610.0, 1, 10.0, 2000),
            (557.0, 1999, 600.0, 2000),
            (0.5, 3, 0.0, 7),
        ] {
            let closed = agent_cost(nu0, z, nuc, &p, t).unwrap();
            let brute = cost_by_summation(nu0, z, nuc, &p, t);
            assert_relative_eq!(closed, brute, max_relative = 1e-9);
        }
        // Frozen value for the reference configuration (computed by the
        // summation route).
        assert_relative_eq!(
            agent_cost(100.0, 960, 10.0, &p, 2000).unwrap(),
            558.7578433,
            max_relative = 1e-8
        );
    }

    #[test]
    fn zero_noise_cost_is_prefix_average() {
        // nu_w = 0, perfect measurement: variance is nu0 before the aid and
        // zero afterwards.
        let p = NoiseParams {
            agent_process_var: 0.0,
            measurement_var: 0.0,
            ..params()
        };
        let nu0 = 123.0;
        let horizon = 9;
        for z in 1..=horizon {
            let cost = agent_cost(nu0, z, 0.0, &p, horizon).unwrap();
            assert_relative_eq!(
                cost,
                nu0 * z as f64 / (horizon + 1) as f64,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn agent_cost_rejects_out_of_range() {
        let p = params();
        assert!(matches!(
            agent_cost(1.0, 0, 10.0, &p, 5),
            Err(Error::AidStepOutOfRange { .. })
        ));
        assert!(matches!(
            agent_cost(1.0, 6, 10.0, &p, 5),
            Err(Error::AidStepOutOfRange { .. })
        ));
    }

    #[test]
    fn optimal_aid_time_reference_values() {
        let p = params();
        let z = optimal_aid_time(100.0, 10.0, &p, 2000).unwrap();
        assert_relative_eq!(z, 960.136, max_relative = 1e-4);

        // Larger initial uncertainty pulls the optimum earlier; a noisier
        // CNA pushes it later.
        let z_hot = optimal_aid_time(1000.0, 10.0, &p, 2000).unwrap();
        let z_noisy = optimal_aid_time(100.0, 1000.0, &p, 2000).unwrap();
        assert!(z_hot < z && z < z_noisy);

        assert!(matches!(
            optimal_aid_time(
                100.0,
                10.0,
                &NoiseParams {
                    agent_process_var: 0.0,
                    ..p
                },
                2000
            ),
            Err(Error::ZeroProcessVariance)
        ));
    }

    #[test]
    fn optimal_aid_step_matches_brute_force() {
        let p = params();
        for (nu0, nuc, t) in [
            (100.0, 10.0, 2000),
            (1000.0, 10.0, 2000),
            (100.0, 1000.0, 2000),
            (2610.0, 13.0, 1500),
            (3.0, 900.0, 120),
        ] {
            let step = optimal_aid_step(nu0, nuc, &p, t).unwrap();
            let brute = (1..=t)
                .min_by(|a, b| {
                    agent_cost(nu0, *a, nuc, &p, t)
                        .unwrap()
                        .total_cmp(&agent_cost(nu0, *b, nuc, &p, t).unwrap())
                })
                .unwrap();
            assert!(
                step.abs_diff(brute) <= 1,
                "step {step} vs brute {brute} for nu0={nu0}, nuc={nuc}, T={t}"
            );
            if step != brute {
                let a = agent_cost(nu0, step, nuc, &p, t).unwrap();
                let b = agent_cost(nu0, brute, nuc, &p, t).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn optimal_aid_step_zero_process_variance() {
        let p = NoiseParams {
            agent_process_var: 0.0,
            ..params()
        };
        assert_eq!(optimal_aid_step(100.0, 10.0, &p, 50).unwrap(), 1);
    }

    #[test]
    fn max_cost_examples() {
        let p = params();
        assert_relative_eq!(max_cost(2610.0, &p, 2000), 3610.0);
        assert_relative_eq!(
            max_cost(
                7.0,
                &NoiseParams {
                    agent_process_var: 0.0,
                    ..p
                },
                100
            ),
            7.0
        );
        let p2 = NoiseParams {
            agent_process_var: 2.0,
            ..p
        };
        assert_relative_eq!(max_cost(0.0, &p2, 4), 4.0);
        // Equals the average of the no-aid trace exactly.
        let trace = agent_variance_trace(0.0, None, &p2, 4).unwrap();
        assert_eq!(max_cost(0.0, &p2, 4), trace.mean());
    }

    #[test]
    fn min_cost_remaining_shape() {
        let p = params();
        let nu0 = 400.0;
        let horizon = 2000;
        let best_step = optimal_aid_step(nu0, p.gps_var, &p, horizon).unwrap();
        let floor = min_cost_remaining(nu0, 0, &p, horizon);
        assert_relative_eq!(
            floor,
            agent_cost(nu0, best_step, p.gps_var, &p, horizon).unwrap()
        );
        assert_relative_eq!(
            min_cost_remaining(nu0, horizon, &p, horizon),
            agent_cost(nu0, horizon, p.gps_var, &p, horizon).unwrap()
        );
        // Constant up to the optimum, then non-decreasing.
        let mut prev = floor;
        for k in 1..=horizon {
            let v = min_cost_remaining(nu0, k, &p, horizon);
            if k <= best_step {
                assert_eq!(v, floor);
            } else {
                assert!(v >= prev - 1e-9 * prev.max(1.0));
            }
            prev = v;
        }
    }

    #[test]
    fn cost_bounds_examples() {
        use crate::kinematics::{AgentSpec, Vec2};
        let agent = |id: usize, nu0: f64| AgentSpec {
            id,
            start: Vec2::ZERO,
            heading: 0.0,
            speed: 0.5,
            initial_variance: nu0,
        };

        // Degenerate single-agent case: everything noiseless except nu0.
        let p = NoiseParams {
            agent_process_var: 0.0,
            measurement_var: 0.0,
            gps_var: 0.0,
            ..params()
        };
        let horizon = 9;
        let (lower, upper) = cost_bounds(&[agent(1, 50.0)], &p, horizon).unwrap();
        assert_relative_eq!(lower, 50.0 / 10.0, max_relative = 1e-12);
        assert_relative_eq!(upper, 50.0);

        // N identical agents: bounds equal the single-agent bounds.
        let p = params();
        let single = cost_bounds(&[agent(1, 700.0)], &p, 2000).unwrap();
        let triple = cost_bounds(
            &[agent(1, 700.0), agent(2, 700.0), agent(3, 700.0)],
            &p,
            2000,
        )
        .unwrap();
        assert_relative_eq!(single.0, triple.0, max_relative = 1e-12);
        assert_relative_eq!(single.1, triple.1, max_relative = 1e-12);
        assert!(single.0 <= single.1);

        assert!(matches!(cost_bounds(&[], &p, 10), Err(Error::NoAgents)));
    }

    #[test]
    fn matrix_oracle_no_aiding_is_linear_growth() {
        let p = params();
        let cov = matrix_kf_oracle(100.0, &[], &p, 10).unwrap();
        for (k, c) in cov.iter().enumerate() {
            assert_relative_eq!(c.half_trace(), 100.0 + k as f64, max_relative = 1e-12);
            // Diagonal with equal entries throughout.
            assert_eq!(c.entry(0, 1), 0.0);
            assert_eq!(c.entry(1, 0), 0.0);
            assert_eq!(c.entry(0, 0), c.entry(1, 1));
        }
    }

    #[test]
    fn matrix_oracle_matches_scalar_posterior() {
        let p = params();
        let cov = matrix_kf_oracle(100.0, &[(2, 10.0)], &p, 3).unwrap();
        let post = posterior_variance(102.0, 10.0, 10.0);
        assert_relative_eq!(cov[2].half_trace(), post, max_relative = 1e-9);
        assert_relative_eq!(cov[3].half_trace(), post + 1.0, max_relative = 1e-9);
    }

    #[test]
    fn matrix_oracle_rejects_repeated_aiding() {
        let err = matrix_kf_oracle(1.0, &[(2, 10.0), (5, 10.0)], &params(), 10).unwrap_err();
        assert!(matches!(err, Error::RepeatedAiding { .. }));
    }

    #[test]
    fn matrix_oracle_aiding_at_step_zero() {
        let p = params();
        let cov = matrix_kf_oracle(100.0, &[(0, 10.0)], &p, 2).unwrap();
        let post = posterior_variance(100.0, 10.0, 10.0);
        assert_relative_eq!(cov[0].half_trace(), post, max_relative = 1e-12);
        assert_relative_eq!(cov[1].half_trace(), post + 1.0, max_relative = 1e-12);
    }

    #[test]
    fn matrix_oracle_all_zero_variances() {
        let p = NoiseParams {
            agent_process_var: 0.0,
            measurement_var: 0.0,
            ..params()
        };
        let cov = matrix_kf_oracle(0.0, &[(1, 0.0)], &p, 2).unwrap();
        for c in &cov {
            assert_eq!(c.half_trace(), 0.0);
        }
    }
}
